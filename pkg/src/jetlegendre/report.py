"""Run the pipeline on a manifest and collect JSON-ready report sections.

Every expression is emitted as a grammar string that :func:`parse` reads back
under the context stored next to it.
"""

from __future__ import annotations

from pathlib import Path

from . import numlab
from .bridge import generating_map_even, generating_map_odd, transport_hamiltonian
from .canonical import (
    completeness_residuals,
    dirac_chain,
    reduced_hamiltonian,
    soundness_residuals,
)
from .errors import DegenerateError, ValidationError
from .ostro import (
    energy_identity,
    hamilton_equations,
    ostrogradsky_hamiltonian,
    ostrogradsky_jet_rules,
    ostrogradsky_momenta,
    pullback_residuals,
)
from .schmidt import (
    integrability_check,
    legendre_identity,
    schmidt_even,
    schmidt_odd,
    solve_auxiliary_even,
    verify_constraint_recovery,
)
from .symcore import Expr, jet_name, linear_solve, parse, render
from .variational import euler_lagrange, highest_hessian, is_nondegenerate


def _r(e, ctx=None):
    return render(e, ctx)


def _rmap(d, ctx=None):
    return {k: _r(v, ctx) for k, v in d.items()}


def resolve_mode(m, mode=None):
    mode = mode or m.mode
    if mode != "auto":
        return mode
    spec = m.spec()
    if spec.order == 2 and integrability_check(spec, m.accelerations):
        return "even"
    if m.auxiliary_F:
        return "odd"
    return "even"


# ---------------------------------------------------------------------------
# sections


def el_section(m):
    spec = m.spec()
    el = euler_lagrange(spec)
    return {
        "equations": [_r(e, el.ctx) for e in el.equations],
        "order": el.order,
        "hessian": [[_r(x) for x in row] for row in highest_hessian(spec).to_lists()],
        "nondegenerate": is_nondegenerate(spec),
    }


def ostro_pipeline(m):
    spec = m.spec()
    ps = ostrogradsky_hamiltonian(spec)
    momenta = ostrogradsky_momenta(spec)
    return spec, ps, momenta


def ostro_section(m):
    spec, ps, momenta = ostro_pipeline(m)
    el = euler_lagrange(spec)
    residuals = pullback_residuals(ps, ostrogradsky_jet_rules(spec, momenta), momenta.ctx)
    return {
        "momenta": _rmap(momenta.defs, momenta.ctx),
        "H": _r(ps.H, ps.ctx),
        "pairs": [list(p) for p in ps.pairs],
        "equations": [{"state": s, "rate": _r(r, ps.ctx)} for s, r in hamilton_equations(ps)],
        "energy_identity": _r(energy_identity(ps)),
        "reproduces_el": _reproduces(residuals, el.equations),
    }


def _reproduces(residuals, equations):
    """Each pulled-back residual is zero or a constant multiple of an EL equation."""
    hits = 0
    for _, r in residuals:
        if not r:
            continue
        if not any(e and (r / e).is_constant() for e in equations):
            return False
        hits += 1
    return hits > 0 or not any(equations)


def even_pipeline(m):
    spec = m.spec()
    aux = solve_auxiliary_even(spec, m.accelerations)
    return spec, aux, schmidt_even(spec, aux)


def odd_pipeline(m):
    spec = m.spec()
    layout = m.layout(odd=True)
    F = m.auxiliary(layout)
    return spec, schmidt_odd(spec, F, layout)


def discrepancies(m, derived: dict):
    """Compare derived expressions with any ``printed`` values stored in the manifest."""
    out = []
    for key, expr_ctx in derived.items():
        entry = m.expected.get(key)
        if not isinstance(entry, dict) or not isinstance(entry.get("printed"), str):
            continue
        e, ctx = expr_ctx
        printed = parse(entry["printed"], ctx)
        diff = e - printed
        if diff:
            out.append({"field": key, "printed": entry["printed"], "derived": _r(e, ctx),
                        "difference": _r(diff, ctx), "note": entry.get("note", "")})
    return out


def schmidt_section(m, mode=None):
    mode = resolve_mode(m, mode)
    if mode == "odd":
        spec, res = odd_pipeline(m)
        ps = res.H_T
        return {
            "mode": "odd",
            "F": _r(res.F, ps.ctx),
            "L3": _r(res.L3, res.ctx),
            "momenta": _rmap(res.momenta.defs, res.ctx),
            "velocities": _rmap(res.velocities, ps.ctx),
            "primaries": [_r(p, ps.ctx) for p in res.primaries],
            "multipliers": list(ps.multipliers),
            "H_T": _r(ps.H, ps.ctx),
            "assumptions": [_r(a, ps.ctx) for a in res.assumptions],
        }
    spec, aux, res = even_pipeline(m)
    ps = res.phase
    section = {
        "mode": "even",
        "F": _r(aux.F),
        "L2": _r(res.L2, res.ctx),
        "momenta": _rmap(res.momenta.defs, res.ctx),
        "Z": _rmap(res.Z, ps.ctx),
        "H": _r(res.H, ps.ctx),
        "equations": [{"state": s, "rate": _r(r, ps.ctx)} for s, r in hamilton_equations(ps)],
        "legendre_identity": _r(legendre_identity(res)),
        "constraint_recovery": verify_constraint_recovery(spec, aux, res),
    }
    section["discrepancies"] = discrepancies(m, {"schmidt_H": (res.H, ps.ctx)})
    if is_nondegenerate(spec):
        _, ops, momenta = ostro_pipeline(m)
        section["discrepancies"] += discrepancies(m, {
            "ostrogradsky_H": (ops.H, ops.ctx),
        })
    return section


def dirac_section(m):
    spec, res = odd_pipeline(m)
    ps = res.H_T
    chain = dirac_chain(ps)
    ctx = ps.ctx
    solved_at = {k: st.index for st in chain.stages for k in st.multiplier_solutions}
    return {
        "status": chain.status,
        "constraints": [{"stage": st.index, "expr": _r(c, ctx)}
                        for st in chain.stages for c in st.constraints],
        "multiplier_solutions": [
            {"multiplier": k, "value": _r(v, ctx), "stage": solved_at.get(k),
             "assumptions": [_r(a, ctx) for a in chain.solution_assumptions.get(k, ())]}
            for k, v in chain.multiplier_solutions.items()],
        "residual_multipliers": list(chain.residual_multipliers),
        "assumptions": [_r(a, ctx) for a in chain.assumptions],
        "weak_rules": _rmap(chain.weak.rules, ctx),
        "complete": not any(completeness_residuals(ps, chain)),
        "sound": not any(soundness_residuals(ps, chain)),
        "reduced_H": _r(reduced_hamiltonian(ps, chain), ctx),
    }


def _certificate_json(cmap, ctx):
    cert = cmap.certificate
    return {
        "ok": cert.ok,
        "brackets": [{"u": u, "v": v, "value": _r(b, ctx)} for (u, v), b in cert.brackets.items()],
        "failures": [{"u": u, "v": v, "value": _r(b, ctx)} for u, v, b in cert.failures],
    }


def bridge_pipeline(m, mode=None):
    mode = resolve_mode(m, mode)
    if mode == "odd":
        spec, res = odd_pipeline(m)
        return mode, res.H_T, generating_map_odd(res.F, None, res.layout, res.H_T), None
    spec, aux, res = even_pipeline(m)
    cmap = generating_map_even(aux, res.Z, res.phase)
    return mode, res.phase, cmap, res


def bridge_section(m, mode=None):
    mode, ps, cmap, res = bridge_pipeline(m, mode)
    out = {
        "mode": mode,
        "source_pairs": [list(p) for p in cmap.source_pairs],
        "target_pairs": [list(p) for p in cmap.target_pairs],
        "rules": _rmap(cmap.rules, ps.ctx),
        "pi2_sign": cmap.pi2_sign,
        "assumptions": [_r(a, ps.ctx) for a in cmap.assumptions],
        "certificate": _certificate_json(cmap, ps.ctx),
    }
    if res is not None and is_nondegenerate(m.spec()):
        _, ops, _ = ostro_pipeline(m)
        out["transport_difference"] = _r(transport_hamiltonian(ops.H, cmap) - res.H, ps.ctx)
    return out


# ---------------------------------------------------------------------------
# numerics


def jet_reduction(spec):
    """First-order system ``(q, q', ..., q^(2k-1))`` for the Euler-Lagrange equations."""
    el = euler_lagrange(spec)
    k2 = el.order
    top = [jet_name(c, k2) for c in spec.coords]
    solved, residual = linear_solve(list(el.equations), top)
    if residual or len(solved) < len(top):
        raise DegenerateError("Euler-Lagrange equations cannot be solved for the top derivative")
    states = [jet_name(c, i) for c in spec.coords for i in range(k2)]
    rates = []
    for c in spec.coords:
        for i in range(k2):
            rate = Expr.var(jet_name(c, i + 1)) if i + 1 < k2 else solved[jet_name(c, k2)]
            rates.append((jet_name(c, i), rate))
    return states, rates


def simulate(m, dt=None, T=None, out=None):
    """Integrate the Schmidt, Ostrogradsky and jet-space flows from one initial state.

    The Schmidt initial state comes from the manifest; the other two are its
    images, so the three trajectories describe the same motion.
    """
    if m.simulation is None:
        raise ValidationError("manifest has no simulation block")
    dt = dt or m.simulation.dt
    T = T or m.simulation.T
    params = m.numeric_parameters()
    spec, aux, res = even_pipeline(m)
    _, ops, _ = ostro_pipeline(m)
    cmap = generating_map_even(aux, res.Z, res.phase)
    sch_rates = hamilton_equations(res.phase)
    sch = numlab.compile_rates(sch_rates, params)
    ost = numlab.compile_rates(hamilton_equations(ops), params)
    y0 = m.simulation.initial_state
    missing = set(sch.order) - set(y0)
    if missing:
        raise ValidationError(f"initial_state lacks {sorted(missing)}")
    y0 = {k: float(v) for k, v in y0.items()}
    to_ost = numlab.compile_exprs([cmap.rules[n] for n in ost.order], sch.order, params)
    # jets of the same motion: q, q' = Z, q'' = A, q''' = dA/dt
    rate = dict(sch_rates)
    layout = res.layout
    jet_exprs = {}
    for c, a in zip(layout.coords, layout.accels):
        jet_exprs[jet_name(c, 0)] = Expr.var(c)
        jet_exprs[jet_name(c, 1)] = res.Z[jet_name(c, 1)]
        jet_exprs[jet_name(c, 2)] = Expr.var(a)
        jet_exprs[jet_name(c, 3)] = rate[a]
    states, jrates = jet_reduction(spec)
    jet = numlab.compile_rates(jrates, params)
    to_jet = numlab.compile_exprs([jet_exprs[s] for s in states], sch.order, params)

    ts = numlab.rk4_integrate(sch, [y0[n] for n in sch.order], dt, T)
    to = numlab.rk4_integrate(ost, to_ost.evaluate(y0), dt, T)
    tj = numlab.rk4_integrate(jet, to_jet.evaluate(y0), dt, T)
    q_cols = [sch.order.index(c) for c in layout.coords]
    q_jet = [states.index(c) for c in layout.coords]
    q_error = float(abs(ts.states[:, q_cols] - tj.states[:, q_jet]).max())
    H_s = numlab.compile_exprs([res.H], sch.order, params)
    H_o = numlab.compile_exprs([ops.H], ost.order, params)
    result = {
        "dt": dt,
        "T": T,
        "rows": int(ts.states.shape[0]),
        "map_error": numlab.compare_under_map(ts, to_ost, to),
        "q_error_vs_jet_flow": q_error,
        "energy_drift": {"schmidt": numlab.energy_drift(H_s, ts),
                         "ostrogradsky": numlab.energy_drift(H_o, to)},
        "files": [],
    }
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        for label, traj in (("schmidt", ts), ("ostrogradsky", to), ("jet", tj)):
            result["files"].append(str(numlab.write_csv(traj, out / f"{m.name or 'run'}_{label}.csv")))
    return result, (ts, to, tj)
