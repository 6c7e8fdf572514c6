"""Acceptance checks over the bundled examples.

Each ``check_*`` function returns a list of :class:`CheckResult`; the CLI
``verify`` command and the acceptance tests share them.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from . import report
from .bridge import generating_map_even, transport_hamiltonian, verify_canonical
from .canonical import dirac_chain, is_proportional, poisson_bracket, reduced_hamiltonian
from .manifest import fixture_path, load_fixture
from .numlab import finite_diff_check
from .ostro import PhaseSystem, hamilton_equations, pullback_residuals
from .randgen import random_point, random_poly, random_rational
from .schmidt import even_jet_rules, integrability_check, legendre_identity
from .symcore import Expr, VariableContext, jet_name, normalize, parse
from .variational import LagrangianSpec, euler_lagrange, gauge_lift

SEED = 20240611
CASES = 200


@dataclass
class CheckResult:
    id: str
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f": {self.detail}" if self.detail else ""
        return f"[{status}] {self.id} {self.name} ({self.seconds:.2f}s){extra}"


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def _golden(m, key):
    return m.expected[key]["value"]


def _same(e, text, ctx):
    return e == parse(text, ctx)


def _compare_map(derived: dict, golden: dict, ctx):
    bad = [k for k, text in golden.items() if k not in derived or not _same(derived[k], text, ctx)]
    return not bad, bad


# ---------------------------------------------------------------------------
# 1-4: symbolic goldens


def check_el():
    out = []
    for name in ("example1", "pais_uhlenbeck"):
        with _Timer() as t:
            m = load_fixture(name)
            el = euler_lagrange(m.spec())
            golden = _golden(m, "el")
            ok = len(golden) == len(el.equations) and all(
                _same(e, g, el.ctx) for e, g in zip(el.equations, golden))
        fast = t.seconds < 1.0
        detail = "equations differ" if not ok else "" if fast else f"runtime {t.seconds:.2f}s"
        out.append(CheckResult("1", f"Euler-Lagrange golden {name}", ok and fast, detail, t.seconds))
    return out


def check_schmidt_even():
    with _Timer() as t:
        m = load_fixture("pais_uhlenbeck")
        spec, aux, res = report.even_pipeline(m)
        ctx = res.ctx
        pctx = res.phase.ctx
        bad = []
        if not _same(aux.F, _golden(m, "schmidt_F"), ctx):
            bad.append("F")
        ok, which = _compare_map(res.momenta.defs, _golden(m, "schmidt_momenta"), ctx)
        bad += which
        if not _same(res.H, _golden(m, "schmidt_H"), pctx):
            bad.append("H")
        ok, which = _compare_map(dict(hamilton_equations(res.phase)), _golden(m, "schmidt_equations"), pctx)
        bad += [f"d{w}/dt" for w in which]
    passed = not bad and t.seconds < 1.0
    detail = f"mismatch in {bad}" if bad else ("" if passed else f"runtime {t.seconds:.2f}s")
    return [CheckResult("2", "Schmidt even-order golden (PU)", passed, detail, t.seconds)]


def check_ostrogradsky():
    with _Timer() as t:
        m = load_fixture("pais_uhlenbeck")
        spec, ps, momenta = report.ostro_pipeline(m)
        bad = []
        if not _same(ps.H, _golden(m, "ostrogradsky_H"), ps.ctx):
            bad.append("H")
        ok, which = _compare_map(momenta.defs, _golden(m, "ostrogradsky_momenta"), momenta.ctx)
        bad += which
        ok, which = _compare_map(dict(hamilton_equations(ps)), _golden(m, "ostrogradsky_equations"), ps.ctx)
        bad += [f"d{w}/dt" for w in which]
    passed = not bad and t.seconds < 1.0
    detail = f"mismatch in {bad}" if bad else ("" if passed else f"runtime {t.seconds:.2f}s")
    return [CheckResult("3", "Ostrogradsky golden (PU)", passed, detail, t.seconds)]


def check_canonical_map():
    with _Timer() as t:
        m = load_fixture("pais_uhlenbeck")
        spec, aux, res = report.even_pipeline(m)
        _, ops, _ = report.ostro_pipeline(m)
        cmap = generating_map_even(aux, res.Z, res.phase)
        cert = verify_canonical(cmap, res.phase)
        ok_rules, bad = _compare_map(cmap.rules, _golden(m, "canonical_map"), res.phase.ctx)
        diff = transport_hamiltonian(ops.H, cmap) - res.H
    out = [
        CheckResult("4", "canonical map brackets", cert.ok and ok_rules,
                    f"pi2 sign {cmap.pi2_sign}" if cert.ok and ok_rules
                    else f"failures {cert.failures} rules {bad}", t.seconds),
        CheckResult("4", "transported Ostrogradsky H equals Schmidt H", not diff,
                    "" if not diff else f"difference {diff}", t.seconds),
    ]
    return out


# ---------------------------------------------------------------------------
# 5: numerics


def check_numeric():
    m = load_fixture("pais_uhlenbeck")
    dt, T = m.simulation.dt, m.simulation.T
    with _Timer() as t:
        coarse, _ = report.simulate(m, dt, T)
        fine, _ = report.simulate(m, dt / 2, T)
    ratio = coarse["map_error"] / fine["map_error"] if fine["map_error"] else float("inf")
    drift = coarse["energy_drift"]
    return [
        CheckResult("5a", "Schmidt flow through the map vs Ostrogradsky flow <= 1e-6",
                    coarse["map_error"] <= 1e-6, f"max error {coarse['map_error']:.3e}", t.seconds),
        CheckResult("5b", "q vs first-order reduction of the fourth-order ODE <= 1e-6",
                    coarse["q_error_vs_jet_flow"] <= 1e-6,
                    f"max error {coarse['q_error_vs_jet_flow']:.3e}", t.seconds),
        CheckResult("5c", "energy drift <= 1e-7 on both sides",
                    drift["schmidt"] <= 1e-7 and drift["ostrogradsky"] <= 1e-7,
                    f"schmidt {drift['schmidt']:.3e}, ostrogradsky {drift['ostrogradsky']:.3e}", t.seconds),
        CheckResult("5d", "halving dt improves the map error by a factor in [8, 32]",
                    8 <= ratio <= 32,
                    f"ratio {ratio:.3g} ({coarse['map_error']:.3e} -> {fine['map_error']:.3e})", t.seconds),
        CheckResult("5e", "numeric cross-validation runtime < 5s", t.seconds < 5.0,
                    f"{t.seconds:.2f}s", t.seconds),
    ]


# ---------------------------------------------------------------------------
# 6-7: obstruction and constraint chains


def check_integrability_obstruction():
    from .cli import main

    with _Timer() as t:
        m = load_fixture("example3")
        rep = integrability_check(m.spec(), m.accelerations)
        w = _golden(m, "integrability_witness")
        ctx = m.layout(odd=False).lagrangian_context()
        i, j = w["i"], w["j"]
        witness_ok = (not rep and rep.witness[:2] == (i, j)
                      and _same(rep.matrix[i, j], w["m_ij"], ctx)
                      and _same(rep.matrix[j, i], w["m_ji"], ctx))
        code = main(["schmidt", "--manifest", str(fixture_path("example3")), "--mode", "even"],
                    stdout=_Null(), stderr=_Null())
    return [CheckResult("6", "integrability obstruction for example3 (exit code 3)",
                        witness_ok and code == 3, f"witness entries ({i}, {j}), exit {code}", t.seconds)]


class _Null:
    def write(self, s):
        return len(s)

    def flush(self):
        pass


def _match_stages(chain, golden_stages, ctx):
    """Golden stage ``k`` (0-based) must match chain stage ``k + 1`` up to constant factors."""
    problems = []
    for k, stage in enumerate(golden_stages, start=1):
        if k >= len(chain.stages):
            problems.append(f"stage {k} missing")
            continue
        st = chain.stages[k]
        wc = st.weak_before
        found = [wc.reduce(c) for c in st.constraints]
        for text in stage:
            g = wc.reduce(parse(text, ctx))
            if not any(is_proportional(f, g) for f in found):
                problems.append(f"stage {k}: {text}")
        if len(found) != len(stage):
            problems.append(f"stage {k}: {len(found)} constraints, expected {len(stage)}")
    return problems


def chain_check(name):
    with _Timer() as t:
        m = load_fixture(name)
        spec, res = report.odd_pipeline(m)
        ps = res.H_T
        chain = dirac_chain(ps)
        ctx = ps.ctx
        problems = []
        if not _same(ps.H, _golden(m, "H_T"), ctx):
            problems.append("H_T")
        golden_primaries = [parse(p, ctx) for p in _golden(m, "primaries")]
        if list(res.primaries) != golden_primaries:
            problems.append("primaries")
        problems += _match_stages(chain, _golden(m, "stages"), ctx)
        if "multipliers" in m.expected:
            ok, bad = _compare_map(chain.multiplier_solutions, _golden(m, "multipliers"), ctx)
            problems += [f"multiplier {b}" for b in bad]
        if "multiplier_stages" in m.expected:
            for k, names in _golden(m, "multiplier_stages").items():
                k = int(k)
                got = sorted(chain.stages[k].multiplier_solutions) if k < len(chain.stages) else []
                if got != sorted(names):
                    problems.append(f"stage {k} solves {got}, expected {names}")
        if "reduced_H" in m.expected:
            H = reduced_hamiltonian(ps, chain)
            if chain.weak.reduce(parse(_golden(m, "reduced_H"), ctx)) != H:
                problems.append("reduced H")
        if chain.status != "multiplier-determined":
            problems.append(f"status {chain.status}")
    passed = not problems and t.seconds < 2.0
    detail = "; ".join(problems) if problems else f"{len(chain.stages)} stages, {chain.status}"
    return CheckResult("7", f"Dirac chain golden {name}", passed, detail, t.seconds)


def check_chains():
    return [chain_check(n) for n in ("example3", "sarioglu_tekin", "clement")]


# ---------------------------------------------------------------------------
# 8: example 1 derived oracles


def check_example1():
    with _Timer() as t:
        m = load_fixture("example1")
        spec, aux, res = report.even_pipeline(m)
        legendre = legendre_identity(res)
        ctx = spec.with_order(4)
        residuals = pullback_residuals(res.phase, even_jet_rules(res), ctx)
        el = euler_lagrange(spec)
        reproduces = report._reproduces(residuals, el.equations)
        flagged = report.schmidt_section(m)["discrepancies"]
        flag_ok = any(d["field"] == "schmidt_H" for d in flagged)
    return [
        CheckResult("8", "example1 Legendre identity", not legendre, f"residual {legendre}", t.seconds),
        CheckResult("8", "example1 Hamilton equations reproduce the Euler-Lagrange equation",
                    reproduces, "", t.seconds),
        CheckResult("8", "example1 report flags the printed +p_q*p_a term", flag_ok,
                    "; ".join(f"{d['field']}: {d['difference']}" for d in flagged), t.seconds),
    ]


# ---------------------------------------------------------------------------
# 9: property suites


def bracket_system():
    ctx = VariableContext()
    for n in ("x", "y"):
        ctx = ctx.declare(n, "base")
    for n in ("x", "y"):
        ctx = ctx.declare(f"p_{n}", "momentum", n)
    return PhaseSystem(ctx, (("x", "p_x"), ("y", "p_y")), Expr.const(0))


def bracket_properties(cases=CASES, seed=SEED):
    rng = random.Random(seed)
    ps = bracket_system()
    names = ["x", "y", "p_x", "p_y"]
    failures = 0
    for _ in range(cases):
        f, g, h = (random_poly(rng, names, 3, 3) for _ in range(3))
        pb = lambda a, b: poisson_bracket(a, b, ps)  # noqa: E731
        if pb(f, g) + pb(g, f):
            failures += 1
        elif pb(f, g * h) != pb(f, g) * h + g * pb(f, h):
            failures += 1
        elif pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g)):
            failures += 1
    return failures


def gauge_properties(cases=CASES, seed=SEED):
    rng = random.Random(seed)
    failures = 0
    coords = ("q", "u")
    for _ in range(cases):
        k = rng.choice((1, 2))
        spec = LagrangianSpec.from_text(coords, k, "0")
        L = random_poly(rng, [jet_name(c, i) for c in coords for i in range(k + 1)], 4, 3)
        F = random_poly(rng, [jet_name(c, i) for c in coords for i in range(k)], 3, 3)
        spec = LagrangianSpec(spec.ctx, coords, k, L)
        lifted = gauge_lift(spec, F)
        a, b = euler_lagrange(lifted).equations, euler_lagrange(spec).equations
        if lifted.order != k or any(x - y for x, y in zip(a, b)):
            failures += 1
    return failures


def finite_difference_properties(cases=CASES, seed=SEED, h=1e-5, tol=1e-6):
    rng = random.Random(seed)
    names = ["x", "y", "z"]
    worst = 0.0
    for _ in range(cases):
        e = random_poly(rng, names, 4, 3)
        point = {n: float(v) for n, v in random_point(rng, names, 1).items()}
        worst = max(worst, finite_diff_check(e, rng.choice(names), point, h))
    return worst


def normalize_properties(cases=CASES, seed=SEED):
    rng = random.Random(seed)
    names = ["x", "y", "z"]
    failures = 0
    for _ in range(cases):
        e = random_rational(rng, names)
        c = random_poly(rng, names, 2, 2)
        if not c:
            c = Expr.const(3)
        raw = Expr.raw({m: v for m, v in (e.numerator() * c).num.items()},
                       {m: v for m, v in (e.denominator() * c * 2).num.items()})
        once = normalize(raw)
        if normalize(once) != once or once != e / 2:
            failures += 1
    return failures


def check_properties(cases=CASES):
    out = []
    total = 0.0
    suites = (
        ("Poisson bracket antisymmetry, Leibniz, Jacobi", bracket_properties, "failures"),
        ("gauge invariance of Euler-Lagrange at matched order", gauge_properties, "failures"),
        ("finite differences vs symbolic partials <= 1e-6", finite_difference_properties, "worst"),
        ("normalize idempotence", normalize_properties, "failures"),
    )
    for name, fn, kind in suites:
        with _Timer() as t:
            value = fn(cases)
        total += t.seconds
        if kind == "worst":
            out.append(CheckResult("9", name, value <= 1e-6, f"{cases} cases, worst {value:.2e}", t.seconds))
        else:
            out.append(CheckResult("9", name, value == 0, f"{cases} cases, {value} failures", t.seconds))
    out.append(CheckResult("9", "property suites runtime < 30s", total < 30.0, f"{total:.2f}s", total))
    return out


CHECKS = (
    check_el,
    check_schmidt_even,
    check_ostrogradsky,
    check_canonical_map,
    check_numeric,
    check_integrability_obstruction,
    check_chains,
    check_example1,
    check_properties,
)


def run_all():
    results = []
    for check in CHECKS:
        results.extend(check())
    return results
