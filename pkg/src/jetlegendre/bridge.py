"""Canonical maps between the Schmidt and Ostrogradsky phase spaces.

The map comes from equating ``P_Q dQ + P_A dA - pi^1 dq_1 - pi^2 dq_2`` with
``dF``.  The sign in front of ``pi^2`` is settled by checking the canonical
brackets: :func:`generating_map_even` and :func:`generating_map_odd` try
``+dF/dZ`` first and fall back to ``-dF/dZ``, recording the sign that passes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .canonical import poisson_bracket
from .errors import DegenerateError, SymbolicZeroDivision, ValidationError
from .ostro import PhaseSystem, chart_name, momentum_name
from .schmidt import AuxiliaryFunction, SchmidtLayout, momentum_of
from .symcore import (
    ONE,
    ZERO,
    Expr,
    det,
    jacobian,
    jet_name,
    linear_solve,
    partial,
    substitute,
)


@dataclass(frozen=True)
class Certificate:
    """Brackets ``{u, v}`` of the image coordinates computed in the source phase space."""

    ok: bool
    brackets: dict
    failures: tuple = ()


@dataclass(frozen=True)
class CanonicalMap:
    source_pairs: tuple
    target_pairs: tuple
    rules: dict
    assumptions: tuple = ()
    pi2_sign: int | None = None
    certificate: Certificate | None = None

    def __post_init__(self):
        missing = [n for pair in self.target_pairs for n in pair if n not in self.rules]
        if missing:
            raise ValidationError(f"map does not define {missing}")


def _expected(u, v, target_pairs):
    for x, p in target_pairs:
        if (u, v) == (x, p):
            return ONE
        if (u, v) == (p, x):
            return -ONE
    return ZERO


def verify_canonical(cmap: CanonicalMap, ps_source: PhaseSystem) -> Certificate:
    """Check ``{x_i, p_j} = delta_ij`` and ``{x_i, x_j} = {p_i, p_j} = 0`` exactly."""
    names = [n for pair in cmap.target_pairs for n in pair]
    brackets = {}
    failures = []
    for i, u in enumerate(names):
        for v in names[i + 1:]:
            b = poisson_bracket(cmap.rules[u], cmap.rules[v], ps_source)
            brackets[(u, v)] = b
            if b != _expected(u, v, cmap.target_pairs):
                failures.append((u, v, b))
    return Certificate(not failures, brackets, tuple(failures))


def transport_hamiltonian(H_target: Expr, cmap: CanonicalMap) -> Expr:
    """Pull ``H_target`` back to the source variables through ``cmap``."""
    for a in cmap.assumptions:
        if not a:
            raise SymbolicZeroDivision("map assumption normalizes to zero")
    return substitute(H_target, cmap.rules)


def _settle_sign(build, ps_source, pi2_sign):
    signs = (1, -1) if pi2_sign is None else (pi2_sign,)
    for s in signs:
        cmap = build(s)
        cert = verify_canonical(cmap, ps_source)
        if cert.ok or s == signs[-1]:
            return replace(cmap, pi2_sign=s, certificate=cert)


def ostrogradsky_pairs(coords, order):
    return tuple((chart_name(c, i), momentum_name(c, i, coords))
                 for c in coords for i in range(1, order + 1))


def generating_map_even(aux: AuxiliaryFunction, Z: dict, ps_source: PhaseSystem,
                        pi2_sign: int | None = None) -> CanonicalMap:
    """Schmidt ``(Q, A, P_Q, P_A)`` to Ostrogradsky ``(q_1, q_2, pi^1, pi^2)``.

    ``q_1 = Q``, ``q_2 = Z``, ``pi^1 = P_Q - dF/dQ`` and ``pi^2 = sign * dF/dZ``,
    all partials evaluated at ``Q' = Z``.
    """
    layout = aux.layout
    qv = [jet_name(c, 1) for c in layout.coords]
    if not Z or any(v not in Z for v in qv):
        raise ValidationError("the velocity solution Z is required")
    F = aux.F
    guard = det(jacobian([partial(F, a) for a in layout.accels], qv))
    if not guard:
        raise DegenerateError("det[d2F/dA dQdot] vanishes; the generating map degenerates")

    def build(sign):
        rules = {}
        for c, v in zip(layout.coords, qv):
            rules[chart_name(c, 1)] = Expr.var(c)
            rules[chart_name(c, 2)] = Z[v]
            rules[momentum_name(c, 1, layout.coords)] = substitute(
                Expr.var(momentum_of(c)) - partial(F, c), Z)
            rules[momentum_name(c, 2, layout.coords)] = sign * substitute(partial(F, v), Z)
        return CanonicalMap(ps_source.pairs, ostrogradsky_pairs(layout.coords, 2), rules, (guard,))

    return _settle_sign(build, ps_source, pi2_sign)


def solve_W(F: Expr, layout: SchmidtLayout):
    """``Q' = W(Q, A, r, P_r)`` from ``P_r = dF/dr``."""
    qv = [jet_name(c, 1) for c in layout.coords]
    eqs = [Expr.var(momentum_of(r)) - partial(F, r) for r in layout.auxes]
    W, residual = linear_solve(eqs, qv)
    if residual or len(W) < len(qv):
        raise DegenerateError("cannot solve P_r = dF/dr for the velocities")
    return W


def generating_map_odd(F: Expr, W: dict | None, layout: SchmidtLayout, ps_source: PhaseSystem,
                       pi2_sign: int | None = None) -> CanonicalMap:
    """Schmidt ``(Q, A, r; P)`` to Ostrogradsky ``(q_1, q_2, q_3; pi)``.

    ``q_1 = Q``, ``q_2 = W``, ``q_3 = A``, ``pi^1 = P_Q - dF/dQ``,
    ``pi^3 = P_A - dF/dA`` and ``pi^2 = sign * dF/dW``.
    """
    W = W or solve_W(F, layout)
    qv = [jet_name(c, 1) for c in layout.coords]

    def build(sign):
        rules = {}
        for c, a, v in zip(layout.coords, layout.accels, qv):
            rules[chart_name(c, 1)] = Expr.var(c)
            rules[chart_name(c, 2)] = W[v]
            rules[chart_name(c, 3)] = Expr.var(a)
            rules[momentum_name(c, 1, layout.coords)] = substitute(
                Expr.var(momentum_of(c)) - partial(F, c), W)
            rules[momentum_name(c, 2, layout.coords)] = sign * substitute(partial(F, v), W)
            rules[momentum_name(c, 3, layout.coords)] = substitute(
                Expr.var(momentum_of(a)) - partial(F, a), W)
        return CanonicalMap(ps_source.pairs, ostrogradsky_pairs(layout.coords, 3), rules)

    return _settle_sign(build, ps_source, pi2_sign)


def scaled_map(cmap: CanonicalMap, name: str, factor) -> CanonicalMap:
    """Copy of ``cmap`` with one image coordinate multiplied by ``factor`` (negative control)."""
    rules = dict(cmap.rules)
    rules[name] = rules[name] * factor
    return CanonicalMap(cmap.source_pairs, cmap.target_pairs, rules, cmap.assumptions, cmap.pi2_sign)


def identity_map(ps: PhaseSystem) -> CanonicalMap:
    rules = {n: Expr.var(n) for pair in ps.pairs for n in pair}
    return CanonicalMap(ps.pairs, ps.pairs, rules)


__all__ = [
    "CanonicalMap",
    "Certificate",
    "generating_map_even",
    "generating_map_odd",
    "identity_map",
    "scaled_map",
    "solve_W",
    "transport_hamiltonian",
    "verify_canonical",
]
