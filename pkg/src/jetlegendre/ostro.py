"""Ostrogradsky-Legendre transformation and first-order phase systems."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DegenerateError, ValidationError
from .symcore import (
    ZERO,
    Expr,
    VariableContext,
    jet_name,
    linear_solve,
    partial,
    substitute,
    total_time_derivative,
)
from .variational import LagrangianSpec, is_nondegenerate


@dataclass(frozen=True)
class PhaseSystem:
    """Hamiltonian ``H`` on the phase space spanned by ``pairs``.

    ``pairs`` is a tuple of ``(coordinate, momentum)`` names; ``constraints``
    are expressions understood as ``~ 0`` and ``multipliers`` the symbols
    carried by ``H`` in front of the primary constraints.
    """

    ctx: VariableContext
    pairs: tuple
    H: Expr
    constraints: tuple = ()
    multipliers: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "multipliers", tuple(self.multipliers))
        for x, p in self.pairs:
            v = self.ctx.get(p)
            if v is None or v.role != "momentum" or v.conjugate != x:
                raise ValidationError(f"{p!r} is not declared as the momentum conjugate to {x!r}")
        allowed = {n for pair in self.pairs for n in pair} | set(self.multipliers)
        allowed |= set(self.ctx.names("parameter")) | set(self.ctx.names("auxiliary"))
        stray = self.H.variables() - allowed
        if stray:
            raise ValidationError(f"Hamiltonian depends on non-phase variables {sorted(stray)}")

    @property
    def coordinates(self):
        return [x for x, _ in self.pairs]

    @property
    def momenta(self):
        return [p for _, p in self.pairs]

    @property
    def state(self):
        """State vector order used by the integrators: coordinates, then momenta."""
        return self.coordinates + self.momenta


@dataclass(frozen=True)
class MomentumTable:
    """Momentum name to its defining expression in jet variables."""

    defs: dict = field(default_factory=dict)
    ctx: VariableContext | None = None

    def __getitem__(self, name):
        return self.defs[name]

    def items(self):
        return self.defs.items()


def chart_name(stem, i):
    return f"{stem}_{i}"


def momentum_name(stem, i, coords):
    return f"pi_{i}" if len(coords) == 1 else f"pi_{stem}_{i}"


def ostrogradsky_momenta(spec: LagrangianSpec) -> MomentumTable:
    """``pi^i = sum_{j=i..k} (-d/dt)^(j-i) dL/dq^(j)`` for every coordinate."""
    k = spec.order
    ctx = spec.with_order(2 * k)
    defs = {}
    for c in spec.coords:
        for i in range(1, k + 1):
            total = ZERO
            for j in range(i, k + 1):
                term = partial(spec.L, jet_name(c, j))
                for _ in range(j - i):
                    term = -total_time_derivative(term, ctx)
                total = total + term
            defs[momentum_name(c, i, spec.coords)] = total
    return MomentumTable(defs, ctx)


def ostrogradsky_context(spec: LagrangianSpec) -> VariableContext:
    ctx = VariableContext()
    for c in spec.coords:
        for i in range(1, spec.order + 1):
            ctx = ctx.declare(chart_name(c, i), "base")
    for c in spec.coords:
        for i in range(1, spec.order + 1):
            ctx = ctx.declare(momentum_name(c, i, spec.coords), "momentum", chart_name(c, i))
    for v in spec.ctx:
        if v.role in ("parameter", "auxiliary") and v.name not in ctx:
            ctx = ctx.declare(v.name, v.role)
    return ctx


def jet_to_chart(spec: LagrangianSpec):
    """Rules ``q^(r) -> q_{r+1}`` for ``r < k``."""
    return {jet_name(c, r): Expr.var(chart_name(c, r + 1))
            for c in spec.coords for r in range(spec.order)}


def chart_to_jet(spec: LagrangianSpec):
    return {chart_name(c, r + 1): Expr.var(jet_name(c, r))
            for c in spec.coords for r in range(spec.order)}


def ostrogradsky_hamiltonian(spec: LagrangianSpec) -> PhaseSystem:
    """Canonical Hamiltonian ``sum_i qdot_(i) pi^i - L`` on the Ostrogradsky chart.

    Raises
    ------
    DegenerateError
        If the highest-order Hessian is singular or ``q^(k)`` cannot be
        recovered from ``pi^k``.
    """
    k = spec.order
    if not is_nondegenerate(spec):
        raise DegenerateError("highest-order Hessian is degenerate; use the constrained route")
    ctx = ostrogradsky_context(spec)
    lower = jet_to_chart(spec)
    top = [jet_name(c, k) for c in spec.coords]
    eqs = [Expr.var(momentum_name(c, k, spec.coords)) - substitute(partial(spec.L, jet_name(c, k)), lower)
           for c in spec.coords]
    solved, residual = linear_solve(eqs, top)
    if residual or len(solved) < len(top):
        raise DegenerateError(f"cannot solve the top momentum relation for {top}")
    rules = dict(lower)
    rules.update(solved)
    H = -substitute(spec.L, rules)
    for c in spec.coords:
        for i in range(1, k + 1):
            rate = Expr.var(chart_name(c, i + 1)) if i < k else solved[jet_name(c, k)]
            H = H + rate * Expr.var(momentum_name(c, i, spec.coords))
    pairs = [(chart_name(c, i), momentum_name(c, i, spec.coords))
             for c in spec.coords for i in range(1, k + 1)]
    return PhaseSystem(ctx, pairs, H)


def hamilton_equations(ps: PhaseSystem):
    """``[(x, dH/dp), ..., (p, -dH/dx), ...]``: each entry is a state and its rate.

    Coordinates come first, in pair order, followed by the momenta.
    """
    if ps.constraints:
        raise ValidationError("constrained systems need the Dirac algorithm first")
    coords = [(x, partial(ps.H, p)) for x, p in ps.pairs]
    moms = [(p, -partial(ps.H, x)) for x, p in ps.pairs]
    return coords + moms


def energy_identity(ps: PhaseSystem) -> Expr:
    """``dH/dt`` along the Hamiltonian flow; zero for every autonomous system."""
    rates = dict(hamilton_equations(ps))
    total = ZERO
    for name, rate in rates.items():
        total = total + partial(ps.H, name) * rate
    return total


def pullback_residuals(ps: PhaseSystem, jet_rules, ctx):
    """Hamilton's equations evaluated on a jet-space curve.

    ``jet_rules`` expresses every phase variable through jets.  Each entry of
    the result is ``d/dt jet(x) - rate(jet)`` for a state ``x``.
    """
    out = []
    for name, rate in hamilton_equations(ps):
        lhs = total_time_derivative(jet_rules[name], ctx)
        out.append((name, lhs - substitute(rate, jet_rules)))
    return out


def ostrogradsky_jet_rules(spec: LagrangianSpec, momenta: MomentumTable):
    rules = chart_to_jet(spec)
    rules.update(momenta.defs)
    return rules
