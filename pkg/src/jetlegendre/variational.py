"""Higher-order Lagrangians: Euler-Lagrange equations, Hessians, gauge lifts."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .symcore import (
    ZERO,
    Expr,
    ExprMatrix,
    VariableContext,
    jacobian,
    jet_name,
    matrix_rank,
    parse,
    partial,
    split_jet,
    total_time_derivative,
)


def jet_order(e: Expr, stems) -> int:
    """Highest derivative order of any coordinate in ``stems`` occurring in ``e``."""
    orders = [split_jet(n)[1] for n in e.variables() if split_jet(n)[0] in stems]
    return max(orders, default=0)


@dataclass(frozen=True)
class LagrangianSpec:
    """Lagrangian ``L(q, q', ..., q^(k))`` over the coordinate stems ``coords``."""

    ctx: VariableContext
    coords: tuple
    order: int
    L: Expr

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if self.order < 1:
            raise ValidationError("Lagrangian order must be at least 1")
        if not self.coords:
            raise ValidationError("at least one coordinate is required")
        for c in self.coords:
            v = self.ctx.get(c)
            if v is None or v.role != "base":
                raise ValidationError(f"coordinate {c!r} is not declared as a base coordinate")
        for n in self.L.variables():
            v = self.ctx.get(n)
            if v is None:
                raise ValidationError(f"Lagrangian uses undeclared variable {n!r}")
            if v.role == "jet" and v.stem not in self.coords:
                raise ValidationError(f"{n!r} is a jet of an undeclared coordinate")
        if jet_order(self.L, self.coords) > self.order:
            raise ValidationError(f"Lagrangian contains derivatives above order {self.order}")

    def with_order(self, order):
        ctx = self.ctx
        for c in self.coords:
            ctx = ctx.with_jet_order(c, order)
        return ctx

    @classmethod
    def from_text(cls, coords, order, lagrangian, parameters=()):
        ctx = VariableContext()
        for c in coords:
            ctx = ctx.declare_stem(c, order)
        for p in parameters:
            ctx = ctx.declare(p, "parameter")
        return cls(ctx, tuple(coords), order, parse(lagrangian, ctx))


@dataclass(frozen=True)
class ELSystem:
    """Equations ``equations[i] = 0``, one per coordinate, of order ``2k``."""

    equations: tuple
    order: int
    ctx: VariableContext


def _iterated_dt(e, times, ctx):
    for _ in range(times):
        e = total_time_derivative(e, ctx)
    return e


def euler_lagrange(spec: LagrangianSpec) -> ELSystem:
    """``sum_a (-1)^a (d/dt)^a dL/dq^(a)`` for each coordinate."""
    ctx = spec.with_order(2 * spec.order)
    eqs = []
    for c in spec.coords:
        total = ZERO
        for a in range(spec.order + 1):
            term = _iterated_dt(partial(spec.L, jet_name(c, a)), a, ctx)
            total = total + term if a % 2 == 0 else total - term
        eqs.append(total)
    return ELSystem(tuple(eqs), 2 * spec.order, ctx)


def highest_hessian(spec: LagrangianSpec) -> ExprMatrix:
    top = [jet_name(c, spec.order) for c in spec.coords]
    return jacobian([partial(spec.L, v) for v in top], top)


def is_nondegenerate(spec: LagrangianSpec) -> bool:
    return matrix_rank(highest_hessian(spec)) == len(spec.coords)


def gauge_lift(spec: LagrangianSpec, F: Expr) -> LagrangianSpec:
    """``L + dF/dt``; the order rises to one above the order of ``F`` when needed."""
    order = max(spec.order, jet_order(F, spec.coords) + 1)
    ctx = spec.with_order(order)
    return LagrangianSpec(ctx, spec.coords, order, spec.L + total_time_derivative(F, ctx))


def morse_rank_check(E: Expr, base_vars, fiber_vars) -> bool:
    """True when ``(d2E/dx dx | d2E/dx dr)`` has full row rank."""
    base = list(base_vars)
    if not base:
        return True
    grads = [partial(E, x) for x in base]
    block = jacobian(grads, base + list(fiber_vars))
    return matrix_rank(block) == len(base)
