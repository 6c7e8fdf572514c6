"""Schmidt-Legendre transformation on acceleration-bundle coordinates.

Coordinates ``Q`` keep the stems of the source Lagrangian; the acceleration
``A`` standing for ``Q''`` gets its own stem (``a`` for a single coordinate,
``a_<stem>`` otherwise) and odd-order auxiliary variables ``r`` likewise
(``r`` or ``r_<stem>``).  Momenta are named ``p_<variable>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    ConditionError,
    DegenerateError,
    IntegrabilityError,
    ValidationError,
)
from .ostro import MomentumTable, PhaseSystem
from .symcore import (
    ZERO,
    Expr,
    ExprMatrix,
    VariableContext,
    antiderivative,
    det,
    is_symmetric,
    jacobian,
    jet_name,
    linear_solve,
    matrix_rank,
    parse,
    partial,
    substitute,
    total_time_derivative,
)
from .variational import LagrangianSpec, jet_order


def momentum_of(name):
    return f"p_{name}"


def multiplier_of(name):
    return f"lam_{name}"


def default_names(prefix, coords):
    return [prefix] if len(coords) == 1 else [f"{prefix}_{c}" for c in coords]


@dataclass(frozen=True)
class SchmidtLayout:
    """Names used on the acceleration bundle: coordinates, accelerations, auxiliaries."""

    coords: tuple
    accels: tuple
    auxes: tuple = ()
    parameters: tuple = ()

    def __post_init__(self):
        for f in ("coords", "accels", "auxes", "parameters"):
            object.__setattr__(self, f, tuple(getattr(self, f)))
        if len(self.accels) != len(self.coords):
            raise ValidationError("one acceleration name per coordinate is required")
        names = self.coords + self.accels + self.auxes + self.parameters
        if len(set(names)) != len(names):
            raise ValidationError(f"clashing variable names in {names}")

    @classmethod
    def for_spec(cls, spec: LagrangianSpec, accels=None, auxes=None, odd=False):
        accels = accels or default_names("a", spec.coords)
        if odd:
            auxes = auxes or default_names("r", spec.coords)
        return cls(spec.coords, accels, auxes or (), tuple(spec.ctx.names("parameter")))

    @property
    def configuration(self):
        return self.coords + self.accels + self.auxes

    def lagrangian_context(self, order=2):
        ctx = VariableContext()
        for n in self.configuration:
            ctx = ctx.declare_stem(n, order)
        for p in self.parameters:
            ctx = ctx.declare(p, "parameter")
        return ctx

    def function_context(self):
        """Context for auxiliary functions ``F(Q, Q', A, r)``."""
        ctx = VariableContext()
        for c in self.coords:
            ctx = ctx.declare_stem(c, 1)
        for n in self.accels + self.auxes:
            ctx = ctx.declare(n, "base")
        for p in self.parameters:
            ctx = ctx.declare(p, "parameter")
        return ctx

    def phase_context(self, multipliers=()):
        ctx = VariableContext()
        for n in self.coords + self.accels:
            ctx = ctx.declare(n, "base")
        for n in self.auxes:
            ctx = ctx.declare(n, "auxiliary")
        for n in self.configuration:
            ctx = ctx.declare(momentum_of(n), "momentum", n)
        for p in self.parameters:
            ctx = ctx.declare(p, "parameter")
        for m in multipliers:
            ctx = ctx.declare(m, "multiplier")
        return ctx

    @property
    def pairs(self):
        return tuple((n, momentum_of(n)) for n in self.configuration)

    def velocities(self, names):
        return [jet_name(n, 1) for n in names]

    def jet_to_acceleration(self):
        """``q'' -> a`` and ``q''' -> a'``."""
        rules = {}
        for c, a in zip(self.coords, self.accels):
            rules[jet_name(c, 2)] = Expr.var(a)
            rules[jet_name(c, 3)] = Expr.var(jet_name(a, 1))
        return rules


@dataclass(frozen=True)
class AuxiliaryFunction:
    F: Expr
    mode: str
    layout: SchmidtLayout


@dataclass(frozen=True)
class IntegrabilityReport:
    """Symmetry test of ``[d(-dL/dA_i)/dQ'_j]``; ``witness`` is ``(i, j, m_ij - m_ji)``."""

    symmetric: bool
    matrix: ExprMatrix
    witness: tuple | None = None

    def __bool__(self):
        return self.symmetric


@dataclass(frozen=True)
class SchmidtEvenResult:
    aux: AuxiliaryFunction
    L2: Expr
    momenta: MomentumTable
    Z: dict
    H: Expr
    phase: PhaseSystem
    ctx: VariableContext

    @property
    def layout(self):
        return self.aux.layout


@dataclass(frozen=True)
class SchmidtOddResult:
    F: Expr
    L3: Expr
    momenta: MomentumTable
    velocities: dict
    primaries: tuple
    H_T: PhaseSystem
    layout: SchmidtLayout
    ctx: VariableContext
    assumptions: tuple = field(default_factory=tuple)


def _on_acceleration_bundle(spec, layout):
    return substitute(spec.L, layout.jet_to_acceleration())


def integrability_check(spec: LagrangianSpec, accels=None) -> IntegrabilityReport:
    """Symmetry of ``[d2L/dA dQ']``, the condition for an auxiliary ``F`` to exist."""
    if spec.order != 2:
        raise ValidationError("the integrability condition applies to second-order Lagrangians")
    layout = SchmidtLayout.for_spec(spec, accels)
    L = _on_acceleration_bundle(spec, layout)
    g = [-partial(L, a) for a in layout.accels]
    m = jacobian(g, layout.velocities(layout.coords))
    ok, witness = is_symmetric(m)
    return IntegrabilityReport(ok, m, witness)


def solve_auxiliary_even(spec: LagrangianSpec, accels=None) -> AuxiliaryFunction:
    """``F`` with ``dF/dQ'_i = -dL/dA_i``, integrated along coordinate axes, ``W = 0``.

    Raises
    ------
    IntegrabilityError
        When ``[d2L/dA dQ']`` is not symmetric.
    NotPolynomialError
        When ``-dL/dA`` is not polynomial in the velocities.
    """
    report = integrability_check(spec, accels)
    layout = SchmidtLayout.for_spec(spec, accels)
    if not report:
        i, j, d = report.witness
        raise IntegrabilityError(
            f"integrability obstruction: [d2L/dA dQdot] not symmetric at ({i},{j})", report.witness)
    L = _on_acceleration_bundle(spec, layout)
    vel = layout.velocities(layout.coords)
    g = [-partial(L, a) for a in layout.accels]
    F = ZERO
    for i, v in enumerate(vel):
        on_axis = substitute(g[i], {w: ZERO for w in vel[i + 1:]})
        F = F + antiderivative(on_axis, v)
    for i, v in enumerate(vel):
        if partial(F, v) != g[i]:
            raise IntegrabilityError(f"auxiliary function check failed for {v!r}", (i, i, partial(F, v) - g[i]))
    return AuxiliaryFunction(F, "even", layout)


def _lift_terms(F, layout, with_r):
    """``dF/dQ . Q' + dF/dQ' . A + dF/dA . A' (+ dF/dr . r')``."""
    total = ZERO
    for c, a in zip(layout.coords, layout.accels):
        total = total + partial(F, c) * Expr.var(jet_name(c, 1))
        total = total + partial(F, jet_name(c, 1)) * Expr.var(a)
        total = total + partial(F, a) * Expr.var(jet_name(a, 1))
    if with_r:
        for r in layout.auxes:
            total = total + partial(F, r) * Expr.var(jet_name(r, 1))
    return total


def schmidt_even(spec: LagrangianSpec, aux: AuxiliaryFunction) -> SchmidtEvenResult:
    """First-order Lagrangian ``L2``, momenta, ``Q' = Z(Q, A, P_A)`` and the Hamiltonian.

    Raises
    ------
    DegenerateError
        If ``[d2F/dA dQ']`` is singular, so that ``Q'`` cannot be solved.
    """
    if spec.order != 2:
        raise ValidationError("even-order Schmidt route needs a second-order Lagrangian")
    layout = aux.layout
    F = aux.F
    ctx = layout.lagrangian_context()
    L = _on_acceleration_bundle(spec, layout)
    L2 = L + _lift_terms(F, layout, with_r=False)
    qv = layout.velocities(layout.coords)
    av = layout.velocities(layout.accels)
    defs = {}
    for c, v in zip(layout.coords, qv):
        defs[momentum_of(c)] = partial(L2, v)
    for a, v in zip(layout.accels, av):
        defs[momentum_of(a)] = partial(L2, v)
    mixed = jacobian([partial(F, a) for a in layout.accels], qv)
    if matrix_rank(mixed) < len(qv):
        raise DegenerateError("[d2F/dA dQdot] is singular; cannot solve the velocities")
    eqs = [Expr.var(momentum_of(a)) - partial(F, a) for a in layout.accels]
    Z, residual = linear_solve(eqs, qv)
    if residual or len(Z) < len(qv):
        raise DegenerateError("velocity solve for Q' left unsolved components")
    H = ZERO
    for c, v in zip(layout.coords, qv):
        H = H + Expr.var(momentum_of(c)) * Z[v]
        H = H - partial(F, c) * Z[v]
    for a, v in zip(layout.accels, qv):
        H = H - partial(F, v) * Expr.var(a)
    H = substitute(H - L, Z)
    phase = PhaseSystem(layout.phase_context(), layout.pairs[: 2 * len(layout.coords)], H)
    return SchmidtEvenResult(aux, L2, MomentumTable(defs, ctx), Z, H, phase, ctx)


def legendre_identity(result: SchmidtEvenResult) -> Expr:
    """``H - (P_Q . Q' + P_A . A' - L2)`` with ``Q' = Z``; identically zero."""
    layout = result.layout
    E = -result.L2
    for n in layout.coords + layout.accels:
        E = E + Expr.var(momentum_of(n)) * Expr.var(jet_name(n, 1))
    return result.H - substitute(E, result.Z)


def verify_constraint_recovery(spec: LagrangianSpec, aux: AuxiliaryFunction,
                               result: SchmidtEvenResult | None = None) -> bool:
    """Check ``EL_A(L2) = [d2F/dA dQ'] . (A - Q'')`` for every acceleration component."""
    layout = aux.layout
    ctx = layout.lagrangian_context(3)
    L2 = result.L2 if result is not None else (
        _on_acceleration_bundle(spec, layout) + _lift_terms(aux.F, layout, with_r=False))
    qv = layout.velocities(layout.coords)
    for a in layout.accels:
        el = partial(L2, a) - total_time_derivative(partial(L2, jet_name(a, 1)), ctx)
        expected = ZERO
        for c, v in zip(layout.coords, qv):
            m = partial(partial(aux.F, a), v)
            expected = expected + m * (Expr.var(a) - Expr.var(jet_name(c, 2)))
        if el != expected:
            return False
    return True


def even_jet_rules(result: SchmidtEvenResult):
    """Phase variables of the Schmidt picture written on the jet curve ``q(t)``."""
    layout = result.layout
    to_jets = {}
    for c, a in zip(layout.coords, layout.accels):
        to_jets[a] = Expr.var(jet_name(c, 2))
        to_jets[jet_name(a, 1)] = Expr.var(jet_name(c, 3))
    rules = {c: Expr.var(c) for c in layout.coords}
    rules.update({a: to_jets[a] for a in layout.accels})
    for name, d in result.momenta.items():
        rules[name] = substitute(d, to_jets)
    return rules


def check_cond2(F: Expr, layout: SchmidtLayout):
    """Return ``det[d2F/dQ' dr]``; raise :class:`ConditionError` when it vanishes."""
    if len(layout.auxes) != len(layout.coords):
        raise ConditionError("[d2F/dQdot dr] must be square: one auxiliary per coordinate")
    m = jacobian([partial(F, v) for v in layout.velocities(layout.coords)], layout.auxes)
    d = det(m)
    if not d:
        raise ConditionError("auxiliary function violates det[d2F/dQdot dr] != 0")
    return d


def parse_auxiliary(text: str, layout: SchmidtLayout) -> Expr:
    return parse(text, layout.function_context())


def schmidt_odd(spec: LagrangianSpec, F: Expr, layout: SchmidtLayout | None = None) -> SchmidtOddResult:
    """Morse-family Lagrangian ``L3``, momenta and the total Hamiltonian.

    The velocities are eliminated by :func:`linear_solve`; momentum relations
    left free of velocities are the primary constraints, each paired with a
    multiplier in ``H_T``.
    """
    if spec.order not in (2, 3):
        raise ValidationError("odd-order Schmidt route supports Lagrangians of order 2 or 3")
    layout = layout or SchmidtLayout.for_spec(spec, odd=True)
    if jet_order(F, layout.coords) > 1 or any(jet_name(n, 1) in F.variables()
                                               for n in layout.accels + layout.auxes):
        raise ValidationError("auxiliary function must depend on (Q, Q', A, r) only")
    check_cond2(F, layout)
    ctx = layout.lagrangian_context()
    L = _on_acceleration_bundle(spec, layout)
    L3 = L + _lift_terms(F, layout, with_r=True)
    names = layout.configuration
    vel = layout.velocities(names)
    defs = {momentum_of(n): partial(L3, v) for n, v in zip(names, vel)}
    eqs = [Expr.var(p) - d for p, d in defs.items()]
    solved, residual = linear_solve(eqs, vel)
    primaries = tuple(residual)
    free = [v for v in vel if v not in solved]

    H = -L3
    for n, v in zip(names, vel):
        H = H + Expr.var(momentum_of(n)) * Expr.var(v)
    H = substitute(H, solved)
    # what multiplies an undetermined velocity must vanish on the primaries
    if free:
        on_shell, leftover = linear_solve(primaries, [momentum_of(n) for n in names])
        for v in free:
            coeff = partial(H, v)
            if substitute(coeff, on_shell):
                raise DegenerateError(f"velocity {v!r} is neither solvable nor pure gauge")
        H = substitute(H, {v: ZERO for v in free})

    mults = []
    for i, phi in enumerate(primaries):
        target = _single_momentum(phi, names)
        mults.append(multiplier_of(target) if target else f"lam_{i + 1}")
    H_T = H
    for lam, phi in zip(mults, primaries):
        H_T = H_T + Expr.var(lam) * phi
    assumptions = tuple(sorted({v.denominator() for v in solved.values() if not v.is_polynomial()},
                               key=str))
    phase = PhaseSystem(layout.phase_context(mults), layout.pairs, H_T, primaries, mults)
    return SchmidtOddResult(F, L3, MomentumTable(defs, ctx), solved, primaries, phase, layout, ctx,
                            assumptions)


def _single_momentum(phi: Expr, names):
    """Name ``n`` when ``phi`` is a constant multiple of ``p_n``."""
    for n in names:
        p = Expr.var(momentum_of(n))
        if (phi / p).is_constant():
            return n
    return None
