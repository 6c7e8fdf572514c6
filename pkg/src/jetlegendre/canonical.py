"""Poisson brackets, weak equality, and the Dirac-Bergmann consistency algorithm."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import CyclicRuleError, StageLimitError
from .ostro import PhaseSystem
from .symcore import (
    ZERO,
    Expr,
    linear_solve,
    partial,
    substitute,
)

MAX_STAGES = 10


def poisson_bracket(f: Expr, g: Expr, ps: PhaseSystem) -> Expr:
    """``sum_pairs df/dx dg/dp - df/dp dg/dx``; multipliers count as constants."""
    fv, gv = f.variables(), g.variables()
    total = ZERO
    for x, p in ps.pairs:
        if x in fv and p in gv:
            total = total + partial(f, x) * partial(g, p)
        if p in fv and x in gv:
            total = total - partial(f, p) * partial(g, x)
    return total


def is_proportional(a: Expr, b: Expr) -> bool:
    """True when ``a = c * b`` for a nonzero rational constant ``c``."""
    if not a or not b:
        return not a and not b
    return (a / b).is_constant()


# ---------------------------------------------------------------------------
# weak equality


@dataclass(frozen=True)
class WeakContext:
    """Constraints turned into substitution rules, kept triangular.

    ``rules`` map a variable to an expression free of every rule variable, so a
    single simultaneous substitution reduces any expression.  Constraints that
    could not be solved for a single variable stay in ``unsolved``.
    """

    ctx: object = None
    rules: dict = field(default_factory=dict)
    unsolved: tuple = ()
    sources: tuple = ()
    assumptions: tuple = ()

    def reduce(self, e: Expr) -> Expr:
        return weak_reduce(e, self)

    def _rank(self, name, coeff):
        var = self.ctx.get(name) if self.ctx is not None else None
        role = var.role if var else None
        if role in ("multiplier", "parameter"):
            return None
        order = self.ctx.sort_key(name) if self.ctx is not None else (0, name, 0)
        if role == "auxiliary":
            return (0, 0, order)
        if role == "momentum" and self.ctx.role(var.conjugate) == "auxiliary":
            return (1, 0, order)
        if coeff.is_constant():
            return (2, 0 if role == "momentum" else 1, order)
        return (3, coeff.size(), order)

    def add(self, constraint: Expr):
        """Return ``(new_context, reduced)``; ``reduced`` is zero when redundant."""
        c = self.reduce(constraint)
        if not c:
            return self, c
        c = c.numerator()
        best = None
        for name in c.variables():
            coeff = partial(c, name)
            if name in coeff.variables() or not coeff:
                continue
            rank = self._rank(name, coeff)
            if rank is not None and (best is None or rank < best[0]):
                best = (rank, name, coeff)
        sources = self.sources + (constraint,)
        if best is None:
            return replace(self, unsolved=self.unsolved + (c,), sources=sources), c
        _, name, coeff = best
        value = -substitute(c, {name: ZERO}) / coeff
        rules = {k: substitute(v, {name: value}) for k, v in self.rules.items()}
        rules[name] = value
        assumptions = self.assumptions
        if not coeff.is_constant():
            assumptions = assumptions + (coeff,)
        unsolved = tuple(u for u in (substitute(x, {name: value}) for x in self.unsolved) if u)
        return WeakContext(self.ctx, rules, unsolved, sources, assumptions), c


def weak_reduce(e: Expr, wc: WeakContext) -> Expr:
    """Substitute the solved rules until no rule variable remains."""
    if not wc.rules:
        return e
    for _ in range(len(wc.rules) + 1):
        hit = e.variables() & wc.rules.keys()
        if not hit:
            return e
        e = substitute(e, {k: wc.rules[k] for k in hit})
    raise CyclicRuleError(f"substitution rules do not terminate on {sorted(hit)}")


# ---------------------------------------------------------------------------
# constraint chains


@dataclass(frozen=True)
class ConstraintStage:
    index: int
    constraints: tuple
    multiplier_solutions: dict
    weak_before: WeakContext


@dataclass(frozen=True)
class ConstraintChain:
    stages: tuple
    multiplier_solutions: dict
    residual_multipliers: tuple
    status: str
    weak: WeakContext
    assumptions: tuple = ()
    solution_assumptions: dict = field(default_factory=dict)

    @property
    def constraints(self):
        return [c for s in self.stages for c in s.constraints]


def _denominators(e: Expr):
    return [] if e.is_polynomial() else [e.denominator()]


def _consistency(phi, ps, solutions, wc):
    b = poisson_bracket(phi, ps.H, ps)
    if solutions:
        b = substitute(b, solutions)
    return wc.reduce(b)


def dirac_chain(ps: PhaseSystem, max_stages: int = MAX_STAGES) -> ConstraintChain:
    """Iterate ``{phi, H_T} ~ 0`` until no new constraint or multiplier equation appears.

    Stage 0 holds the primaries.  Each later stage holds the new constraints
    produced by the previous one, together with the multipliers it fixed.

    Raises
    ------
    StageLimitError
        When more than ``max_stages`` stages are needed.
    NonlinearError
        When a multiplier enters a consistency condition nonlinearly.
    """
    multipliers = list(ps.multipliers)
    wc = WeakContext(ps.ctx)
    primaries = []
    for phi in ps.constraints:
        wc, c = wc.add(phi)
        primaries.append(phi)
    stages = [ConstraintStage(0, tuple(primaries), {}, WeakContext(ps.ctx))]
    solutions = {}
    assumptions = list(wc.assumptions)
    status = "closed"
    active = list(primaries)
    while active:
        if len(stages) > max_stages:
            raise StageLimitError(f"constraint algorithm did not close within {max_stages} stages")
        before = wc
        free = [m for m in multipliers if m not in solutions]
        new, equations = [], []
        for phi in active:
            b = _consistency(phi, ps, solutions, wc)
            if not b:
                continue
            if b.variables() & set(free):
                equations.append(b)
            else:
                new.append(b)
        found = {}
        if equations:
            found, residual = linear_solve(equations, free)
            for m in list(solutions):
                solutions[m] = wc.reduce(substitute(solutions[m], found))
            solutions.update(found)
            new.extend(residual)
        added = []
        for c in new:
            for d in _denominators(c):
                assumptions.append(d)
            c = c.numerator() if not c.is_constant() else c
            if c.is_constant():
                if c:
                    status = "inconsistent"
                    added.append(c)
                continue
            wc, reduced = wc.add(c)
            if reduced:
                if reduced.is_constant():
                    status = "inconsistent"
                added.append(c)
        stages.append(ConstraintStage(len(stages), tuple(added), dict(found), before))
        if status == "inconsistent":
            break
        active = added
    # drop the trailing stage when it recorded nothing
    while len(stages) > 1 and not stages[-1].constraints and not stages[-1].multiplier_solutions:
        stages.pop()
    solutions = {m: wc.reduce(v) for m, v in solutions.items()}
    residual_mults = tuple(m for m in multipliers if m not in solutions)
    if status != "inconsistent":
        status = "multiplier-determined" if multipliers and not residual_mults else "closed"
    assumptions.extend(wc.assumptions)
    per_solution = {m: tuple(_denominators(v)) for m, v in solutions.items()}
    for v in solutions.values():
        assumptions.extend(_denominators(v))
    unique = []
    for a in assumptions:
        if not any(is_proportional(a, u) for u in unique):
            unique.append(a)
    return ConstraintChain(tuple(stages), solutions, residual_mults, status, wc,
                           tuple(unique), per_solution)


def completeness_residuals(ps: PhaseSystem, chain: ConstraintChain):
    """One more consistency pass over every constraint; all entries vanish for a finished chain."""
    out = []
    for c in chain.constraints:
        out.append(_consistency(c, ps, chain.multiplier_solutions, chain.weak))
    return out


def soundness_residuals(ps: PhaseSystem, chain: ConstraintChain):
    """Source consistency equations of the stages that fixed multipliers, with solutions inserted."""
    out = []
    for k, stage in enumerate(chain.stages):
        if not stage.multiplier_solutions:
            continue
        for phi in chain.stages[k - 1].constraints:
            out.append(_consistency(phi, ps, chain.multiplier_solutions, chain.weak))
    return out


def reduced_hamiltonian(ps: PhaseSystem, chain: ConstraintChain) -> Expr:
    """``H_T`` with the multiplier solutions and every solved constraint rule inserted."""
    H = substitute(ps.H, chain.multiplier_solutions) if chain.multiplier_solutions else ps.H
    return chain.weak.reduce(H)


def constrained_rates(ps: PhaseSystem, chain: ConstraintChain):
    """Hamilton's equations of ``H_T`` with the multipliers fixed by the chain."""
    rates = []
    for x, p in ps.pairs:
        rates.append((x, substitute(partial(ps.H, p), chain.multiplier_solutions)))
    for x, p in ps.pairs:
        rates.append((p, substitute(-partial(ps.H, x), chain.multiplier_solutions)))
    return rates


__all__ = [
    "ConstraintChain",
    "ConstraintStage",
    "WeakContext",
    "completeness_residuals",
    "constrained_rates",
    "dirac_chain",
    "is_proportional",
    "poisson_bracket",
    "reduced_hamiltonian",
    "soundness_residuals",
    "weak_reduce",
]
