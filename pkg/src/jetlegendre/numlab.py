"""Floating-point evaluation of symbolic expressions and fixed-step RK4 integration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EvaluationError, ValidationError
from .symcore import Expr, partial

# ---------------------------------------------------------------------------
# code generation


def _py_poly(p, slot):
    terms = []
    for mono, c in p.items():
        factors = [repr(float(c))]
        for n, e in mono:
            factors.append(slot[n] if e == 1 else f"{slot[n]}**{e}")
        terms.append("*".join(factors))
    return " + ".join(terms) if terms else "0.0"


def _py_expr(e: Expr, slot):
    num = _py_poly(e.num, slot)
    if e.is_polynomial():
        return num
    return f"({num}) / ({_py_poly(e.den, slot)})"


@dataclass(frozen=True)
class CompiledSystem:
    """Expressions compiled to one Python function of the state vector.

    Calling the system on a state returns a tuple with one float per
    expression.  ``source`` keeps the generated code for inspection.
    """

    order: tuple
    exprs: tuple
    params: dict = field(default_factory=dict)
    source: str = ""
    fn: object = None

    def __call__(self, state):
        try:
            return self.fn(*state)
        except ZeroDivisionError as exc:
            raise EvaluationError("denominator vanishes at the evaluation point") from exc

    def evaluate(self, values: dict):
        """Evaluate at a point given as ``{name: number}``."""
        return self([values[n] for n in self.order])


def compile_exprs(exprs, order, params=None) -> CompiledSystem:
    """Compile ``exprs`` into a function of the variables in ``order``.

    Parameters
    ----------
    exprs : sequence of Expr
    order : sequence of str
        State variable names, in argument order.
    params : dict, optional
        Numeric values bound to the remaining symbols.

    Raises
    ------
    ValidationError
        If some variable is neither in ``order`` nor in ``params``.
    """
    exprs = tuple(Expr.coerce(e) for e in exprs)
    order = tuple(order)
    params = dict(params or {})
    slot = {n: f"s{i}" for i, n in enumerate(order)}
    for i, n in enumerate(sorted(params)):
        if n not in slot:
            slot[n] = f"c{i}"
    unbound = set().union(*(e.variables() for e in exprs)) - slot.keys() if exprs else set()
    if unbound:
        raise ValidationError(f"unbound variables {sorted(unbound)}")
    args = ", ".join(slot[n] for n in order)
    body = ", ".join(_py_expr(e, slot) for e in exprs)
    src = f"def _f({args}):\n    return ({body}{',' if len(exprs) == 1 else ''})\n"
    scope = {slot[n]: float(v) for n, v in params.items() if n not in order}
    exec(compile(src, "<jetlegendre.numlab>", "exec"), scope)
    return CompiledSystem(order, exprs, params, src, scope["_f"])


def compile_rates(rates, params=None) -> CompiledSystem:
    """Compile ``[(state, rate), ...]`` as returned by ``hamilton_equations``."""
    names = [n for n, _ in rates]
    return compile_exprs([r for _, r in rates], names, params)


# ---------------------------------------------------------------------------
# integration


@dataclass(frozen=True)
class Trajectory:
    names: tuple
    times: np.ndarray
    states: np.ndarray
    dt: float
    T: float
    y0: tuple

    def column(self, name):
        return self.states[:, self.names.index(name)]


def grid_size(dt, T):
    return math.floor(T / dt + 1e-9) + 1


def rk4_integrate(cs: CompiledSystem, y0, dt: float, T: float) -> Trajectory:
    """Classical fixed-step RK4 on ``y' = cs(y)``; ``floor(T/dt) + 1`` grid points.

    Raises
    ------
    EvaluationError
        If a right-hand side cannot be evaluated; ``time`` holds the failing step start.
    """
    if not dt > 0 or not T >= dt:
        raise ValidationError("need dt > 0 and T >= dt")
    f = cs.fn
    y = tuple(float(v) for v in y0)
    if len(y) != len(cs.order):
        raise ValidationError(f"initial state has {len(y)} entries, system has {len(cs.order)}")
    n = grid_size(dt, T)
    out = np.empty((n, len(y)))
    out[0] = y
    h2, h6 = dt / 2, dt / 6
    for i in range(1, n):
        try:
            k1 = f(*y)
            k2 = f(*[a + h2 * b for a, b in zip(y, k1)])
            k3 = f(*[a + h2 * b for a, b in zip(y, k2)])
            k4 = f(*[a + dt * b for a, b in zip(y, k3)])
        except ZeroDivisionError as exc:
            t = (i - 1) * dt
            raise EvaluationError("right-hand side not evaluable", t) from exc
        y = tuple(a + h6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4))
        out[i] = y
    times = np.arange(n) * dt
    return Trajectory(cs.order, times, out, dt, T, tuple(float(v) for v in y0))


def map_trajectory(traj: Trajectory, cmap_compiled: CompiledSystem) -> np.ndarray:
    if tuple(cmap_compiled.order) != tuple(traj.names):
        raise ValidationError("compiled map must take the trajectory state as arguments")
    return np.array([cmap_compiled(row) for row in traj.states])


def compare_under_map(traj_src: Trajectory, cmap_compiled: CompiledSystem, traj_dst: Trajectory) -> float:
    """``max_t |map(src(t)) - dst(t)|_inf``.

    ``cmap_compiled`` evaluates the target variables, in ``traj_dst`` state
    order, from a source state.
    """
    if traj_src.states.shape[0] != traj_dst.states.shape[0] or not np.array_equal(
            traj_src.times, traj_dst.times):
        raise ValidationError("trajectories are on different time grids")
    mapped = map_trajectory(traj_src, cmap_compiled)
    if mapped.shape != traj_dst.states.shape:
        raise ValidationError("map image and target trajectory have different dimensions")
    return float(np.max(np.abs(mapped - traj_dst.states)))


def energy_drift(H_compiled: CompiledSystem, traj: Trajectory) -> float:
    """``max_t |H(t) - H(0)|`` along ``traj``."""
    values = np.array([H_compiled(row)[0] for row in traj.states])
    return float(np.max(np.abs(values - values[0])))


def finite_diff_check(e: Expr, v: str, point: dict, h: float = 1e-5) -> float:
    """Central difference against the symbolic partial.

    Returns ``|fd - d| / max(|d|, 1)``, which reads as an absolute error for
    derivatives below one in size.
    """
    order = sorted(point)
    cs = compile_exprs([e, partial(e, v)], order)
    base = [float(point[n]) for n in order]
    k = order.index(v)
    hi, lo = list(base), list(base)
    hi[k] += h
    lo[k] -= h
    fd = (cs(hi)[0] - cs(lo)[0]) / (2 * h)
    d = cs(base)[1]
    return abs(fd - d) / max(abs(d), 1.0)


def write_csv(traj: Trajectory, path) -> Path:
    """Header ``t,<names>``; 17 significant digits."""
    path = Path(path)
    data = np.column_stack([traj.times, traj.states])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(("t",) + tuple(traj.names)),
               comments="")
    return path


def read_csv(path):
    with open(path) as fh:
        names = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return names, data
