"""Matrices over the rational-function field and affine system solving."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import NonlinearError, ValidationError
from .calculus import _name, partial, substitute
from .poly import ONE, ZERO, Expr


@dataclass(frozen=True)
class ExprMatrix:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(Expr.coerce(x) for x in r) for r in self.rows)
        if len({len(r) for r in rows}) > 1:
            raise ValidationError("matrix rows must have equal length")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, n):
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self):
        return ExprMatrix(tuple(zip(*self.rows)))

    def to_lists(self):
        return [list(r) for r in self.rows]


def jacobian(exprs, variables) -> ExprMatrix:
    """Entry ``(i, j)`` is ``d exprs[i] / d variables[j]``."""
    return ExprMatrix(tuple(tuple(partial(e, v) for v in variables) for e in exprs))


def _pick_pivot(rows, col, start):
    best = None
    for i in range(start, len(rows)):
        x = rows[i][col]
        if x and (best is None or x.size() < rows[best][col].size()):
            best = i
    return best


def _echelon(m):
    """Row-reduce in place; return pivot columns and the determinant factor."""
    rows = [list(r) for r in m]
    pivots = []
    sign = 1
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = _pick_pivot(rows, c, r)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            sign = -sign
        piv = rows[r][c]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                f = f / piv
                rows[i] = [a - f * b if b else a for a, b in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
    return rows, pivots, sign


def matrix_rank(m: ExprMatrix) -> int:
    """Generic rank over the field of rational functions."""
    if not m.rows:
        return 0
    return len(_echelon(m.rows)[1])


def det(m: ExprMatrix) -> Expr:
    n, k = m.shape
    if n != k:
        raise ValidationError(f"determinant of a non-square {n}x{k} matrix")
    if n == 0:
        return ONE
    rows, pivots, sign = _echelon(m.rows)
    if len(pivots) < n:
        return ZERO
    out = Expr.const(sign)
    for i in range(n):
        out = out * rows[i][i]
    return out


def is_symmetric(m: ExprMatrix):
    """Return ``(True, None)`` or ``(False, (i, j, m_ij - m_ji))`` for the first mismatch."""
    n, k = m.shape
    if n != k:
        return False, None
    for i in range(n):
        for j in range(i + 1, n):
            d = m[i, j] - m[j, i]
            if d:
                return False, (i, j, d)
    return True, None


def affine_coefficients(eq: Expr, unknowns):
    """Split ``eq`` as ``sum a_j u_j + b`` with ``a_j`` and ``b`` free of the unknowns."""
    names = [_name(u) for u in unknowns]
    present = eq.variables()
    coeffs = []
    for n in names:
        a = partial(eq, n) if n in present else ZERO
        bad = a.variables() & set(names)
        if bad:
            raise NonlinearError(f"unknown {n!r} occurs nonlinearly (coefficient involves {sorted(bad)})")
        coeffs.append(a)
    b = substitute(eq, {n: ZERO for n in names})
    return coeffs, b


def linear_solve(equations, unknowns):
    """Gauss-Jordan elimination for a system affine in ``unknowns``.

    Returns
    -------
    solved : dict
        Unknown name to its value; undetermined unknowns may appear on the
        right-hand sides.
    residual : list of Expr
        Unknown-free compatibility conditions (each must vanish).
    """
    names = [_name(u) for u in unknowns]
    rows = []
    for eq in equations:
        a, b = affine_coefficients(Expr.coerce(eq), names)
        rows.append(a + [b])
    n = len(names)
    pivots = []
    r = 0
    for c in range(n):
        p = _pick_pivot(rows, c, r)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv if x else x for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b if b else a for a, b in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
    solved = {}
    for i, c in pivots:
        value = -rows[i][n]
        for j in range(n):
            if j != c and rows[i][j]:
                value = value - rows[i][j] * Expr.var(names[j])
        solved[names[c]] = value
    residual = [rows[i][n] for i in range(r, len(rows)) if rows[i][n]]
    return solved, residual
