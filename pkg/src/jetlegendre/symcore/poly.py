"""Exact multivariate rational functions.

A polynomial is a plain ``dict`` mapping a monomial to a nonzero ``mpq``
coefficient.  A monomial is a tuple of ``(name, exponent)`` pairs sorted by
name, so ``()`` is the constant monomial.  :class:`Expr` holds a numerator
and denominator polynomial; every public constructor returns the canonical
form described in :func:`normalize`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from gmpy2 import mpq
from sympy import QQ
from sympy.polys.rings import ring

from ..errors import SymbolicZeroDivision

ONE_MONO = ()
_ZERO = mpq(0)
_ONE = mpq(1)


def to_mpq(c):
    if isinstance(c, type(_ONE)):
        return c
    if isinstance(c, (int, Fraction, Rational)):
        return mpq(c)
    if isinstance(c, str):
        return mpq(Fraction(c))
    raise TypeError(f"cannot use {c!r} as an exact coefficient")


# ---------------------------------------------------------------------------
# monomials and polynomials


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for n, e in b:
        d[n] = d.get(n, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m):
    return sum(e for _, e in m)


def mono_key(m):
    return (mono_degree(m), m)


def p_const(c):
    c = to_mpq(c)
    return {ONE_MONO: c} if c else {}


def p_var(name):
    return {((name, 1),): _ONE}


def p_add(a, b, sign=1):
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, _ZERO) + (c if sign > 0 else -c)
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def p_scale(a, c):
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


def p_mul(a, b):
    if len(a) > len(b):
        a, b = b, a
    if not a:
        return {}
    if len(a) == 1 and ONE_MONO in a:
        return p_scale(b, a[ONE_MONO])
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(ma, mb)
            v = out.get(m, _ZERO) + ca * cb
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def p_pow(a, n):
    result = {ONE_MONO: _ONE}
    base = a
    while n:
        if n & 1:
            result = p_mul(result, base)
        n >>= 1
        if n:
            base = p_mul(base, base)
    return result


def p_diff(a, name):
    out = {}
    for m, c in a.items():
        for i, (n, e) in enumerate(m):
            if n == name:
                rest = m[:i] + ((n, e - 1),) + m[i + 1:] if e > 1 else m[:i] + m[i + 1:]
                out[rest] = out.get(rest, _ZERO) + c * e
                break
    return {m: c for m, c in out.items() if c}


def p_variables(a):
    return {n for m in a for n, _ in m}


def p_degree_in(a, name):
    return max((e for m in a for n, e in m if n == name), default=0)


def p_is_const(a):
    return not a or (len(a) == 1 and ONE_MONO in a)


def p_leading(a):
    return a[max(a, key=mono_key)]


def p_eval(a, values):
    total = _ZERO
    for m, c in a.items():
        t = c
        for n, e in m:
            t *= values[n] ** e
        total += t
    return total


def _common_mono(polys):
    """Largest monomial dividing every term of every polynomial."""
    mins = None
    for p in polys:
        for m in p:
            d = dict(m)
            if mins is None:
                mins = d
            else:
                mins = {n: min(e, d[n]) for n, e in mins.items() if n in d}
            if not mins:
                return {}
    return mins or {}


def _mono_div(m, d):
    out = []
    for n, e in m:
        e -= d.get(n, 0)
        if e:
            out.append((n, e))
    return tuple(out)


@lru_cache(maxsize=256)
def _ring(names):
    return ring(",".join(names), QQ)[0]


def _to_ring(p, R, index):
    k = len(index)
    d = {}
    for m, c in p.items():
        v = [0] * k
        for n, e in m:
            v[index[n]] = e
        d[tuple(v)] = c
    return R.from_dict(d)


def _from_ring(f, names):
    return {tuple((names[i], e) for i, e in enumerate(v) if e): mpq(c) for v, c in f.items()}


def p_cofactors(a, b):
    """Return ``(g, a/g, b/g)`` with ``g`` a greatest common divisor."""
    names = tuple(sorted(p_variables(a) | p_variables(b)))
    if not names:
        return p_const(1), a, b
    R = _ring(names)
    index = {n: i for i, n in enumerate(names)}
    g, ca, cb = _to_ring(a, R, index).cofactors(_to_ring(b, R, index))
    return _from_ring(g, names), _from_ring(ca, names), _from_ring(cb, names)


def normalize_pair(num, den):
    """Canonical ``(num, den)``: coprime, denominator monic in the internal order."""
    if not den:
        raise SymbolicZeroDivision("division by an expression that normalizes to zero")
    if not num:
        return {}, {ONE_MONO: _ONE}
    if len(den) == 1 and ONE_MONO in den:
        c = den[ONE_MONO]
        return (num if c == 1 else p_scale(num, 1 / c)), {ONE_MONO: _ONE}
    common = _common_mono((num, den))
    if common:
        num = {_mono_div(m, common): c for m, c in num.items()}
        den = {_mono_div(m, common): c for m, c in den.items()}
    if len(den) == 1:
        (m, c), = den.items()
        if c != 1:
            num = p_scale(num, 1 / c)
        return num, {m: _ONE}
    _, num, den = p_cofactors(num, den)
    lc = p_leading(den)
    if lc != 1:
        inv = 1 / lc
        num = p_scale(num, inv)
        den = p_scale(den, inv)
    return num, den


# ---------------------------------------------------------------------------
# rational functions


class Expr:
    """Immutable quotient of two polynomials with rational coefficients.

    Arithmetic accepts ``Expr``, ``int``, ``Fraction`` and ``mpq`` operands and
    always returns canonical results, so structural equality coincides with
    mathematical equality.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=None, den=None):
        num = {} if num is None else num
        den = {ONE_MONO: _ONE} if den is None else den
        self.num, self.den = normalize_pair(num, den)
        self._hash = None

    @classmethod
    def _canonical(cls, num, den=None):
        e = object.__new__(cls)
        e.num = num
        e.den = {ONE_MONO: _ONE} if den is None else den
        e._hash = None
        return e

    @classmethod
    def raw(cls, num, den):
        """Build an expression without normalizing (for testing canonicalization)."""
        if not den:
            raise SymbolicZeroDivision("zero denominator")
        return cls._canonical(dict(num), dict(den))

    @classmethod
    def const(cls, c):
        return cls._canonical(p_const(c))

    @classmethod
    def var(cls, name):
        return cls._canonical(p_var(name))

    @classmethod
    def coerce(cls, x):
        if isinstance(x, Expr):
            return x
        return cls.const(x)

    # predicates -----------------------------------------------------------

    def is_zero(self):
        return not normalize(self).num

    def is_polynomial(self):
        return p_is_const(self.den)

    def is_constant(self):
        return p_is_const(self.num) and p_is_const(self.den)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("expression is not constant")
        return self.num.get(ONE_MONO, _ZERO) / self.den.get(ONE_MONO, _ONE)

    def variables(self):
        return p_variables(self.num) | p_variables(self.den)

    def size(self):
        return len(self.num) + len(self.den)

    def numerator(self):
        return Expr._canonical(self.num)

    def denominator(self):
        return Expr._canonical(self.den)

    def degree_in(self, name):
        return p_degree_in(self.num, name)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if p_is_const(self.den):
                return Expr._canonical(p_add(self.num, other.num), self.den)
            return Expr(p_add(self.num, other.num), self.den)
        return Expr(p_add(p_mul(self.num, other.den), p_mul(other.num, self.den)),
                    p_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Expr._canonical({m: -c for m, c in self.num.items()}, self.den)

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return ZERO
        if p_is_const(self.den) and p_is_const(other.den):
            return Expr._canonical(p_mul(self.num, other.num))
        return Expr(p_mul(self.num, other.num), p_mul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise SymbolicZeroDivision("division by an expression that normalizes to zero")
        return Expr(self.den, self.num)

    def __truediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise SymbolicZeroDivision("division by an expression that normalizes to zero")
        if other.is_constant():
            return Expr._canonical(p_scale(self.num, 1 / other.constant_value()), self.den)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _lift(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return ONE
        if p_is_const(self.den):
            return Expr._canonical(p_pow(self.num, n))
        # powers of coprime polynomials stay coprime
        return Expr._canonical(p_pow(self.num, n), p_pow(self.den, n))

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        from .grammar import render

        return f"Expr({render(self)!r})"

    def __str__(self):
        from .grammar import render

        return render(self)

    # evaluation -----------------------------------------------------------

    def evaluate(self, values):
        """Exact value at a point given as ``{name: rational}``."""
        vals = {n: to_mpq(v) for n, v in values.items()}
        d = p_eval(self.den, vals)
        if not d:
            raise SymbolicZeroDivision("denominator vanishes at the evaluation point")
        return p_eval(self.num, vals) / d


def _lift(x):
    if isinstance(x, Expr):
        return x
    try:
        return Expr.const(x)
    except TypeError:
        return NotImplemented


def normalize(e: Expr) -> Expr:
    """Canonical form: coprime numerator and denominator, monic denominator.

    Expressions built through the public API are already canonical; this
    re-normalizes ones created with :meth:`Expr.raw`.
    """
    return Expr(e.num, e.den)


def is_zero(e: Expr) -> bool:
    return not normalize(e).num


ZERO = Expr._canonical({})
ONE = Expr._canonical({ONE_MONO: _ONE})
