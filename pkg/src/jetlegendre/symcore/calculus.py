"""Differentiation, substitution and polynomial antiderivatives."""

from __future__ import annotations

from ..errors import NotPolynomialError
from .poly import (
    ONE_MONO,
    Expr,
    _ONE,
    mono_mul,
    p_add,
    p_diff,
    p_is_const,
    p_mul,
    p_pow,
    p_variables,
)
from .variables import Var


def _name(v):
    return v.name if isinstance(v, Var) else v


def partial(e: Expr, v) -> Expr:
    """Partial derivative of ``e`` with every other variable held fixed."""
    name = _name(v)
    dn = p_diff(e.num, name)
    if p_is_const(e.den):
        return Expr._canonical(dn) if e.den[ONE_MONO] == 1 else Expr(dn, e.den)
    dd = p_diff(e.den, name)
    if not dd:
        return Expr(dn, e.den)
    return Expr(p_add(p_mul(dn, e.den), p_mul(e.num, dd), -1), p_mul(e.den, e.den))


def _time_diff_poly(p, ctx):
    out = {}
    for name in p_variables(p):
        dname = ctx.derivative_name(name)
        if dname is None:
            continue
        out = p_add(out, p_mul(p_diff(p, name), {((dname, 1),): _ONE}))
    return out


def total_time_derivative(e: Expr, ctx) -> Expr:
    """d/dt along jets: each ``q^(r)`` contributes ``de/dq^(r) * q^(r+1)``.

    Parameters, momenta and multipliers are constant in time; an auxiliary
    variable ``r`` maps to ``r'`` only when the context declares its jets.
    """
    dn = _time_diff_poly(e.num, ctx)
    if p_is_const(e.den):
        return Expr._canonical(dn) if e.den[ONE_MONO] == 1 else Expr(dn, e.den)
    dd = _time_diff_poly(e.den, ctx)
    return Expr(p_add(p_mul(dn, e.den), p_mul(e.num, dd), -1), p_mul(e.den, e.den))


def _subst_poly(p, rules, top):
    """Apply ``rules`` to ``p``; each ``v`` is homogenized to ``top[v]``."""
    cache = {}

    def factor(name, e):
        key = (name, e)
        if key not in cache:
            r = rules[name]
            f = p_pow(r.num, e)
            if not p_is_const(r.den) or r.den[ONE_MONO] != 1:
                f = p_mul(f, p_pow(r.den, top[name] - e))
            cache[key] = f
        return cache[key]

    out = {}
    for m, c in p.items():
        kept = []
        term = None
        md = dict(m)
        for n, e in m:
            if n in rules:
                f = factor(n, e)
                term = f if term is None else p_mul(term, f)
            else:
                kept.append((n, e))
        # homogenize variables that are absent from this monomial
        for n in top:
            if n not in md and top[n]:
                f = factor(n, 0)
                if f != {ONE_MONO: _ONE}:
                    term = f if term is None else p_mul(term, f)
        kept = tuple(kept)
        for k, v in ({ONE_MONO: _ONE} if term is None else term).items():
            k = mono_mul(kept, k)
            out[k] = out.get(k, 0) + v * c
    return {m: c for m, c in out.items() if c}


def substitute(e: Expr, rules) -> Expr:
    """Simultaneous substitution ``{var: Expr}`` followed by normalization."""
    rules = {_name(k): Expr.coerce(v) for k, v in rules.items()}
    present = e.variables()
    rules = {k: v for k, v in rules.items() if k in present}
    if not rules:
        return e
    top = {}
    for name, r in rules.items():
        if not r.is_polynomial():
            top[name] = max(
                (x for m in (*e.num, *e.den) for n, x in m if n == name), default=0)
    num = _subst_poly(e.num, rules, top)
    den = _subst_poly(e.den, rules, top)
    if p_is_const(den) and den and den[ONE_MONO] == 1:
        return Expr._canonical(num)
    return Expr(num, den)


def antiderivative(e: Expr, v) -> Expr:
    """Antiderivative in ``v`` with zero constant of integration.

    Raises
    ------
    NotPolynomialError
        If ``v`` occurs in the denominator.
    """
    name = _name(v)
    if name in p_variables(e.den):
        raise NotPolynomialError(f"expression is not polynomial in {name!r}")
    out = {}
    for m, c in e.num.items():
        d = dict(m)
        k = d.get(name, 0)
        d[name] = k + 1
        out[tuple(sorted(d.items()))] = c / (k + 1)
    return Expr(out, e.den)
