"""Text form of expressions.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' uint)?
    atom   := rational | symbol | '(' expr ')'
    symbol := identifier "'"*

Primes encode the jet order, so ``q''`` is the second time derivative of
``q``.  :func:`render` emits the same grammar with minimal parentheses and
graded-lex monomial order, and ``parse(render(e)) == e`` for every ``e``.
"""

from __future__ import annotations

import re

from ..errors import JetOrderError, ParseError, UndeclaredVariableError
from .poly import ONE_MONO, Expr, mono_degree
from .variables import DYNAMIC_ROLES

_TOKEN = re.compile(r"(\d+)|([A-Za-z][A-Za-z0-9_]*)('*)|([-+*/^()])")


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        if m.group(1):
            tokens.append(("int", m.group(1), pos))
        elif m.group(2):
            tokens.append(("sym", (m.group(2), len(m.group(3))), pos))
        else:
            tokens.append((m.group(4), m.group(4), pos))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, ctx):
        self.text = text
        self.ctx = ctx
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message):
        raise ParseError(message, self.text, self.tokens[self.i][2])

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek() in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            elif not rhs:
                raise ParseError("division by zero", self.text, pos)
            else:
                value = value / rhs
        return value

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            if self.peek() != "int":
                self.fail("expected a nonnegative integer exponent")
            return base ** int(self.take()[1])
        return base

    def atom(self):
        kind, value, pos = self.tokens[self.i]
        if kind == "int":
            self.take()
            return Expr.const(int(value))
        if kind == "sym":
            self.take()
            return Expr.var(self.resolve(*value, pos))
        if kind == "(":
            self.take()
            inner = self.expr()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.take()
            return inner
        if kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected token {value!r}")

    def resolve(self, ident, primes, pos):
        name = ident + "'" * primes
        ctx = self.ctx
        if ctx is None:
            return name
        var = ctx._vars.get(ident)
        if var is None:
            raise UndeclaredVariableError(f"undeclared identifier {ident!r}", self.text, pos)
        if primes:
            if var.role not in DYNAMIC_ROLES:
                raise JetOrderError(f"{ident!r} is a {var.role} and takes no primes",
                                    self.text, pos)
            if primes > ctx.max_order(ident):
                raise JetOrderError(
                    f"{name!r} exceeds the allowed jet order {ctx.max_order(ident)} of {ident!r}",
                    self.text, pos)
        return name


def parse(text: str, ctx=None) -> Expr:
    """Parse ``text`` against ``ctx``; ``ctx=None`` accepts any identifier."""
    p = _Parser(text, ctx)
    value = p.expr()
    if p.peek() != "end":
        p.fail(f"unexpected token {p.tokens[p.i][1]!r}")
    return value


# ---------------------------------------------------------------------------
# rendering


def _var_order(names, ctx):
    if ctx is None:
        return sorted(names)
    return sorted(names, key=lambda n: (ctx.sort_key(n), n))


def _ordered_terms(poly, order):
    pos = {n: i for i, n in enumerate(order)}

    def key(item):
        m = item[0]
        vec = [0] * len(order)
        for n, e in m:
            vec[pos[n]] = e
        return (mono_degree(m), vec)

    return sorted(poly.items(), key=key, reverse=True)


def _mono_str(m, order):
    pos = {n: i for i, n in enumerate(order)}
    parts = []
    for n, e in sorted(m, key=lambda t: pos[t[0]]):
        parts.append(n if e == 1 else f"{n}^{e}")
    return "*".join(parts)


def _coeff_str(c):
    c = abs(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_str(poly, order):
    if not poly:
        return "0"
    out = []
    for k, (m, c) in enumerate(_ordered_terms(poly, order)):
        if m:
            body = _mono_str(m, order)
            if abs(c) != 1:
                body = f"{_coeff_str(c)}*{body}"
        else:
            body = _coeff_str(c)
        if k == 0:
            out.append("-" + body if c < 0 else body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def render(e: Expr, ctx=None) -> str:
    """Canonical text of ``e``; variables ordered by ``ctx`` when given."""
    order = _var_order(e.variables(), ctx)
    num = _poly_str(e.num, order)
    if e.is_polynomial():
        return num
    if len(e.num) > 1:
        num = f"({num})"
    den = _poly_str(e.den, order)
    (m,) = e.den if len(e.den) == 1 else (None,)
    if len(e.den) > 1 or (m is not None and (len(m) > 1 or m == ONE_MONO)):
        den = f"({den})"
    return f"{num}/{den}"
