"""Seeded random expressions for property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .symcore import Expr


def random_coefficient(rng: random.Random, span=5):
    num = rng.randint(-span, span) or 1
    return Fraction(num, rng.randint(1, 3))


def random_poly(rng: random.Random, names, terms=4, degree=3) -> Expr:
    """Sum of up to ``terms`` random monomials of total degree at most ``degree``."""
    out = Expr.const(0)
    for _ in range(rng.randint(1, terms)):
        t = Expr.const(random_coefficient(rng))
        for _ in range(rng.randint(0, degree)):
            t = t * Expr.var(rng.choice(names))
        out = out + t
    return out


def random_rational(rng: random.Random, names, terms=3, degree=2) -> Expr:
    den = random_poly(rng, names, terms, degree)
    while not den:
        den = random_poly(rng, names, terms, degree)
    return random_poly(rng, names, terms, degree) / den


def random_point(rng: random.Random, names, span=3):
    return {n: Fraction(rng.randint(-4 * span, 4 * span), 4) or Fraction(1, 3) for n in names}
