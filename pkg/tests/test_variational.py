import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetlegendre.errors import ParseError, ValidationError
from jetlegendre.manifest import load_fixture
from jetlegendre.randgen import random_poly
from jetlegendre.symcore import Expr, det, is_symmetric, jet_name, matrix_rank, parse, total_time_derivative
from jetlegendre.variational import (
    LagrangianSpec,
    euler_lagrange,
    gauge_lift,
    highest_hessian,
    is_nondegenerate,
    jet_order,
    morse_rank_check,
)

seeds = st.integers(min_value=0, max_value=2**32)
COORDS = ("q", "u")


def random_spec(rng, k):
    base = LagrangianSpec.from_text(COORDS, k, "0")
    L = random_poly(rng, [jet_name(c, i) for c in COORDS for i in range(k + 1)], 4, 3)
    return LagrangianSpec(base.ctx, COORDS, k, L)


def test_example1_el(example1):
    el = euler_lagrange(example1)
    assert el.order == 4
    assert el.equations[0] == parse("q'''' - 10*q^2*q'' - 10*q*q'^2 + 6*q^5", el.ctx)


def test_pais_uhlenbeck_el(pu):
    el = euler_lagrange(pu)
    assert el.equations[0] == parse("q'''' + (w1^2 + w2^2)*q'' + w1^2*w2^2*q", el.ctx)


def test_free_particle():
    spec = LagrangianSpec.from_text(["q"], 1, "q'^2/2")
    el = euler_lagrange(spec)
    assert el.equations[0] == parse("-q''", el.ctx)


def test_hessians(example1):
    H = highest_hessian(example1)
    assert H.to_lists() == [[Expr.const(1)]]
    assert det(H) == 1 and is_nondegenerate(example1)
    assert highest_hessian(LagrangianSpec.from_text(["q"], 1, "q'^2/2")).to_lists() == [[Expr.const(1)]]


def test_sarioglu_tekin_is_degenerate():
    spec = load_fixture("sarioglu_tekin").spec()
    H = highest_hessian(spec)
    assert H.shape == (6, 6)
    assert matrix_rank(H) < 6
    assert not is_nondegenerate(spec)


def test_spec_validation():
    with pytest.raises(ValidationError):
        LagrangianSpec.from_text(["q"], 0, "q^2")
    with pytest.raises(ParseError):
        LagrangianSpec.from_text(["q"], 1, "q''^2")
    with pytest.raises(ParseError):
        LagrangianSpec.from_text(["q"], 2, "x*q'")
    spec = LagrangianSpec.from_text(["q"], 2, "q''^2")
    with pytest.raises(ValidationError):
        LagrangianSpec(spec.ctx, ("q",), 1, spec.L)


def test_jet_order(example1):
    assert jet_order(example1.L, ["q"]) == 2
    assert jet_order(Expr.const(3), ["q"]) == 0


def test_gauge_lift_raises_order(example1):
    ctx = example1.with_order(2)
    F = parse("-q'*q''", ctx)
    lifted = gauge_lift(example1, F)
    assert lifted.order == 3
    assert lifted.L - example1.L == total_time_derivative(F, lifted.ctx)


def test_gauge_lift_of_zero(example1):
    lifted = gauge_lift(example1, Expr.const(0))
    assert lifted.L == example1.L and lifted.order == 2


@settings(max_examples=50, deadline=None)
@given(seeds, st.sampled_from([1, 2, 3]))
def test_gauge_invariance(seed, k):
    rng = random.Random(seed)
    spec = random_spec(rng, k)
    F = random_poly(rng, [jet_name(c, i) for c in COORDS for i in range(k)], 3, 3)
    lifted = gauge_lift(spec, F)
    assert lifted.order == k
    for a, b in zip(euler_lagrange(lifted).equations, euler_lagrange(spec).equations):
        assert not a - b


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_el_of_total_derivative_vanishes(seed):
    rng = random.Random(seed)
    spec = LagrangianSpec.from_text(COORDS, 2, "0")
    F = random_poly(rng, [jet_name(c, i) for c in COORDS for i in range(2)], 3, 3)
    total = LagrangianSpec(spec.ctx, COORDS, 2, total_time_derivative(F, spec.ctx))
    assert all(not e for e in euler_lagrange(total).equations)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_el_is_linear(seed):
    rng = random.Random(seed)
    s1, s2 = random_spec(rng, 2), random_spec(rng, 2)
    a, b = Expr.const(3), Expr.const(-2)
    combo = LagrangianSpec(s1.ctx, COORDS, 2, a * s1.L + b * s2.L)
    for c, x, y in zip(euler_lagrange(combo).equations, euler_lagrange(s1).equations,
                       euler_lagrange(s2).equations):
        assert c == a * x + b * y


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_hessian_symmetric(seed):
    rng = random.Random(seed)
    ok, _ = is_symmetric(highest_hessian(random_spec(rng, 2)))
    assert ok


def test_morse_rank_check():
    xs, rs = ["x1", "x2"], ["r1", "r2"]
    assert morse_rank_check(parse("x1*r1 + x2*r2"), xs, rs)
    assert not morse_rank_check(Expr.const(5), xs, rs)
    assert morse_rank_check(Expr.const(5), [], [])
