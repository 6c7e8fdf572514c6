import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetlegendre.errors import ConditionError, IntegrabilityError, ValidationError
from jetlegendre.manifest import load_fixture
from jetlegendre.ostro import hamilton_equations, pullback_residuals
from jetlegendre.randgen import random_poly
from jetlegendre.schmidt import (
    AuxiliaryFunction,
    SchmidtLayout,
    check_cond2,
    even_jet_rules,
    integrability_check,
    legendre_identity,
    parse_auxiliary,
    schmidt_even,
    schmidt_odd,
    solve_auxiliary_even,
    verify_constraint_recovery,
)
from jetlegendre.symcore import Expr, jet_name, parse, partial
from jetlegendre.variational import LagrangianSpec, euler_lagrange

seeds = st.integers(min_value=0, max_value=2**32)


def odd(name):
    m = load_fixture(name)
    spec = m.spec()
    layout = m.layout(odd=True)
    return m, schmidt_odd(spec, m.auxiliary(layout), layout)


def test_integrability(example1):
    assert integrability_check(example1)
    rep = integrability_check(load_fixture("example3").spec(), ["a", "b"])
    assert not rep
    i, j, diff = rep.witness
    assert (i, j) == (0, 1)
    assert rep.matrix[0, 1] == parse("-a") and rep.matrix[1, 0] == parse("-b")
    assert diff == parse("b - a")


def test_constant_hessian_is_integrable():
    spec = LagrangianSpec.from_text(["x", "y"], 2, "x''^2 + x''*y'' + 3*y''^2")
    assert integrability_check(spec)


def test_integrability_failure_is_symmetric():
    spec = load_fixture("example3").spec()
    with pytest.raises(IntegrabilityError) as info:
        solve_auxiliary_even(spec, ["a", "b"])
    assert "not symmetric at (0,1)" in str(info.value)
    assert info.value.witness[:2] == (0, 1)


def test_auxiliary_examples(example1, pu):
    assert solve_auxiliary_even(example1).F == parse("-q'*a")
    assert solve_auxiliary_even(pu).F == parse("-q'*a")
    assert not solve_auxiliary_even(LagrangianSpec.from_text(["q"], 2, "q'^2 + q^3")).F


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_chi_identity(seed):
    rng = random.Random(seed)
    # a'^2-free quadratic Hessian: L = Σ g_ij(q) A_i A_j + A . grad_v(phi) + V
    coords = ["x", "y"]
    v = [jet_name(c, 1) for c in coords]
    phi = random_poly(rng, v + coords, 3, 3)
    L = Expr.const(0)
    for c in coords:
        L = L + Expr.var(jet_name(c, 2)) ** 2
    for c, vi in zip(coords, v):
        L = L + Expr.var(jet_name(c, 2)) * partial(phi, vi)
    L = L + random_poly(rng, v + coords, 3, 3)
    base = LagrangianSpec.from_text(coords, 2, "0")
    spec = LagrangianSpec(base.ctx, tuple(coords), 2, L)
    aux = solve_auxiliary_even(spec)
    layout = aux.layout
    from jetlegendre.schmidt import _on_acceleration_bundle

    LA = _on_acceleration_bundle(spec, layout)
    for a, vi in zip(layout.accels, v):
        assert not partial(aux.F, vi) + partial(LA, a)


def test_pu_schmidt_even(pu):
    aux = solve_auxiliary_even(pu)
    res = schmidt_even(pu, aux)
    ctx, pctx = res.ctx, res.phase.ctx
    assert res.momenta["p_q"] == parse("-(w1^2 + w2^2)*q' - a'", ctx)
    assert res.momenta["p_a"] == parse("-q'", ctx)
    assert res.Z == {"q'": parse("-p_a", pctx)}
    assert res.H == parse("-p_q*p_a + a^2/2 + (w1^2 + w2^2)*p_a^2/2 - w1^2*w2^2*q^2/2", pctx)
    rates = dict(hamilton_equations(res.phase))
    assert rates == {
        "q": parse("-p_a", pctx),
        "a": parse("(w1^2 + w2^2)*p_a - p_q", pctx),
        "p_q": parse("w1^2*w2^2*q", pctx),
        "p_a": parse("-a", pctx),
    }
    assert not (res.H.variables() & {"q'", "a'"})


def test_example1_schmidt_even(example1):
    res = schmidt_even(example1, solve_auxiliary_even(example1))
    assert res.momenta["p_q"] == parse("10*q^2*q' - a'", res.ctx)
    assert res.H == parse("-p_q*p_a + a^2/2 - 5*q^2*p_a^2 - q^6", res.phase.ctx)
    assert not legendre_identity(res)


def test_pure_acceleration():
    spec = LagrangianSpec.from_text(["q"], 2, "q''^2/2")
    aux = solve_auxiliary_even(spec)
    assert aux.F == parse("-q'*a")
    res = schmidt_even(spec, aux)
    assert res.H == parse("-p_q*p_a + a^2/2", res.phase.ctx)


@pytest.mark.parametrize("name", ["example1", "pais_uhlenbeck"])
def test_constraint_recovery(name):
    spec = load_fixture(name).spec()
    aux = solve_auxiliary_even(spec)
    assert verify_constraint_recovery(spec, aux)
    wrong = AuxiliaryFunction(aux.F * 2, "even", aux.layout)
    assert not verify_constraint_recovery(spec, wrong)


@pytest.mark.parametrize("name", ["example1", "pais_uhlenbeck"])
def test_schmidt_dynamics_reproduce_el(name):
    spec = load_fixture(name).spec()
    res = schmidt_even(spec, solve_auxiliary_even(spec))
    residuals = dict(pullback_residuals(res.phase, even_jet_rules(res), spec.with_order(4)))
    el = euler_lagrange(spec).equations[0]
    assert not residuals["q"] and not residuals["a"] and not residuals["p_a"]
    assert residuals["p_q"] == -el


def test_example3_odd():
    m, res = odd("example3")
    ctx, pctx = res.ctx, res.H_T.ctx
    expected = {"p_x": "b^2/2 + r'", "p_y": "a^2/2 + s'", "p_a": "0", "p_b": "0", "p_r": "x'", "p_s": "y'"}
    assert {k: parse(v, ctx) for k, v in expected.items()} == dict(res.momenta.items())
    assert res.primaries == (parse("p_a", pctx), parse("p_b", pctx))
    assert res.H_T.multipliers == ("lam_a", "lam_b")
    H = "p_x*p_r + p_y*p_s - a^2*p_s/2 - b^2*p_r/2 - r*a - s*b + lam_a*p_a + lam_b*p_b"
    assert res.H_T.H == parse(H, pctx)


@pytest.mark.parametrize("name", ["sarioglu_tekin", "clement"])
def test_vector_examples_odd(name):
    m, res = odd(name)
    pctx = res.H_T.ctx
    for k, v in m.expected["schmidt_momenta"]["value"].items():
        assert res.momenta[k] == parse(v, res.ctx)
    assert res.H_T.H == parse(m.expected["H_T"]["value"], pctx)


def test_primaries_are_acceleration_momenta(degenerate_fixture):
    m = degenerate_fixture
    layout = m.layout(odd=True)
    res = schmidt_odd(m.spec(), m.auxiliary(layout), layout)
    assert [str(p) for p in res.primaries] == [f"p_{a}" for a in layout.accels]


def test_cond2():
    layout = SchmidtLayout(["x", "y"], ["a", "b"], ["r", "s"])
    assert check_cond2(parse_auxiliary("x'*r + y'*s", layout), layout) == 1
    with pytest.raises(ConditionError):
        check_cond2(parse_auxiliary("x'*r + b*s", layout), layout)
    missing = SchmidtLayout(["x"], ["a"], [])
    with pytest.raises(ConditionError):
        check_cond2(parse_auxiliary("x'*a", missing), missing)


def test_odd_rejects_velocity_of_acceleration():
    spec = load_fixture("example3").spec()
    layout = SchmidtLayout(["x", "y"], ["a", "b"], ["r", "s"])
    F = parse("x'*r + y'*s + a*x", layout.function_context())
    assert schmidt_odd(spec, F, layout)
    with pytest.raises(ValidationError):
        SchmidtLayout(["x"], ["x"], [])
