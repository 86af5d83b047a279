from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tangentgeom.dsl import (
    BinOp, Call, Neg, Num, Pow, Var, ExprMap, compose, identity, pairing, parse_exprs, parse_map, product,
    projection, tangent_lift,
)
from tangentgeom.errors import ArityError, DimensionError, DomainError, OrderError, ParseError
from tangentgeom.jets import JetPoint, MAX_ORDER


def jet(order, *rows):
    return JetPoint(np.array(rows, dtype=float).reshape(1 << order, -1))


def test_parse_examples():
    sq = parse_map("x0^2", 1, 1)
    assert sq([3.0]).tolist() == [9.0]
    swap = parse_map("x1; x0", 2, 2)
    assert swap([1.0, 2.0]).tolist() == [2.0, 1.0]
    with pytest.raises(ArityError, match="x2"):
        parse_map("x2", 2, 1)
    with pytest.raises(ArityError):
        parse_map("x0; x1", 2, 1)


@pytest.mark.parametrize("src,pos", [("x0+", 3), ("x0 * * x1", 5), ("foo(x0)", 0), ("x0^1.5", 3), ("(x0", 3), ("x0 $", 3)])
def test_parse_error_positions(src, pos):
    with pytest.raises(ParseError) as info:
        parse_exprs(src)
    assert info.value.position == pos
    assert f"position {pos}" in str(info.value)


def test_precedence_and_unary_minus():
    f = parse_map("-x0^2 + 2*x1 - 3/4", 2, 1)
    # '-' atom binds tighter than '^', so this is (-x0)^2
    assert f([3.0, 1.0])[0] == pytest.approx(9 + 2 - 0.75)
    g = parse_map("2 - x0 - x1", 2, 1)
    assert g([1.0, 1.0])[0] == 0.0


def test_eval_jet_examples():
    sq = parse_map("x0^2", 1, 1)
    assert sq.eval_jet(jet(1, 3, 1)).flat().tolist() == [9, 6]
    assert sq.eval_jet(jet(2, 1, 2, 3, 4)).flat().tolist() == [1, 4, 6, 20]
    j = jet(2, 1, 2, 3, 4)
    assert identity(1).eval_jet(j) == j


def test_tangent_lift_examples():
    sq = parse_map("x0^2", 1, 1)
    assert tangent_lift(sq)([3.0, 1.0]).tolist() == [9, 6]
    assert tangent_lift(tangent_lift(sq))([1.0, 2.0, 3.0, 4.0]).tolist() == [1, 4, 6, 20]
    assert tangent_lift(identity(1))([5.0, 7.0]).tolist() == [5, 7]


def test_lift_beyond_max_order():
    f = parse_map("x0", 1, 1)
    for _ in range(MAX_ORDER + 1):
        f = tangent_lift(f)
    with pytest.raises(OrderError):
        f(np.zeros(f.in_dim))


def test_compose_and_pairing_examples():
    sq, inc = parse_map("x0^2", 1, 1), parse_map("x0+1", 1, 1)
    assert compose(sq, inc)([2.0])[0] == 5
    assert pairing(identity(1), identity(1))([3.0]).tolist() == [3, 3]
    with pytest.raises(DimensionError):
        compose(parse_map("x0; x0", 1, 2), sq)
    with pytest.raises(DimensionError):
        sq(np.array([1.0, 2.0]))


def test_compose_with_identity_on_random_jets():
    f = parse_map("sin(x0)*x1; exp(x1)", 2, 2)
    g = compose(f, identity(2))
    rng = np.random.default_rng(7)
    for _ in range(100):
        p = JetPoint(rng.uniform(-2, 2, size=(4, 2)))
        assert np.array_equal(g.eval_jet(p).coeffs, f.eval_jet(p).coeffs)


def test_product_acts_blockwise():
    f = product(parse_map("x0^2", 1, 1), parse_map("x0+x1", 2, 1))
    assert f([2.0, 1.0, 3.0]).tolist() == [4, 4]


def test_exact_evaluation_of_rational_maps():
    f = parse_map("x0/3 + 1/2*x1^2", 2, 1)
    x = np.array([Fraction(1), Fraction(2)], dtype=object)
    assert f(x)[0] == Fraction(1, 3) + 2


def test_domain_error_propagates():
    with pytest.raises(DomainError):
        parse_map("log(x0)", 1, 1)([-1.0])


def test_constants_have_zero_tangent():
    f = parse_map("3; x0", 1, 2)
    assert tangent_lift(f)([1.0, 5.0]).tolist() == [3, 1, 0, 5]


# --- properties ------------------------------------------------------------

leaves = st.one_of(
    st.integers(0, 1).map(Var),
    st.integers(0, 20).map(lambda k: Num(Fraction(k), str(k))),
    st.sampled_from(["0.5", "2.25", "1.0"]).map(lambda t: Num(Fraction(t), t)),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(children, st.integers(0, 3)).map(lambda t: Pow(*t)),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "tanh"]), children).map(lambda t: Call(*t)),
        st.tuples(st.sampled_from("+-*"), children, children).map(lambda t: BinOp(*t)),
    )


exprs = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=150)
@given(exprs)
def test_print_parse_round_trip(e):
    f = ExprMap(2, [e])
    g = parse_map(f.to_source(), 2, 1)
    assert g.body == f.body
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.uniform(-2, 2, 2)
        a, b = f(x), g(x)
        assert np.array_equal(a, b) or (np.isnan(a).all() and np.isnan(b).all())


MAPS_1 = ["sin(x0)*x1; x0^3", "exp(x0-x1); tanh(x0*x1)", "x0*x1; x1^2-x0"]
MAPS_2 = ["cos(x0)+x1; x0*x1", "x0^2-x1; sin(x1)", "exp(x1)*x0; x0-x1"]


@settings(max_examples=30)
@given(st.sampled_from(MAPS_1), st.sampled_from(MAPS_2), st.integers(0, 2), st.integers(0, 2**31))
def test_tangent_lift_is_functorial(fs, gs, order, seed):
    f, g = parse_map(fs, 2, 2), parse_map(gs, 2, 2)
    p = JetPoint(np.random.default_rng(seed).uniform(-2, 2, size=(1 << order, 4)))
    lhs = tangent_lift(compose(f, g)).eval_jet(p).coeffs
    rhs = compose(tangent_lift(f), tangent_lift(g)).eval_jet(p).coeffs
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-12)


def _jacobian(f, x):
    cols = []
    for i in range(f.in_dim):
        rows = np.zeros((2, f.in_dim))
        rows[0], rows[1, i] = x, 1.0
        cols.append(f.eval_jet(JetPoint(rows)).coeffs[1])
    return np.array(cols).T


@settings(max_examples=30)
@given(st.sampled_from(MAPS_1), st.sampled_from(MAPS_2), st.integers(0, 2**31))
def test_chain_rule(fs, gs, seed):
    f, g = parse_map(fs, 2, 2), parse_map(gs, 2, 2)
    x = np.random.default_rng(seed).uniform(-2, 2, 2)
    want = _jacobian(g, f(x)) @ _jacobian(f, x)
    assert np.allclose(_jacobian(compose(f, g), x), want, rtol=1e-9, atol=1e-12)


def test_projection_selects():
    assert projection(3, [2, 0])([1.0, 2.0, 3.0]).tolist() == [3, 1]
