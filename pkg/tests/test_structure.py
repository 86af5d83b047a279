from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tangentgeom.dsl import compose, parse_map, tangent_lift
from tangentgeom.jets import JetPoint, swap_levels
from tangentgeom.structure import (
    KINDS, ell, flip, flip_n, kernel_inverse, level_swap_map, mu_vl, p, pi, plus, structural_map,
    verify_tangent_axioms, zero,
)


def F(*xs):
    return np.array([Fraction(x) for x in xs], dtype=object)


def test_coordinate_examples():
    assert ell(1)(F(1, 2)).tolist() == [1, 0, 0, 2]
    assert flip(1)(F(1, 2, 3, 4)).tolist() == [1, 3, 2, 4]
    assert mu_vl(1)(F(1, 2, 3)).tolist() == [1, 3, 0, 2]
    assert p(2)(F(1, 2, 3, 4)).tolist() == [1, 2]
    assert zero(1)(F(5)).tolist() == [5, 0]
    assert plus(1)(F(1, 2, 3)).tolist() == [1, 5]


def test_flip_involution_example():
    assert compose(flip(1), flip(1))(F(1, 2, 3, 4)).tolist() == [1, 2, 3, 4]


def test_universality_example():
    x, v, a = 1, 5, 7
    assert kernel_inverse(1)(F(x, v, 0, a)).tolist() == [x, a, v]
    assert mu_vl(1)(F(x, a, v)).tolist() == [x, v, 0, a]


def test_c_n_and_projections():
    # ((x, v), (w0, a0), (w1, a1)) -> ((x, w0, w1), (v, a0, a1))
    assert flip_n(2, 1)(F(1, 2, 3, 4, 5, 6)).tolist() == [1, 3, 5, 2, 4, 6]
    assert pi(1, 2, 1)(F(1, 2, 3)).tolist() == [1, 3]


@pytest.mark.parametrize("kind,args", [("bogus", ()), ("pi_i", (2, 2)), ("flip_n", (0,))])
def test_invalid_kinds(kind, args):
    with pytest.raises(ValueError):
        structural_map(kind, 1, *args)


def test_dims_follow_kind():
    n = 3
    dims = {k: (structural_map(k, n, *({"pi_i": (0, 2), "flip_n": (2,)}.get(k, ()))).in_dim,
                structural_map(k, n, *({"pi_i": (0, 2), "flip_n": (2,)}.get(k, ()))).out_dim) for k in KINDS}
    assert dims == {"p": (6, 3), "zero": (3, 6), "plus": (9, 6), "ell": (6, 12), "flip": (12, 12),
                    "pi_i": (9, 6), "flip_n": (18, 18), "mu_vl": (9, 12)}


def test_whiskerings_are_level_swaps():
    """flip = swap(0,1) on T^2; T(c) = swap(0,1) and c_T = swap(1,2) on T^3."""
    rng = np.random.default_rng(3)
    n = 2
    for _ in range(10):
        y2 = rng.uniform(-2, 2, 4 * n)
        y3 = rng.uniform(-2, 2, 8 * n)
        assert np.array_equal(flip(n)(y2), swap_levels(JetPoint.from_flat(y2, 2), 0, 1).flat())
        assert np.array_equal(tangent_lift(flip(n))(y3), swap_levels(JetPoint.from_flat(y3, 3), 0, 1).flat())
        assert np.array_equal(flip(2 * n)(y3), swap_levels(JetPoint.from_flat(y3, 3), 1, 2).flat())
        assert np.array_equal(level_swap_map(3, n, 0, 2)(y3), swap_levels(JetPoint.from_flat(y3, 3), 0, 2).flat())


MAKERS = [lambda n: p(n), lambda n: zero(n), lambda n: plus(n), lambda n: ell(n), lambda n: flip(n),
          lambda n: mu_vl(n), lambda n: pi(0, 2, n), lambda n: flip_n(2, n)]


@settings(max_examples=40)
@given(st.sampled_from(range(len(MAKERS))), st.integers(1, 3), st.integers(0, 2**31))
def test_fibrewise_linear(k, n, seed):
    f = MAKERS[k](n)
    rng = np.random.default_rng(seed)
    x = rng.uniform(-2, 2, n)
    u, w = rng.uniform(-2, 2, (2, f.in_dim - n))
    s = rng.uniform(-3, 3)
    at = lambda t: f(np.concatenate([x, t]))[n:] if f.out_dim > n else f(np.concatenate([x, t]))
    if f.out_dim == n:  # p only returns the base
        assert np.array_equal(at(u), x)
        return
    assert np.allclose(at(u + s * w), at(u) + s * at(w) - s * at(np.zeros_like(u)), atol=1e-12)


def test_axioms_pass_with_exact_structural_laws():
    maps = [parse_map("sin(x0)", 2, 1), parse_map("exp(x0)*x1; x1^3-x0*x1+2", 2, 2)]
    r = verify_tangent_axioms(2, maps, samples=10)
    assert r.passed
    structural = [c for c in r.children if not c.name.startswith("naturality")]
    assert structural and all(c.max_residual == 0 and c.tolerance == 0 for c in structural)
    assert max(c.max_residual for c in r.children) < 1e-9


def test_axioms_reject_mismatched_test_map():
    from tangentgeom.errors import DimensionError

    with pytest.raises(DimensionError):
        verify_tangent_axioms(2, [parse_map("x0", 1, 1)])


def test_naturality_failure_is_witnessed():
    """A square built from the wrong lift fails and records both sides."""
    from tangentgeom.laws import Sampler, check_equation

    f, g = parse_map("x0^2", 1, 1), parse_map("x0^3", 1, 1)
    r = check_equation("ell.naturality", compose(tangent_lift(f), ell(1)),
                       compose(ell(1), tangent_lift(tangent_lift(g))), 2, sampler=Sampler(0), samples=5, tol=1e-9)
    assert r.failed
    assert set(r.witness) >= {"input", "lhs", "rhs"}
