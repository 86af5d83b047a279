"""Structural maps of the tangent bundle functor on R^n, and an axiom checker.

Every structural map is a block-index map: the flat coordinates of T^k(R^n)
are length-n blocks, and p, 0, +, l, c, pi_i, c_m and mu only copy, drop,
add or zero blocks.  They are realized as rational LinearMaps, so composites
of them can be compared exactly.

Iterated bundles follow one rule: a point of T^a(T^b R^n) *is* a point of
T^(a+b) R^n with the inner b levels lowest.  Hence the whiskering alpha_{TM}
is alpha built at dimension 2n, and T(alpha) is ``tangent_lift(alpha)``.

Fibre powers T_m M = TM x_M ... x_M TM are stored flat as (x, u_1, ..., u_m).

Axioms checked by :func:`verify_tangent_axioms`:

* naturality of p, 0, +, l, c against each test map f;
* additive bundle: 0;p = 1, +;p = p on T_2, right unit, associativity and
  commutativity of +;
* c;c = 1 and the braid identity T(c);c_T;T(c) = c_T;T(c);c_T on T^3;
* l;l_T = l;T(l), l;c = l, l_T;T(c);c_T = c;T(l);
* c;T(p) = p_T, l;p_T = p;0 = l;T(p), 0;l = 0;0_T, T(0);c = 0_T;
* c_2;T(pi_i) = pi_i;c for i = 0, 1;
* universality of the vertical lift through mu, checked against its explicit
  inverse on the kernel of T(p) in both directions.

Composites are written in diagrammatic order throughout (f;g means f then g).
"""

from __future__ import annotations

from typing import Optional, Sequence

from .dsl import LinearMap, SmoothMap, compose, identity, pairing, projection, tangent_lift
from .errors import DimensionError
from .laws import LawReport, Sampler, check_equation

KINDS = ("p", "zero", "plus", "ell", "flip", "pi_i", "flip_n", "mu_vl")


class StructuralMap(LinearMap):
    """A LinearMap tagged with the structural transformation it realizes."""

    def __init__(self, kind: str, n: int, blocks_in: int, out_blocks: Sequence[Sequence[int]],
                 levels: tuple = ()):
        matrix = _block_matrix(n, blocks_in, out_blocks)
        label = kind if not levels else f"{kind}{list(levels)}"
        super().__init__(matrix, name=f"{label}@{n}")
        self.kind = kind
        self.n = n
        self.levels = tuple(levels)


def _block_matrix(n: int, blocks_in: int, out_blocks) -> list[list]:
    """Output block k is the sum of the input blocks listed in out_blocks[k].

    A source may be a bare block index or a (block, coefficient) pair.
    """
    rows = []
    for sources in out_blocks:
        for r in range(n):
            row = [0] * (blocks_in * n)
            for src in sources:
                b, coef = src if isinstance(src, tuple) else (src, 1)
                row[b * n + r] += coef
            rows.append(row)
    return rows


def block_map(n: int, blocks_in: int, out_blocks: Sequence[Sequence[int]], name: str = "") -> LinearMap:
    """General block copy/sum map; an empty source list yields a zero block."""
    return LinearMap(_block_matrix(n, blocks_in, out_blocks), name=name)


def structural_map(kind: str, n: int, *levels: int) -> StructuralMap:
    """Coordinate realization of one structural transformation at R^n.

    ``pi_i`` takes (i, m): the i-th projection T_m M -> TM, 0-based.
    ``flip_n`` takes (m,): the map T_m(TM) -> T(T_m M).
    """
    if n < 1:
        raise DimensionError(f"dimension must be positive, got {n}")
    if kind == "p":
        return StructuralMap(kind, n, 2, [[0]])
    if kind == "zero":
        return StructuralMap(kind, n, 1, [[0], []])
    if kind == "plus":
        return StructuralMap(kind, n, 3, [[0], [1, 2]])
    if kind == "ell":
        return StructuralMap(kind, n, 2, [[0], [], [], [1]])
    if kind == "flip":
        return StructuralMap(kind, n, 4, [[0], [2], [1], [3]])
    if kind == "mu_vl":
        return StructuralMap(kind, n, 3, [[0], [2], [], [1]])
    if kind == "pi_i":
        if len(levels) != 2:
            raise ValueError("pi_i needs (i, m)")
        i, m = levels
        if not 0 <= i < m:
            raise ValueError(f"projection index {i} out of range for T_{m}")
        return StructuralMap(kind, n, m + 1, [[0], [1 + i]], levels)
    if kind == "flip_n":
        if len(levels) != 1 or levels[0] < 1:
            raise ValueError("flip_n needs a positive m")
        (m,) = levels
        # input ((x, v), (w_j, a_j)_j) as blocks x=0, v=1, w_j=2+2j, a_j=3+2j
        out = [[0]] + [[2 + 2 * j] for j in range(m)] + [[1]] + [[3 + 2 * j] for j in range(m)]
        return StructuralMap(kind, n, 2 * (m + 1), out, levels)
    raise ValueError(f"unknown structural map kind {kind!r}")


# short constructors used all over the package
def p(n: int) -> StructuralMap:
    return structural_map("p", n)


def zero(n: int) -> StructuralMap:
    return structural_map("zero", n)


def plus(n: int) -> StructuralMap:
    return structural_map("plus", n)


def ell(n: int) -> StructuralMap:
    return structural_map("ell", n)


def flip(n: int) -> StructuralMap:
    return structural_map("flip", n)


def mu_vl(n: int) -> StructuralMap:
    return structural_map("mu_vl", n)


def pi(i: int, m: int, n: int) -> StructuralMap:
    return structural_map("pi_i", n, i, m)


def flip_n(m: int, n: int) -> StructuralMap:
    return structural_map("flip_n", n, m)


def fibre_lift(f: SmoothMap, m: int = 2) -> SmoothMap:
    """T_m(f): (x, u_1..u_m) -> (f x, Df u_1, ..., Df u_m)."""
    n, q = f.in_dim, f.out_dim
    lifted = pairing(*[compose(pi(j, m, n), tangent_lift(f)) for j in range(m)])
    # each factor repeats f(x); keep the first copy
    keep = list(range(q)) + [2 * q * j + q + r for j in range(m) for r in range(q)]
    return compose(lifted, projection(2 * q * m, keep))


def level_swap_map(order: int, n: int, i: int, j: int) -> LinearMap:
    """The LinearMap on flat T^order(R^n) coordinates that swap_levels(i, j) performs."""
    from .jets import check_level, swap_bits

    check_level(i, order)
    check_level(j, order)
    size = 1 << order
    out = [[0] for _ in range(size)]
    for s in range(size):
        out[swap_bits(s, i, j)] = [s]
    return block_map(n, size, out, name=f"swap{i}{j}")


def kernel_inverse(n: int) -> LinearMap:
    """(x, v, w, a) -> (x, a, v): inverts mu_vl on points with w = 0."""
    return block_map(n, 4, [[0], [3], [1]], name="mu_inv")


# ---------------------------------------------------------------------------
# axiom checker


def _structural_laws(n: int):
    """(name, lhs, rhs) triples whose sides involve structural maps only."""
    T = tangent_lift
    idn = identity
    laws = [
        ("bundle.zero_section", compose(zero(n), p(n)), idn(n)),
        ("bundle.plus_over_base", compose(plus(n), p(n)), projection(3 * n, range(n))),
        ("bundle.plus_unit", compose(block_map(n, 2, [[0], [1], []]), plus(n)), idn(2 * n)),
        (
            "bundle.plus_assoc",
            compose(pairing(compose(projection(4 * n, range(3 * n)), plus(n)),
                            projection(4 * n, range(3 * n, 4 * n))), plus(n)),
            compose(block_map(n, 4, [[0], [1], [0], [2], [3]]),
                    pairing(projection(5 * n, range(2 * n)),
                            compose(projection(5 * n, range(2 * n, 5 * n)), plus(n))),
                    block_map(n, 4, [[0], [1], [3]]),
                    plus(n)),
        ),
        ("bundle.plus_comm", compose(block_map(n, 3, [[0], [2], [1]]), plus(n)), plus(n)),
        ("flip.involution", compose(flip(n), flip(n)), idn(4 * n)),
        (
            "flip.braid",
            compose(T(flip(n)), flip(2 * n), T(flip(n))),
            compose(flip(2 * n), T(flip(n)), flip(2 * n)),
        ),
        ("ell.coassoc", compose(ell(n), ell(2 * n)), compose(ell(n), T(ell(n)))),
        ("ell.flip", compose(ell(n), flip(n)), ell(n)),
        ("ell.flip_coherence", compose(ell(2 * n), T(flip(n)), flip(2 * n)), compose(flip(n), T(ell(n)))),
        ("flip.projection", compose(flip(n), T(p(n))), p(2 * n)),
        ("ell.outer_projection", compose(ell(n), p(2 * n)), compose(p(n), zero(n))),
        ("ell.inner_projection", compose(ell(n), T(p(n))), compose(p(n), zero(n))),
        ("ell.zero", compose(zero(n), ell(n)), compose(zero(n), zero(2 * n))),
        ("flip.zero", compose(T(zero(n)), flip(n)), zero(2 * n)),
    ]
    for i in range(2):
        laws.append((
            f"flip_n.projection_{i}",
            compose(flip_n(2, n), T(pi(i, 2, n))),
            compose(pi(i, 2, 2 * n), flip(n)),
        ))
    embed = block_map(n, 3, [[0], [1], [], [2]], name="kernel_embed")
    laws += [
        ("universality.lands_in_kernel", compose(mu_vl(n), T(p(n))), compose(projection(3 * n, range(n)), zero(n))),
        ("universality.inverse_after_mu", compose(mu_vl(n), kernel_inverse(n)), idn(3 * n)),
        ("universality.mu_after_inverse", compose(embed, kernel_inverse(n), mu_vl(n)), embed),
    ]
    return laws


def _naturality_laws(n: int, f: SmoothMap):
    T = tangent_lift
    q = f.out_dim
    T2f = T(T(f))
    return [
        ("p", compose(T(f), p(q)), compose(p(n), f)),
        ("zero", compose(f, zero(q)), compose(zero(n), T(f))),
        ("plus", compose(fibre_lift(f, 2), plus(q)), compose(plus(n), T(f))),
        ("ell", compose(T(f), ell(q)), compose(ell(n), T2f)),
        ("flip", compose(T2f, flip(q)), compose(flip(n), T2f)),
    ]


def verify_tangent_axioms(
    n: int,
    test_maps: Sequence[SmoothMap] = (),
    samples: int = 20,
    tol: float = 1e-9,
    seed: int = 0,
    sampler: Optional[Sampler] = None,
) -> LawReport:
    """Check the tangent-structure axioms on R^n at sampled points.

    Structural-only laws run on exact dyadic rationals with tolerance 0.
    Naturality squares use floats and ``tol`` (relative residual).
    """
    children = []
    for name, lhs, rhs in _structural_laws(n):
        s = sampler or Sampler.for_check(seed, name)
        children.append(check_equation(name, lhs, rhs, lhs.in_dim, sampler=s, samples=samples, tol=0.0, exact=True))
    for k, f in enumerate(test_maps):
        if f.in_dim != n:
            raise DimensionError(f"test map {k} has input dimension {f.in_dim}, expected {n}")
        for law, lhs, rhs in _naturality_laws(n, f):
            name = f"naturality.{law}[{k}]"
            s = sampler or Sampler.for_check(seed, name)
            children.append(check_equation(name, lhs, rhs, lhs.in_dim, sampler=s, samples=samples, tol=tol))
    return LawReport.suite("tangent_axioms", children, details={"n": n, "test_maps": len(test_maps)}, tolerance=tol)
