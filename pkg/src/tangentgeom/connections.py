"""Connections on the tangent bundle of R^n.

Coordinates on T^2 R^n are (x, v, w, a) where v sits in the p_{TM} slot and w
in the T(p) slot.  A connection in Christoffel form is

    K(x, v, w, a) = (x, a_l + sum_ij G^l_ij(x) v_i w_j)

so G = 0 gives K(x, v, w, a) = (x, a).

Most checks here accept an arbitrary K (any SmoothMap 4n -> 2n) and only use
the Christoffel symbols, when present, for the tensor cross-checks.  For
connections that were derived rather than written down (lifts, pullbacks),
:func:`christoffel_at` reads the symbols back off K.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dsl import (
    BinOp,
    Expr,
    ExprMap,
    LinearMap,
    Num,
    SmoothMap,
    Var,
    compose,
    identity,
    is_zero,
    pairing,
    parse_exprs,
    projection,
    tangent_lift,
)
from .errors import ArityError, DimensionError, DomainError, InverseError, MissingHorizontalError
from .jets import JetPoint
from .laws import INCONCLUSIVE, LawReport, Sampler, check_equation, residual, sample_check
from .structure import block_map, ell, flip, flip_n, mu_vl, p, pi, plus, zero

T = tangent_lift


# ---------------------------------------------------------------------------
# Christoffel symbols


@dataclass(frozen=True)
class ChristoffelField:
    """n^3 expressions G^l_ij(x), stored as entries[l][i][j] (0-based)."""

    n: int
    entries: tuple

    def __post_init__(self):
        n = self.n
        if len(self.entries) != n or any(len(r) != n or any(len(c) != n for c in r) for r in self.entries):
            raise DimensionError(f"Christoffel field for n={n} needs {n}x{n}x{n} entries")
        for l, i, j in self.indices():
            e = self.entries[l][i][j]
            bad = sorted(k for k in e.variables() if k >= n)
            if bad:
                raise ArityError(f"Christoffel entry ({l},{i},{j}) uses x{bad[0]}, only x0..x{n - 1} allowed")

    def indices(self):
        r = range(self.n)
        return ((l, i, j) for l in r for i in r for j in r)

    @classmethod
    def parse(cls, n: int, entries) -> ChristoffelField:
        """From nested [l][i][j] strings, or a single string used for every entry."""
        if isinstance(entries, str):
            entries = [[[entries] * n for _ in range(n)] for _ in range(n)]
        parsed = tuple(
            tuple(tuple(_parse_scalar(str(e)) for e in row) for row in plane) for plane in entries
        )
        return cls(n, parsed)

    @classmethod
    def sparse(cls, n: int, nonzero: dict, default: str = "0") -> ChristoffelField:
        """From {(l, i, j): source}; unlisted entries get ``default``."""
        grid = [[[default] * n for _ in range(n)] for _ in range(n)]
        for (l, i, j), src in nonzero.items():
            if not all(0 <= k < n for k in (l, i, j)):
                raise DimensionError(f"index {(l, i, j)} out of range for n={n}")
            grid[l][i][j] = src
        return cls.parse(n, grid)

    @classmethod
    def zero(cls, n: int) -> ChristoffelField:
        return cls.parse(n, "0")

    def entry(self, l: int, i: int, j: int) -> Expr:
        return self.entries[l][i][j]

    def is_identically_zero(self) -> bool:
        return all(is_zero(self.entry(*idx)) for idx in self.indices())

    def as_map(self) -> ExprMap:
        """R^n -> R^(n^3), component order (l, i, j) row-major."""
        return ExprMap(self.n, [self.entry(*idx) for idx in self.indices()])

    def __call__(self, x) -> np.ndarray:
        return self.as_map()(x).reshape(self.n, self.n, self.n)


def _parse_scalar(src: str) -> Expr:
    body = parse_exprs(src)
    if len(body) != 1:
        raise ArityError(f"Christoffel entry {src!r} must be a single expression")
    return body[0]


# ---------------------------------------------------------------------------
# Connections


@dataclass
class Connection:
    """K: T^2 R^n -> T R^n, optionally with its Christoffel symbols and a horizontal H."""

    n: int
    K: SmoothMap
    christoffel: Optional[ChristoffelField] = None
    H: Optional[SmoothMap] = None
    name: str = ""

    def __post_init__(self):
        if (self.K.in_dim, self.K.out_dim) != (4 * self.n, 2 * self.n):
            raise DimensionError(f"K must map R^{4 * self.n} -> R^{2 * self.n}, got {self.K.in_dim}->{self.K.out_dim}")
        if self.H is not None and (self.H.in_dim, self.H.out_dim) != (3 * self.n, 4 * self.n):
            raise DimensionError("H must map T_2 M (3n) -> T^2 M (4n)")

    def with_horizontal(self, H: Optional[SmoothMap] = None) -> Connection:
        """Copy carrying H (synthesized from K when not given)."""
        return Connection(self.n, self.K, self.christoffel, H or horizontal_from_vertical(self), self.name)


@dataclass
class GeometricSpace:
    """R^n together with a connection."""

    n: int
    connection: Connection
    name: str = ""

    def __post_init__(self):
        if self.connection.n != self.n:
            raise DimensionError(f"connection has dimension {self.connection.n}, space has {self.n}")

    @property
    def K(self) -> SmoothMap:
        return self.connection.K

    @classmethod
    def from_christoffel(cls, n: int, entries, name: str = "") -> GeometricSpace:
        """``entries`` as for ChristoffelField.parse, or a sparse {(l, i, j): source} dict."""
        field_ = ChristoffelField.sparse(n, entries) if isinstance(entries, dict) else ChristoffelField.parse(n, entries)
        return cls(n, connection_from_christoffel(field_), name)


def connection_from_christoffel(gamma: ChristoffelField, name: str = "") -> Connection:
    """K(x,v,w,a)_l = a_l + sum_ij G^l_ij(x) v_i w_j, as an expression map."""
    n = gamma.n
    body: list[Expr] = [Var(i) for i in range(n)]
    for l in range(n):
        acc: Expr = Var(3 * n + l)
        for i in range(n):
            for j in range(n):
                g = gamma.entry(l, i, j)
                if is_zero(g):
                    continue
                term = BinOp("*", BinOp("*", g, Var(n + i)), Var(2 * n + j))
                acc = BinOp("+", acc, term)
        body.append(acc)
    return Connection(n, ExprMap(4 * n, body), gamma, None, name)


def _second_block(n: int) -> LinearMap:
    return projection(2 * n, range(n, 2 * n))


def christoffel_at(C: Connection, x) -> np.ndarray:
    """G^l_ij(x) read off K as the a=0 output on unit tangents (v, w) = (e_i, e_j)."""
    n = C.n
    x = np.asarray(x, dtype=float)
    out = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            y = np.zeros(4 * n)
            y[:n] = x
            y[n + i] = 1.0
            y[2 * n + j] = 1.0
            out[:, i, j] = C.K(y)[n:]
    return out


def _gamma_with_partials(source, x) -> tuple[np.ndarray, np.ndarray]:
    """(G, dG) at x with dG[k, l, i, j] = d_k G^l_ij, via order-1 jets."""
    if isinstance(source, Connection) and source.christoffel is not None:
        source = source.christoffel
    x = np.asarray(x, dtype=float)
    if isinstance(source, ChristoffelField):
        n = source.n
        G = source.as_map()
        gamma = G(x).reshape(n, n, n)
        d = np.empty((n, n, n, n))
        for k in range(n):
            jet = np.zeros((2, n))
            jet[0] = x
            jet[1, k] = 1.0
            d[k] = G.eval_jet(JetPoint(jet)).coeffs[1].reshape(n, n, n)
        return gamma, d
    C = source
    n = C.n
    gamma = christoffel_at(C, x)
    d = np.empty((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                jet = np.zeros((2, 4 * n))
                jet[0, :n] = x
                jet[0, n + i] = 1.0
                jet[0, 2 * n + j] = 1.0
                jet[1, k] = 1.0
                d[k, :, i, j] = C.K.eval_jet(JetPoint(jet)).coeffs[1, n:]
    return gamma, d


def curvature_tensor(source, x) -> np.ndarray:
    """R[l, i, j, k] at x, from a ChristoffelField or a Connection.

    R^l_ijk = d_i G^l_kj - d_j G^l_ki + sum_m (G^l_mi G^m_kj - G^l_mj G^m_ki).

    This is the textbook expression written for symbols whose lower indices
    are stored in the opposite order (G^l_ij here pairs v_i with w_j).  It
    vanishes exactly when the flatness equation on K holds, with or without
    torsion.
    """
    g, d = _gamma_with_partials(source, x)
    R = np.einsum("iklj->lijk", d) - np.einsum("jkli->lijk", d)
    R += np.einsum("lmi,mkj->lijk", g, g) - np.einsum("lmj,mki->lijk", g, g)
    return R


def torsion_tensor(source, x) -> np.ndarray:
    """T[l, i, j] = G^l_ij - G^l_ji."""
    if isinstance(source, Connection) and source.christoffel is not None:
        source = source.christoffel
    g = source(x) if isinstance(source, ChristoffelField) else christoffel_at(source, x)
    return g - np.transpose(g, (0, 2, 1))


# ---------------------------------------------------------------------------
# verification


def _sampler(seed: int, name: str, sampler: Optional[Sampler]) -> Sampler:
    return sampler or Sampler.for_check(seed, name)


def _eq(name, lhs, rhs, *, samples, tol, seed, sampler=None) -> LawReport:
    return check_equation(name, lhs, rhs, lhs.in_dim, sampler=_sampler(seed, name, sampler), samples=samples, tol=tol)


def fibre_product_maps(C: Connection) -> tuple[SmoothMap, SmoothMap]:
    """(<T(p), p_TM, K>, its inverse) as maps R^4n -> R^4n.

    The forward map sends (x, v, w, a) to (x, w, v, k); the inverse sends
    (x, u, v, k) to (x, v, u, k - K(x, v, u, 0)).
    """
    n = C.n
    fwd = compose(pairing(T(p(n)), p(2 * n), C.K), block_map(n, 6, [[0], [1], [3], [5]]))
    correction = compose(block_map(n, 4, [[0], [2], [1], []]), C.K, _second_block(n))
    inv = compose(
        pairing(identity(4 * n), correction),
        block_map(n, 5, [[0], [2], [1], [3, (4, -1)]]),
    )
    return fwd, inv


def verify_vertical_connection(C: Connection, samples: int = 50, tol: float = 1e-9, seed: int = 0) -> LawReport:
    """Retraction, projection, lift and additivity identities for K, plus the fibre-product round trip."""
    n, K = C.n, C.K
    kw = dict(samples=samples, tol=tol, seed=seed)
    pairK = lambda f, g: compose(pairing(compose(f, K), compose(g, K)), block_map(n, 4, [[0], [1], [3]]))
    fwd, inv = fibre_product_maps(C)
    children = [
        _eq("retraction", compose(ell(n), K), identity(2 * n), **kw),
        _eq("projection.outer", compose(K, p(n)), compose(p(2 * n), p(n)), **kw),
        _eq("projection.inner", compose(K, p(n)), compose(T(p(n)), p(n)), **kw),
        _eq("lift.outer", compose(K, ell(n)), compose(ell(2 * n), T(K)), **kw),
        _eq("lift.inner", compose(K, ell(n)), compose(T(ell(n)), flip(2 * n), T(K)), **kw),
        _eq("additive.outer_zero", compose(zero(2 * n), K), compose(p(n), zero(n)), **kw),
        _eq("additive.outer_plus", compose(plus(2 * n), K), compose(pairK(pi(0, 2, 2 * n), pi(1, 2, 2 * n)), plus(n)), **kw),
        _eq("additive.inner_zero", compose(T(zero(n)), K), compose(p(n), zero(n)), **kw),
        _eq("additive.inner_plus", compose(T(plus(n)), K), compose(pairK(T(pi(0, 2, n)), T(pi(1, 2, n))), plus(n)), **kw),
        _eq("fibre_product.inverse_after", compose(fwd, inv), identity(4 * n), **kw),
        _eq("fibre_product.inverse_before", compose(inv, fwd), identity(4 * n), **kw),
    ]
    return LawReport.suite("vertical_connection", children, details={"n": n, "connection": C.name}, tolerance=tol)


def _oracle_details(C: Connection, points, which: str) -> dict:
    """Evaluate a tensor oracle at the base points of the sampled jets."""
    fn = curvature_tensor if which == "curvature" else torsion_tensor
    worst = 0.0
    for y in points:
        try:
            worst = max(worst, float(np.abs(fn(C, np.asarray(y[: C.n], dtype=float))).max()))
        except DomainError:
            continue
    return {f"{which}_oracle_max": worst}


def _with_oracle(report: LawReport, C: Connection, which: str, samples: int, seed: int, tol: float) -> LawReport:
    s = Sampler.for_check(seed, f"{report.name}.oracle")
    pts = [s.point(C.n) for _ in range(samples)]
    info = _oracle_details(C, pts, which)
    report.details.update(info)
    report.details["oracle_agrees"] = (info[f"{which}_oracle_max"] <= max(tol, 1e-6)) == (report.status == "pass")
    return report


def is_torsion_free(C: Connection, samples: int = 50, tol: float = 1e-9, seed: int = 0) -> LawReport:
    """c;K = K, with the torsion tensor evaluated alongside for comparison."""
    n = C.n
    r = _eq("torsion_free", compose(flip(n), C.K), C.K, samples=samples, tol=tol, seed=seed)
    return _with_oracle(r, C, "torsion", samples, seed, tol)


def is_flat(C: Connection, samples: int = 50, tol: float = 1e-9, seed: int = 0) -> LawReport:
    """c_TM;T(K);K = T(K);K on T^3, with the curvature tensor evaluated alongside."""
    n = C.n
    TK_K = compose(T(C.K), C.K)
    r = _eq("flat", compose(flip(2 * n), TK_K), TK_K, samples=samples, tol=tol, seed=seed)
    return _with_oracle(r, C, "curvature", samples, seed, tol)


# ---------------------------------------------------------------------------
# horizontal connections


def horizontal_from_vertical(C: Connection, samples: int = 20, tol: float = 1e-9, seed: int = 0) -> SmoothMap:
    """The H with H;T(p) = pi_0, H;p_TM = pi_1 and H;K = p;0.

    H(x, u0, u1) = (x, u1, u0, -K(x, u1, u0, 0)).  The defining equations are
    checked right away; the result is attached to the map as ``report`` and a
    failure does not prevent the map from being returned.
    """
    n = C.n
    a_slot = compose(block_map(n, 3, [[0], [2], [1], []]), C.K, LinearMap(
        [[-1 if c == n + r else 0 for c in range(2 * n)] for r in range(n)]))
    H = pairing(block_map(n, 3, [[0], [2], [1]]), a_slot)
    H.report = verify_horizontal(C, H, samples=samples, tol=tol, seed=seed)
    return H


def verify_horizontal(C: Connection, H: SmoothMap, samples: int = 20, tol: float = 1e-9, seed: int = 0) -> LawReport:
    n = C.n
    kw = dict(samples=samples, tol=tol, seed=seed)
    base = projection(3 * n, range(n))
    return LawReport.suite("horizontal", [
        _eq("horizontal.inner_projection", compose(H, T(p(n))), pi(0, 2, n), **kw),
        _eq("horizontal.outer_projection", compose(H, p(2 * n)), pi(1, 2, n), **kw),
        _eq("horizontal.kills_K", compose(H, C.K), compose(base, zero(n)), **kw),
    ], tolerance=tol)


def verify_compatibility(C: Connection, samples: int = 50, tol: float = 1e-9, seed: int = 0) -> LawReport:
    """H;K = pi;0 and <K, p_TM>;mu + U;H = 1 (sum over p_TM)."""
    if C.H is None:
        raise MissingHorizontalError("connection has no horizontal part; use with_horizontal() first")
    n, K, H = C.n, C.K, C.H
    kw = dict(samples=samples, tol=tol, seed=seed)
    vertical = compose(pairing(K, p(2 * n)), block_map(n, 4, [[0], [1], [3]]), mu_vl(n))
    U = compose(pairing(T(p(n)), p(2 * n)), block_map(n, 4, [[0], [1], [3]]))
    horizontal = compose(U, H)
    # (x, v, 0, k) + (x, v, w, h) over the base (x, v)
    total = compose(pairing(vertical, horizontal), block_map(n, 8, [[0], [1], [2], [3], [6], [7]]), plus(2 * n))
    return LawReport.suite("compatibility", [
        _eq("compatibility.HK", compose(H, K), compose(projection(3 * n, range(n)), zero(n)), **kw),
        _eq("compatibility.split", total, identity(4 * n), **kw),
    ], details={"n": n, "connection": C.name}, tolerance=tol)


# ---------------------------------------------------------------------------
# lifting to TM


def lift_connection(C: Connection) -> Connection:
    """The connection on TM: K_T = T(c);c_TM;T(K);c, and H_T = c_2;T(H);c_TM;T(c)."""
    n = C.n
    KT = compose(T(flip(n)), flip(2 * n), T(C.K), flip(n))
    HT = None
    if C.H is not None:
        HT = compose(flip_n(2, n), T(C.H), flip(2 * n), T(flip(n)))
    return Connection(2 * n, KT, None, HT, f"T({C.name})" if C.name else "lifted")


def verify_lift_lemma(C: Connection, samples: int = 50, tol: float = 1e-9, seed: int = 0) -> LawReport:
    """K_T;T(p) = T^2(p);K and T(l);K_T = K;l."""
    n = C.n
    KT = lift_connection(C).K
    kw = dict(samples=samples, tol=tol, seed=seed)
    return LawReport.suite("lift_lemma", [
        _eq("lift_lemma.projection", compose(KT, T(p(n))), compose(T(T(p(n))), C.K), **kw),
        _eq("lift_lemma.lift", compose(T(ell(n)), KT), compose(C.K, ell(n)), **kw),
    ], tolerance=tol)


def ftf_equivalence(C: Connection, samples: int = 30, tol: float = 1e-9, seed: int = 0) -> LawReport:
    """Evaluate the three equivalent conditions independently and compare.

    (i)   flat and torsion-free;
    (ii)  K_T;K = T(K);K on T^3;
    (iii) T^2(K);K_T = K_{T^2};T(K) on T^4, i.e. K is a geometric morphism
          from (T^2 M, K_{T^2}) to (TM, K_T).
    """
    n, K = C.n, C.K
    lifted = lift_connection(C)
    KTT = lift_connection(lifted).K
    flat = is_flat(C, samples, tol, seed)
    tf = is_torsion_free(C, samples, tol, seed)
    cond_i = LawReport.suite("ftf.i_flat_and_torsion_free", [flat, tf], tolerance=tol)
    cond_ii = _eq("ftf.ii_lifted_square", compose(lifted.K, K), compose(T(K), K), samples=samples, tol=tol, seed=seed)
    cond_iii = _eq("ftf.iii_self_morphism", compose(T(T(K)), lifted.K), compose(KTT, T(K)),
                   samples=samples, tol=tol, seed=seed)
    conds = [cond_i, cond_ii, cond_iii]
    decided = [c.status for c in conds if c.status != INCONCLUSIVE]
    details = {
        "n": n,
        "connection": C.name,
        "conditions": {c.name: c.status for c in conds},
        "agree": len(set(decided)) <= 1,
    }
    return LawReport.suite("ftf_equivalence", conds, details=details, tolerance=tol)


# ---------------------------------------------------------------------------
# pullbacks


def _is_identity(f: SmoothMap) -> bool:
    return isinstance(f, LinearMap) and f.offset is None and f.in_dim == f.out_dim and all(
        c == (i == j) for i, row in enumerate(f.matrix) for j, c in enumerate(row)
    )


def pullback_connection(target: Connection, phi: SmoothMap, psi: SmoothMap, samples: int = 20,
                        tol: float = 1e-9, seed: int = 0, name: str = "") -> Connection:
    """The connection making phi a geometric morphism into ``target``.

    K_src = T^2(phi);K_target;T(psi), where psi inverts phi.  The inverse is
    checked both ways at samples; InverseError if it fails.
    """
    n = target.n
    for f in (phi, psi):
        if (f.in_dim, f.out_dim) != (n, n):
            raise DimensionError(f"pullback maps must be R^{n} -> R^{n}")
    if _is_identity(phi) and _is_identity(psi):
        return target
    for label, f, g in (("psi_after_phi", phi, psi), ("phi_after_psi", psi, phi)):
        r = _eq(f"pullback.{label}", compose(f, g), identity(n), samples=samples, tol=tol, seed=seed)
        if r.failed:
            raise InverseError(f"{label} is not the identity at sampled point {r.witness['input']!r}")
    K = compose(T(T(phi)), target.K, T(psi))
    return Connection(n, K, None, None, name or f"pullback({target.name})")
