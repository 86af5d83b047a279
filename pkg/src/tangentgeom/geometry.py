"""Geometric spaces over R^n and the maps between them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .connections import (
    ChristoffelField,
    Connection,
    GeometricSpace,
    connection_from_christoffel,
    ftf_equivalence,
    lift_connection,
)
from .dsl import SmoothMap, compose, tangent_lift
from .errors import DimensionError, MissingHorizontalError
from .jets import JetPoint
from .laws import FAIL, PASS, SKIPPED, LawReport, Sampler, check_equation, sample_check
from .structure import fibre_lift

T = tangent_lift


@dataclass
class GeomMorphismCheck:
    f: SmoothMap
    source: GeometricSpace
    target: GeometricSpace
    report: LawReport

    @property
    def holds(self) -> bool:
        return self.report.passed


def zero_space(n: int) -> GeometricSpace:
    """R^n with its flat coordinate connection K(x, v, w, a) = (x, a)."""
    return GeometricSpace(n, connection_from_christoffel(ChristoffelField.zero(n), name="zero"), "zero")


def _check_dims(f: SmoothMap, src: GeometricSpace, dst: GeometricSpace) -> None:
    if (f.in_dim, f.out_dim) != (src.n, dst.n):
        raise DimensionError(f"map is R^{f.in_dim} -> R^{f.out_dim}, spaces have dimensions {src.n} and {dst.n}")


def is_geometric_morphism(f: SmoothMap, src: GeometricSpace, dst: GeometricSpace, samples: int = 50,
                          tol: float = 1e-9, seed: int = 0, name: str = "geometric_morphism") -> LawReport:
    """T^2(f);K_dst = K_src;T(f) at sampled points of T^2 R^n."""
    _check_dims(f, src, dst)
    lhs = compose(T(T(f)), dst.K)
    rhs = compose(src.K, T(f))
    r = check_equation(name, lhs, rhs, lhs.in_dim, sampler=Sampler.for_check(seed, name), samples=samples, tol=tol)
    r.details.update(source=src.name, target=dst.name)
    return r


def morphism_check(f, src, dst, **kw) -> GeomMorphismCheck:
    return GeomMorphismCheck(f, src, dst, is_geometric_morphism(f, src, dst, **kw))


def second_partials(f: SmoothMap, x) -> np.ndarray:
    """H[k, i, j] = d^2 f_k / dx_i dx_j, read off order-2 jets on basis pairs."""
    n = f.in_dim
    x = np.asarray(x)
    out = np.empty((f.out_dim, n, n), dtype=object if x.dtype == object else float)
    for i in range(n):
        for j in range(i, n):
            jet = np.zeros((4, n), dtype=x.dtype)
            if x.dtype == object:
                jet[:] = 0
            jet[0] = x
            jet[1, i] += 1
            jet[2, j] += 1
            col = f.eval_jet(JetPoint(jet)).coeffs[3]
            out[:, i, j] = col
            out[:, j, i] = col
    return out


def is_locally_affine(f: SmoothMap, samples: int = 50, tol: float = 1e-9, seed: int = 0,
                      cross_check: bool = True) -> LawReport:
    """All second partials of every component vanish at the sampled points.

    A failing report names the offending component and index pair.  With
    ``cross_check`` the verdict is compared against is_geometric_morphism
    between flat coordinate spaces, recorded under ``details``.
    """
    name = "locally_affine"

    def fn(x):
        h = np.abs(second_partials(f, x).astype(float))
        k, i, j = np.unravel_index(int(np.argmax(h)), h.shape)
        return float(h[k, i, j]), {"component": int(k), "pair": [int(i), int(j)], "second_partial": float(h[k, i, j])}

    r = sample_check(name, fn, f.in_dim, sampler=Sampler.for_check(seed, name), samples=samples, tol=tol)
    if r.failed:
        comps = set()
        s = Sampler.for_check(seed, name + ".components")
        for _ in range(min(samples, 10)):
            h = np.abs(second_partials(f, s.point(f.in_dim)).astype(float))
            comps.update(int(k) for k in np.nonzero(h.reshape(h.shape[0], -1).max(axis=1) > tol)[0])
        r.details["failing_components"] = sorted(comps)
    if cross_check:
        g = is_geometric_morphism(f, zero_space(f.in_dim), zero_space(f.out_dim), samples, tol, seed)
        r.details["geometric_morphism"] = g.status
        r.details["agrees"] = g.passed == r.passed
    return r


def tangent_space(G: GeometricSpace) -> GeometricSpace:
    """(TM, K_T): dimension doubles."""
    return GeometricSpace(2 * G.n, lift_connection(G.connection), f"T({G.name})" if G.name else "T")


def check_self_morphism(G: GeometricSpace, samples: int = 20, tol: float = 1e-9, seed: int = 0,
                        f: Optional[SmoothMap] = None, f_target: Optional[GeometricSpace] = None) -> LawReport:
    """K as a geometric morphism (T^2 M, K_{T^2}) -> (TM, K_T).

    Runs only when ``G`` passes ftf_equivalence; otherwise the report is
    skipped.  With ``f`` given, naturality of K along f is checked too:
    T^2(f);K' = K;T(f) where K' is the connection of ``f_target`` (default G).
    """
    pre = ftf_equivalence(G.connection, samples=min(samples, 20), tol=max(tol, 1e-9), seed=seed)
    if not pre.passed:
        r = LawReport.skipped("self_morphism", "precondition failed: connection is not flat and torsion-free")
        r.details["precondition"] = pre.details["conditions"]
        return r
    TG = tangent_space(G)
    TTG = tangent_space(TG)
    children = [is_geometric_morphism(G.K, TTG, TG, samples, tol, seed, name="self_morphism.K")]
    if f is not None:
        target = f_target or G
        children.append(is_geometric_morphism(f, G, target, samples, tol, seed, name="self_morphism.naturality"))
    return LawReport.suite("self_morphism", children, details={"n": G.n, "space": G.name}, tolerance=tol)


def is_horizontal_preserving(f: SmoothMap, src: GeometricSpace, dst: GeometricSpace, samples: int = 50,
                             tol: float = 1e-9, seed: int = 0) -> LawReport:
    """T_2(f);H_dst = H_src;T^2(f), reported alongside the K-square verdict."""
    _check_dims(f, src, dst)
    for space in (src, dst):
        if space.connection.H is None:
            raise MissingHorizontalError(f"space {space.name or '?'} has no horizontal connection")
    name = "horizontal_preserving"
    lhs = compose(fibre_lift(f, 2), dst.connection.H)
    rhs = compose(src.connection.H, T(T(f)))
    r = check_equation(name, lhs, rhs, lhs.in_dim, sampler=Sampler.for_check(seed, name), samples=samples, tol=tol)
    k = is_geometric_morphism(f, src, dst, samples, tol, seed)
    r.details.update(geometric_morphism=k.status, agrees=k.passed == r.passed)
    return r
