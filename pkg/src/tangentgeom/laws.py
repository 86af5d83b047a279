"""Sampled and exact equation checking, and the LawReport that records results."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import DomainError

PASS, FAIL, SKIPPED, INCONCLUSIVE = "pass", "fail", "skipped", "inconclusive"

SAMPLE_LOW, SAMPLE_HIGH = -2.0, 2.0
MAX_RETRIES = 100


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


@dataclass
class LawReport:
    """Outcome of one law, or of a suite of laws (``children``).

    A failing report always carries a witness: the sampled input and both
    sides of the equation.  A suite fails if any child fails, is inconclusive
    if any child is inconclusive and none fail, and is skipped only when every
    child was skipped.
    """

    name: str
    status: str
    max_residual: float = 0.0
    samples: int = 0
    tolerance: float = 0.0
    witness: Optional[dict] = None
    children: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    @classmethod
    def suite(cls, name: str, children: Iterable[LawReport], details: Optional[dict] = None,
              tolerance: float = 0.0) -> LawReport:
        children = list(children)
        statuses = {c.status for c in children}
        if FAIL in statuses:
            status = FAIL
        elif INCONCLUSIVE in statuses:
            status = INCONCLUSIVE
        elif statuses == {SKIPPED}:
            status = SKIPPED
        else:
            status = PASS
        witness = None
        for c in children:
            if c.failed:
                witness = dict(c.witness or {}, law=c.name)
                break
        return cls(
            name=name,
            status=status,
            max_residual=max((c.max_residual for c in children), default=0.0),
            samples=max((c.samples for c in children), default=0),
            tolerance=tolerance or max((c.tolerance for c in children), default=0.0),
            witness=witness,
            children=children,
            details=details or {},
        )

    @classmethod
    def skipped(cls, name: str, reason: str) -> LawReport:
        return cls(name=name, status=SKIPPED, details={"reason": reason})

    def child(self, name: str) -> LawReport:
        for c in self.children:
            if c.name == name:
                return c
        raise KeyError(name)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "status": self.status,
            "max_residual": float(self.max_residual),
            "samples": self.samples,
            "tolerance": float(self.tolerance),
        }
        if self.witness is not None:
            d["witness"] = _jsonable(self.witness)
        if self.details:
            d["details"] = _jsonable(self.details)
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> LawReport:
        return cls(
            name=d["name"],
            status=d["status"],
            max_residual=d.get("max_residual", 0.0),
            samples=d.get("samples", 0),
            tolerance=d.get("tolerance", 0.0),
            witness=d.get("witness"),
            children=[cls.from_dict(c) for c in d.get("children", [])],
            details=d.get("details", {}),
        )

    def summary_lines(self, indent: int = 0) -> list[str]:
        pad = "  " * indent
        line = f"{pad}[{self.status.upper():>12}] {self.name}  max_residual={self.max_residual:.3g}  samples={self.samples}"
        lines = [line]
        if self.failed and self.witness and not self.children:
            lines.append(f"{pad}    witness: {_jsonable(self.witness)}")
        for c in self.children:
            lines.extend(c.summary_lines(indent + 1))
        return lines


class Sampler:
    """Seeded source of sample points, uniform on [-2, 2]^dim.

    Exact points are dyadic rationals on the same box, so rational arithmetic
    on them stays cheap.
    """

    def __init__(self, seed=0, low: float = SAMPLE_LOW, high: float = SAMPLE_HIGH):
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.low = low
        self.high = high

    @classmethod
    def for_check(cls, seed: int, name: str) -> Sampler:
        """Independent stream per check so results do not depend on check order."""
        return cls(np.random.default_rng([seed, zlib.crc32(name.encode())]))

    def point(self, dim: int) -> np.ndarray:
        return self.rng.uniform(self.low, self.high, size=dim)

    def exact_point(self, dim: int) -> np.ndarray:
        ticks = self.rng.integers(int(self.low * 64), int(self.high * 64) + 1, size=dim)
        return np.array([Fraction(int(t), 64) for t in ticks], dtype=object)


def residual(lhs: np.ndarray, rhs: np.ndarray, exact: bool = False) -> float:
    """Max entrywise |lhs - rhs| / max(1, |lhs|, |rhs|); plain |lhs - rhs| when exact."""
    if lhs.shape != rhs.shape:
        return float("inf")
    if lhs.size == 0:
        return 0.0
    if exact:
        return float(max(abs(a - b) for a, b in zip(lhs.tolist(), rhs.tolist())))
    lhs = lhs.astype(float)
    rhs = rhs.astype(float)
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    r = np.abs(lhs - rhs) / scale
    if not np.all(np.isfinite(r)):
        return float("inf")
    return float(r.max())


def sample_check(
    name: str,
    fn: Callable[[np.ndarray], tuple[float, dict]],
    dim: int,
    *,
    sampler: Sampler,
    samples: int,
    tol: float,
    exact: bool = False,
    points: Optional[Iterable] = None,
) -> LawReport:
    """Run ``fn`` at sample points; fn returns (residual, witness-fields).

    Points raising DomainError are redrawn up to MAX_RETRIES times in a row,
    after which the law is reported inconclusive.  With explicit ``points``
    there is no redrawing.
    """
    worst = 0.0
    witness = None
    count = 0
    if points is not None:
        for x in points:
            r, w = fn(x)
            count += 1
            if r > worst or (witness is None and r > tol):
                worst = max(worst, r)
                if r > tol:
                    witness = dict(w, input=x, residual=r)
        status = FAIL if worst > tol else PASS
        return LawReport(name, status, worst, count, tol, witness)

    for _ in range(samples):
        for _attempt in range(MAX_RETRIES):
            x = sampler.exact_point(dim) if exact else sampler.point(dim)
            try:
                r, w = fn(x)
            except DomainError:
                continue
            break
        else:
            return LawReport(name, INCONCLUSIVE, worst, count, tol, None,
                             details={"reason": "inconclusive sample: domain violations exhausted retries"})
        count += 1
        if r > worst:
            worst = r
            if r > tol:
                witness = dict(w, input=x, residual=r)
    status = FAIL if worst > tol else PASS
    return LawReport(name, status, worst, count, tol, witness)


def check_equation(
    name: str,
    lhs: Callable,
    rhs: Callable,
    dim: int,
    *,
    sampler: Sampler,
    samples: int,
    tol: float,
    exact: bool = False,
    points: Optional[Iterable] = None,
) -> LawReport:
    """Compare two maps of flat vectors at sampled points."""

    def fn(x):
        a = np.asarray(lhs(x))
        b = np.asarray(rhs(x))
        return residual(a, b, exact), {"lhs": a, "rhs": b}

    return sample_check(name, fn, dim, sampler=sampler, samples=samples, tol=tol, exact=exact, points=points)


def affine_basis(dim: int) -> list[np.ndarray]:
    """Origin plus every unit vector, as exact rationals."""
    pts = [np.array([Fraction(0)] * dim, dtype=object)]
    for i in range(dim):
        e = np.array([Fraction(0)] * dim, dtype=object)
        e[i] = Fraction(1)
        pts.append(e)
    return pts
