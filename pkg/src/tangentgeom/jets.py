"""Truncated Weil-algebra arithmetic: iterated tangent vectors over R^n.

An order-k jet lives in R[e_0, ..., e_{k-1}] / (e_i^2).  Its 2^k coefficients
are indexed by subsets of the e-levels, encoded as bitmasks (bit i set means
e_i occurs in the monomial).  A point of T^k(R^n) is an order-k jet with a
vector of length n per level set.

Applying T adds the highest level, so the flat coordinates of a point of
T^k(R^n) are the level-set blocks in increasing bitmask order; for T^2 that is
the familiar (x, v, w, a).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Number

import numpy as np

from .errors import DomainError, OrderError

MAX_ORDER = 5

PRIMITIVES = ("sin", "cos", "exp", "log", "sqrt", "tanh")


def check_order(order: int) -> None:
    if not 0 <= order <= MAX_ORDER:
        raise OrderError(f"jet order {order} outside supported range 0..{MAX_ORDER}")


def check_level(level: int, order: int) -> None:
    if not 0 <= level < order:
        raise OrderError(f"level {level} out of range for order {order}")


@lru_cache(maxsize=None)
def _product_table(order: int) -> tuple[tuple[int, int, int], ...]:
    # (S, A, B) with A, B disjoint and A | B == S
    table = []
    for s in range(1 << order):
        a = s
        while True:
            table.append((s, a, s ^ a))
            if a == 0:
                break
            a = (a - 1) & s
    return tuple(table)


def swap_bits(mask: int, i: int, j: int) -> int:
    """Transpose bits i and j of a level-set bitmask."""
    bi = (mask >> i) & 1
    bj = (mask >> j) & 1
    if bi == bj:
        return mask
    return mask ^ ((1 << i) | (1 << j))


class ScalarJet:
    """An element of R[e_0..e_{k-1}]/(e_i^2), stored as 2^k coefficients.

    Coefficients may be floats or Fractions; arithmetic never converts between
    them, so a jet built from Fractions stays exact under +, -, * and /.
    Plain numbers are accepted as operands and act as constant jets.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        order = len(coeffs).bit_length() - 1
        if len(coeffs) != 1 << order:
            raise OrderError(f"coefficient count {len(coeffs)} is not a power of two")
        check_order(order)
        self.order = order
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value, order: int) -> ScalarJet:
        zero = value * 0
        return cls((value,) + (zero,) * ((1 << order) - 1))

    @property
    def base(self):
        return self.coeffs[0]

    def __repr__(self) -> str:
        return f"ScalarJet({list(self.coeffs)!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, ScalarJet):
            return self.coeffs == other.coeffs
        return NotImplemented

    __hash__ = None

    def _coerce(self, other) -> ScalarJet:
        if isinstance(other, ScalarJet):
            if other.order != self.order:
                raise OrderError(f"order mismatch: {self.order} vs {other.order}")
            return other
        if isinstance(other, Number):
            return ScalarJet.constant(other, self.order)
        raise TypeError(f"cannot combine ScalarJet with {type(other).__name__}")

    def __add__(self, other):
        if isinstance(other, Number):
            return ScalarJet((self.coeffs[0] + other,) + self.coeffs[1:])
        other = self._coerce(other)
        return ScalarJet(a + b for a, b in zip(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return ScalarJet(-a for a in self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Number):
            return ScalarJet((self.coeffs[0] - other,) + self.coeffs[1:])
        other = self._coerce(other)
        return ScalarJet(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return ScalarJet(a * other for a in self.coeffs)
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        out = [a[0] * 0] * len(a)
        for s, i, j in _product_table(self.order):
            out[s] += a[i] * b[j]
        return ScalarJet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            if other == 0:
                raise DomainError("division", other)
            return self * (1 / other if isinstance(other, float) else Fraction(1) / other)
        return self * jet_primitive("recip", self._coerce(other))

    def __rtruediv__(self, other):
        return jet_primitive("recip", self) * other

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("jets only support integer powers")
        if exponent < 0:
            return jet_primitive("recip", self) ** (-exponent)
        result = ScalarJet.constant(self.coeffs[0] * 0 + 1, self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def split_top(self) -> tuple[ScalarJet, ScalarJet]:
        """Write self = p + e_top * q with p, q of order k-1."""
        if self.order == 0:
            raise OrderError("order-0 jet has no top level")
        half = len(self.coeffs) // 2
        return ScalarJet(self.coeffs[:half]), ScalarJet(self.coeffs[half:])

    @staticmethod
    def join_top(p: ScalarJet, q: ScalarJet) -> ScalarJet:
        if p.order != q.order:
            raise OrderError(f"order mismatch: {p.order} vs {q.order}")
        return ScalarJet(p.coeffs + q.coeffs)


def jet_add(a: ScalarJet, b: ScalarJet) -> ScalarJet:
    if a.order != b.order:
        raise OrderError(f"order mismatch: {a.order} vs {b.order}")
    return a + b


def jet_mul(a: ScalarJet, b: ScalarJet) -> ScalarJet:
    if a.order != b.order:
        raise OrderError(f"order mismatch: {a.order} vs {b.order}")
    return a * b


def _scalar_primitive(name: str, x):
    if name == "recip":
        if x == 0:
            raise DomainError(name, x)
        return 1 / x if isinstance(x, float) else Fraction(1) / x
    if name == "log" and not x > 0:
        raise DomainError(name, x)
    if name == "sqrt" and x < 0:
        raise DomainError(name, x)
    fn = getattr(math, name)
    try:
        return fn(x)
    except (ValueError, OverflowError) as exc:
        raise DomainError(name, x) from exc


def _derivative(name: str, p: ScalarJet, fp: ScalarJet) -> ScalarJet:
    # f'(p) expressed with jet operations; fp = f(p) is reused where possible
    if name == "sin":
        return jet_primitive("cos", p)
    if name == "cos":
        return -jet_primitive("sin", p)
    if name == "exp":
        return fp
    if name == "log":
        return jet_primitive("recip", p)
    if name == "sqrt":
        return jet_primitive("recip", fp) * 0.5
    if name == "tanh":
        return 1 - fp * fp
    if name == "recip":
        return -(fp * fp)
    raise ValueError(f"unknown primitive {name!r}")


def jet_primitive(name: str, a):
    """Lift a primitive to jets: f(p + e q) = f(p) + e f'(p) q, recursively.

    Accepts a plain number too, in which case it is ordinary evaluation.
    The domain is checked at the base coefficient.
    """
    if name not in PRIMITIVES and name != "recip":
        raise ValueError(f"unknown primitive {name!r}")
    if not isinstance(a, ScalarJet):
        return _scalar_primitive(name, a)
    if a.order == 0:
        return ScalarJet((_scalar_primitive(name, a.coeffs[0]),))
    p, q = a.split_top()
    fp = jet_primitive(name, p)
    return ScalarJet.join_top(fp, _derivative(name, p, fp) * q)


class JetPoint:
    """A point of T^k(R^n): one length-n vector per level set.

    ``coeffs`` is an array of shape (2^k, n); row S holds the coefficient
    vector of the monomial indexed by bitmask S.  Object dtype means exact
    (Fraction) arithmetic.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.asarray(coeffs)
        if arr.ndim != 2:
            raise ValueError("JetPoint coefficients must be a 2-d array")
        order = arr.shape[0].bit_length() - 1
        if arr.shape[0] != 1 << order:
            raise OrderError(f"level-set count {arr.shape[0]} is not a power of two")
        check_order(order)
        if arr.dtype != object:
            arr = arr.astype(float)
        self.coeffs = arr

    @property
    def order(self) -> int:
        return self.coeffs.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    @property
    def base(self) -> np.ndarray:
        return self.coeffs[0]

    @classmethod
    def point(cls, x) -> JetPoint:
        """Order-0 jet: a plain point of R^n."""
        return cls(np.asarray(x).reshape(1, -1))

    @classmethod
    def from_flat(cls, flat, order: int) -> JetPoint:
        flat = np.asarray(flat)
        return cls(flat.reshape(1 << order, -1))

    def flat(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def component(self, i: int) -> ScalarJet:
        return ScalarJet(self.coeffs[:, i].tolist())

    @classmethod
    def from_components(cls, comps, exact: bool = False) -> JetPoint:
        cols = [c.coeffs for c in comps]
        arr = np.array(cols, dtype=object if exact else float).T
        return cls(arr.reshape(len(cols[0]), len(cols)))

    def swap_levels(self, i: int, j: int) -> JetPoint:
        return swap_levels(self, i, j)

    def __repr__(self) -> str:
        return f"JetPoint(order={self.order}, dim={self.dim}, coeffs={self.coeffs.tolist()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetPoint):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(np.all(self.coeffs == other.coeffs))

    __hash__ = None


def swap_levels(j: JetPoint, a: int, b: int) -> JetPoint:
    """Move the component at level set S to sigma(S), sigma transposing levels a and b."""
    check_level(a, j.order)
    check_level(b, j.order)
    out = np.empty_like(j.coeffs)
    for s in range(j.coeffs.shape[0]):
        out[swap_bits(s, a, b)] = j.coeffs[s]
    return JetPoint(out)
