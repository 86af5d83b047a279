"""A small expression language for smooth maps R^p -> R^q.

Grammar::

    map    := expr (';' expr)*
    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' INTEGER)?
    atom   := NUMBER | 'x' INTEGER | FUNC '(' expr ')' | '(' expr ')' | '-' atom

Maps are evaluated over jets, so the tangent lift T(f) needs no symbolic
differentiation: it is evaluation with one extra e-level.  The lift's argument
(x_0..x_{p-1}, v_0..v_{p-1}) is packed with x on the existing levels and v on
the new highest level; every structural map uses the same flat layout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ArityError, DimensionError, OrderError, ParseError
from .jets import MAX_ORDER, PRIMITIVES, JetPoint, ScalarJet, jet_primitive

# ---------------------------------------------------------------------------
# AST


class Expr:
    """Base AST node."""

    prec = 4  # atoms bind tightest

    def variables(self) -> set[int]:
        return set()


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction
    text: str = ""

    def evaluate(self, env, exact):
        return self.value if exact else float(self.value)

    def to_source(self) -> str:
        if self.text:
            return self.text
        if self.value.denominator == 1 and self.value >= 0:
            return str(self.value.numerator)
        return f"({self.value.numerator}/{self.value.denominator})"


@dataclass(frozen=True)
class Var(Expr):
    index: int

    def evaluate(self, env, exact):
        return env[self.index]

    def variables(self):
        return {self.index}

    def to_source(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def evaluate(self, env, exact):
        return -self.operand.evaluate(env, exact)

    def variables(self):
        return self.operand.variables()

    def to_source(self) -> str:
        return "-" + _atom(self.operand)


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int
    prec = 3

    def evaluate(self, env, exact):
        b = self.base.evaluate(env, exact)
        return b ** self.exponent

    def variables(self):
        return self.base.variables()

    def to_source(self) -> str:
        return f"{_atom(self.base)}^{self.exponent}"


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def evaluate(self, env, exact):
        return jet_primitive(self.func, self.arg.evaluate(env, exact))

    def variables(self):
        return self.arg.variables()

    def to_source(self) -> str:
        return f"{self.func}({self.arg.to_source()})"


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def prec(self):
        return 1 if self.op in "+-" else 2

    def evaluate(self, env, exact):
        a = self.left.evaluate(env, exact)
        b = self.right.evaluate(env, exact)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if isinstance(b, ScalarJet):
            return a / b
        return a * jet_primitive("recip", b)

    def variables(self):
        return self.left.variables() | self.right.variables()

    def to_source(self) -> str:
        left = self.left.to_source()
        if self.left.prec < self.prec:
            left = f"({left})"
        right = self.right.to_source()
        # right operand of a left-associative operator needs strictly higher precedence
        if self.right.prec <= self.prec:
            right = f"({right})"
        return f"{left}{self.op}{right}"


def _atom(e: Expr) -> str:
    if isinstance(e, (Num, Var, Call, Neg)):
        return e.to_source()
    return f"({e.to_source()})"


def is_zero(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 0


# ---------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<var>x\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^();]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        text = m.group(kind)
        start = m.start(kind)
        if kind == "name" and text not in PRIMITIVES:
            raise ParseError(f"unknown function or identifier {text!r}", start)
        tokens.append((kind, text, start))
        pos = m.end()
    tokens.append(("eof", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, got, pos = self.take()
        if got != text or kind == "eof":
            what = "end of input" if kind == "eof" else repr(got)
            raise ParseError(f"expected {text!r}, found {what}", pos)

    def parse_map(self) -> list[Expr]:
        exprs = [self.expr()]
        while self.peek()[1] == ";":
            self.take()
            exprs.append(self.expr())
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {text!r}", pos)
        return exprs

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        node = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, text, pos = self.take()
            if kind != "num" or not text.isdigit():
                raise ParseError("exponent must be an integer literal", pos)
            node = Pow(node, int(text))
        return node

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(Fraction(text), text)
        if kind == "var":
            return Var(int(text[1:]))
        if kind == "name":
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(text, arg)
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if text == "-":
            return Neg(self.atom())
        what = "end of input" if kind == "eof" else f"token {text!r}"
        raise ParseError(f"unexpected {what}", pos)


def parse_exprs(source: str) -> list[Expr]:
    return _Parser(source).parse_map()


def parse_map(source: str, in_dim: int, out_dim: int) -> ExprMap:
    """Parse ``source`` into a SmoothMap R^in_dim -> R^out_dim."""
    body = parse_exprs(source)
    if len(body) != out_dim:
        raise ArityError(f"expected {out_dim} components, found {len(body)}")
    return ExprMap(in_dim, tuple(body))


# ---------------------------------------------------------------------------
# Smooth maps


class SmoothMap:
    """A smooth map R^in_dim -> R^out_dim evaluable over jets of any order."""

    in_dim: int
    out_dim: int
    provenance: str = "builtin-structural"

    def eval_jet(self, p: JetPoint) -> JetPoint:
        raise NotImplementedError

    def _check_input(self, p: JetPoint) -> None:
        if p.dim != self.in_dim:
            raise DimensionError(f"map expects dimension {self.in_dim}, got {p.dim}")

    def __call__(self, x) -> np.ndarray:
        """Evaluate at a plain point (order-0 jet) and return a flat vector."""
        return self.eval_jet(JetPoint.point(x)).flat()

    def then(self, *others: SmoothMap) -> SmoothMap:
        return compose(self, *others)

    def to_source(self) -> str:
        raise TypeError(f"{type(self).__name__} has no expression form")


class ExprMap(SmoothMap):
    provenance = "parsed"

    def __init__(self, in_dim: int, body: Sequence[Expr]):
        self.in_dim = in_dim
        self.out_dim = len(body)
        self.body = tuple(body)
        for e in self.body:
            bad = sorted(i for i in e.variables() if i >= in_dim)
            if bad:
                raise ArityError(f"x{bad[0]} out of range for input dimension {in_dim}")

    def eval_jet(self, p: JetPoint) -> JetPoint:
        self._check_input(p)
        exact = p.exact
        env = [p.component(i) for i in range(self.in_dim)]
        rows = 1 << p.order
        out = np.empty((rows, self.out_dim), dtype=object if exact else float)
        for k, e in enumerate(self.body):
            v = e.evaluate(env, exact)
            if isinstance(v, ScalarJet):
                out[:, k] = v.coeffs
            else:
                out[0, k] = v
                out[1:, k] = v * 0
        return JetPoint(out)

    def to_source(self) -> str:
        return "; ".join(e.to_source() for e in self.body)

    def __repr__(self) -> str:
        return f"ExprMap({self.in_dim}->{self.out_dim}: {self.to_source()!r})"


class LinearMap(SmoothMap):
    """x -> M x + b with rational coefficients.

    T^k of an affine map applies M to every level-set vector and adds b to the
    base only, so this evaluates exactly on Fraction jets.
    """

    def __init__(self, matrix, offset=None, name: str = ""):
        rows = [[Fraction(c) for c in row] for row in matrix]
        self.out_dim = len(rows)
        self.in_dim = len(rows[0]) if rows else 0
        if any(len(r) != self.in_dim for r in rows):
            raise DimensionError("ragged matrix")
        self.matrix = tuple(tuple(r) for r in rows)
        self.offset = None if offset is None else tuple(Fraction(c) for c in offset)
        self.name = name
        self._exact = np.array(rows, dtype=object).reshape(self.out_dim, self.in_dim)
        self._float = self._exact.astype(float)

    def eval_jet(self, p: JetPoint) -> JetPoint:
        self._check_input(p)
        if p.exact:
            out = p.coeffs.dot(self._exact.T) if self.in_dim else np.full((p.coeffs.shape[0], self.out_dim), Fraction(0), dtype=object)
            if self.offset is not None:
                out[0] = out[0] + np.array(self.offset, dtype=object)
        else:
            out = p.coeffs @ self._float.T
            if self.offset is not None:
                out[0] += np.array([float(c) for c in self.offset])
        return JetPoint(out)

    def to_source(self) -> str:
        comps = []
        for k, row in enumerate(self.matrix):
            terms = []
            for i, c in enumerate(row):
                if c == 0:
                    continue
                if c == 1:
                    terms.append(f"x{i}")
                else:
                    terms.append(f"{Num(c).to_source()}*x{i}")
            if self.offset is not None and self.offset[k] != 0:
                terms.append(Num(self.offset[k]).to_source())
            comps.append("+".join(terms) if terms else "0")
        return "; ".join(comps)

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"LinearMap{label}({self.in_dim}->{self.out_dim})"


class TangentLift(SmoothMap):
    provenance = "tangent-lift"

    def __init__(self, base: SmoothMap):
        self.base = base
        self.in_dim = 2 * base.in_dim
        self.out_dim = 2 * base.out_dim

    def eval_jet(self, p: JetPoint) -> JetPoint:
        self._check_input(p)
        if p.order + 1 > MAX_ORDER:
            raise OrderError(f"tangent lift would need jet order {p.order + 1} > {MAX_ORDER}")
        n = self.base.in_dim
        # x-part keeps its levels, v-part moves to the new highest level
        packed = np.concatenate([p.coeffs[:, :n], p.coeffs[:, n:]], axis=0)
        r = self.base.eval_jet(JetPoint(packed)).coeffs
        half = r.shape[0] // 2
        return JetPoint(np.concatenate([r[:half], r[half:]], axis=1))

    def __repr__(self) -> str:
        return f"T({self.base!r})"


class Composite(SmoothMap):
    """Diagrammatic composite: apply ``maps[0]`` first."""

    provenance = "composite"

    def __init__(self, maps: Sequence[SmoothMap]):
        flat: list[SmoothMap] = []
        for m in maps:
            flat.extend(m.maps if isinstance(m, Composite) else [m])
        for f, g in zip(flat, flat[1:]):
            if f.out_dim != g.in_dim:
                raise DimensionError(f"cannot compose {f!r} ({f.out_dim} out) with {g!r} ({g.in_dim} in)")
        self.maps = tuple(flat)
        self.in_dim = flat[0].in_dim
        self.out_dim = flat[-1].out_dim

    def eval_jet(self, p: JetPoint) -> JetPoint:
        self._check_input(p)
        for m in self.maps:
            p = m.eval_jet(p)
        return p

    def __repr__(self) -> str:
        return " ; ".join(repr(m) for m in self.maps)


class Pairing(SmoothMap):
    """<f_1, ..., f_m>: common input, concatenated outputs."""

    provenance = "composite"

    def __init__(self, maps: Sequence[SmoothMap]):
        if len({m.in_dim for m in maps}) != 1:
            raise DimensionError("paired maps must share an input dimension")
        self.maps = tuple(maps)
        self.in_dim = maps[0].in_dim
        self.out_dim = sum(m.out_dim for m in maps)

    def eval_jet(self, p: JetPoint) -> JetPoint:
        self._check_input(p)
        parts = [m.eval_jet(p).coeffs for m in self.maps]
        return JetPoint(np.concatenate(parts, axis=1))

    def __repr__(self) -> str:
        return "<" + ", ".join(repr(m) for m in self.maps) + ">"


def tangent_lift(f: SmoothMap) -> SmoothMap:
    """T(f): R^2p -> R^2q."""
    return TangentLift(f)


def compose(*maps: SmoothMap) -> SmoothMap:
    """Diagrammatic-order composite: ``compose(f, g)`` is x -> g(f(x))."""
    if len(maps) == 1:
        return maps[0]
    return Composite(maps)


def pairing(*maps: SmoothMap) -> SmoothMap:
    return Pairing(maps)


def identity(n: int) -> LinearMap:
    return LinearMap([[int(i == j) for j in range(n)] for i in range(n)], name=f"id{n}")


def projection(n: int, indices: Sequence[int]) -> LinearMap:
    """x -> (x[i] for i in indices)."""
    return LinearMap([[int(j == i) for j in range(n)] for i in indices])


def product(f: SmoothMap, g: SmoothMap) -> SmoothMap:
    """f x g acting on concatenated inputs."""
    p = f.in_dim + g.in_dim
    return pairing(
        compose(projection(p, range(f.in_dim)), f),
        compose(projection(p, range(f.in_dim, p)), g),
    )


def print_map(f: SmoothMap) -> str:
    return f.to_source()
