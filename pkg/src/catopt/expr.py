"""Expression trees over named variables.

Nodes are small frozen dataclasses. Variables refer to a position in the
problem box; the name is kept only for printing.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from . import interval as ia
from .interval import ENTIRE, EMPTY, Interval


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int
    name: str = ""


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 2:
            raise ValueError(f"integer exponent >= 2 required, got {self.exponent!r}")


@dataclass(frozen=True)
class Sqrt:
    arg: "Expr"


Expr = Union[Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sqrt]

_BINARY = {Add: "add", Sub: "sub", Mul: "mul", Div: "div"}


@dataclass(frozen=True)
class Constraint:
    """``bounds.lo <= body <= bounds.hi``; an equality has degenerate bounds."""

    body: Expr
    bounds: Interval
    name: str = ""

    def __post_init__(self):
        if self.bounds.is_empty():
            raise ValueError("constraint bounds must be non-empty")

    def violation(self, point: Sequence[float]) -> float:
        """Amount by which the (rigorously enclosed) body misses the bounds at ``point``."""
        val = eval_interval(self.body, [Interval(v) for v in point])
        if val.is_empty():
            return math.inf
        return max(0.0, self.bounds.lo - val.hi, val.lo - self.bounds.hi)


def variables(e: Expr) -> frozenset[int]:
    if isinstance(e, Var):
        return frozenset((e.index,))
    if isinstance(e, Const):
        return frozenset()
    return frozenset().union(*(variables(c) for c in children(e)))


def children(e: Expr) -> tuple:
    if isinstance(e, (Const, Var)):
        return ()
    if isinstance(e, (Neg, Sqrt)):
        return (e.arg,)
    if isinstance(e, Pow):
        return (e.base,)
    return (e.left, e.right)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval_interval(e: Expr, box: Sequence[Interval]) -> Interval:
    """Natural interval extension of ``e`` over ``box``."""
    if isinstance(e, Var):
        return box[e.index]
    if isinstance(e, Const):
        return Interval(e.value)
    if isinstance(e, Add):
        return ia.add(eval_interval(e.left, box), eval_interval(e.right, box))
    if isinstance(e, Sub):
        return ia.sub(eval_interval(e.left, box), eval_interval(e.right, box))
    if isinstance(e, Mul):
        return ia.mul(eval_interval(e.left, box), eval_interval(e.right, box))
    if isinstance(e, Div):
        return ia.div(eval_interval(e.left, box), eval_interval(e.right, box))
    if isinstance(e, Pow):
        return ia.ipow(eval_interval(e.base, box), e.exponent)
    if isinstance(e, Neg):
        return ia.neg(eval_interval(e.arg, box))
    if isinstance(e, Sqrt):
        return ia.sqrt(eval_interval(e.arg, box))
    raise TypeError(f"not an expression node: {e!r}")


def eval_point(e: Expr, point: Sequence[float]) -> float:
    """Plain floating-point evaluation (no rounding control)."""
    if isinstance(e, Var):
        return point[e.index]
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Add):
        return eval_point(e.left, point) + eval_point(e.right, point)
    if isinstance(e, Sub):
        return eval_point(e.left, point) - eval_point(e.right, point)
    if isinstance(e, Mul):
        return eval_point(e.left, point) * eval_point(e.right, point)
    if isinstance(e, Div):
        return eval_point(e.left, point) / eval_point(e.right, point)
    if isinstance(e, Pow):
        return eval_point(e.base, point) ** e.exponent
    if isinstance(e, Neg):
        return -eval_point(e.arg, point)
    if isinstance(e, Sqrt):
        return math.sqrt(eval_point(e.arg, point))
    raise TypeError(f"not an expression node: {e!r}")


def _safe_div(a: Interval, b: Interval) -> Interval:
    if b.lo <= 0 <= b.hi:
        return ENTIRE
    return ia.div(a, b)


def gradient_interval(e: Expr, box: Sequence[Interval]) -> list[Interval]:
    """Enclosure of the gradient of ``e`` over ``box`` by forward-mode AD.

    Components whose derivative is undefined somewhere in the box (division
    by an interval containing zero, sqrt touching zero) are unbounded.
    """
    n = len(box)
    _, grad = _forward_diff(e, box, n)
    return list(grad)


def _forward_diff(e: Expr, box, n):
    zero = (ia.ZERO,) * n
    if isinstance(e, Var):
        g = list(zero)
        g[e.index] = Interval(1.0)
        return box[e.index], tuple(g)
    if isinstance(e, Const):
        return Interval(e.value), zero
    if isinstance(e, Neg):
        v, g = _forward_diff(e.arg, box, n)
        return ia.neg(v), tuple(ia.neg(x) for x in g)
    if isinstance(e, (Add, Sub)):
        u, gu = _forward_diff(e.left, box, n)
        v, gv = _forward_diff(e.right, box, n)
        op = ia.add if isinstance(e, Add) else ia.sub
        return op(u, v), tuple(op(a, b) for a, b in zip(gu, gv))
    if isinstance(e, Mul):
        u, gu = _forward_diff(e.left, box, n)
        v, gv = _forward_diff(e.right, box, n)
        return ia.mul(u, v), tuple(ia.add(ia.mul(a, v), ia.mul(u, b)) for a, b in zip(gu, gv))
    if isinstance(e, Div):
        u, gu = _forward_diff(e.left, box, n)
        v, gv = _forward_diff(e.right, box, n)
        v2 = ia.ipow(v, 2)
        grad = tuple(_safe_div(ia.sub(ia.mul(a, v), ia.mul(u, b)), v2) for a, b in zip(gu, gv))
        return ia.div(u, v), grad
    if isinstance(e, Pow):
        u, gu = _forward_diff(e.base, box, n)
        k = e.exponent
        factor = ia.mul(Interval(float(k)), ia.ipow(u, k - 1))
        return ia.ipow(u, k), tuple(ia.mul(factor, a) for a in gu)
    if isinstance(e, Sqrt):
        u, gu = _forward_diff(e.arg, box, n)
        s = ia.sqrt(u)
        denom = ia.mul(Interval(2.0), s)
        return s, tuple(a if a == ia.ZERO else _safe_div(a, denom) for a in gu)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class ParseError(ValueError):
    """Malformed formula; ``offset`` is the 0-based character position."""

    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|[-+*/^()=<>]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            # report the first non-blank offending character
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: Mapping[str, int]):
        self.text = text
        self.names = names
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, msg: str, offset: int | None = None):
        raise ParseError(msg, self.tok[2] if offset is None else offset, self.text)

    def accept(self, value: str) -> bool:
        if self.tok[0] == "op" and self.tok[1] == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str):
        if not self.accept(value):
            got = self.tok[1] or "end of input"
            self.error(f"expected {value!r}, got {got!r}")

    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self.accept("+"):
                node = Add(node, self.term())
            elif self.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            if self.accept("*"):
                node = Mul(node, self.unary())
            elif self.accept("/"):
                node = Div(node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.i += 1
            k = self.exponent()
            if k == 0:
                return Const(1.0)
            if k == 1:
                return base
            return Pow(base, k)
        return base

    def exponent(self) -> int:
        # right-associative chain of integer literals: 2^3^2 == 2^9
        kind, value, offset = self.tok
        if kind == "op" and value == "-":
            self.error("negative exponent")
        if kind != "num":
            self.error("integer exponent expected")
        if not re.fullmatch(r"\d+", value):
            self.error(f"non-integer exponent {value!r}")
        self.i += 1
        k = int(value)
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.i += 1
            k = k ** self.exponent()
        return k

    def atom(self) -> Expr:
        kind, value, offset = self.tok
        if kind == "num":
            self.i += 1
            return Const(float(value))
        if kind == "name":
            self.i += 1
            if value == "sqrt" and self.tok[1] == "(":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Sqrt(arg)
            if value not in self.names:
                raise ParseError(f"undeclared variable {value!r}", offset, self.text)
            return Var(self.names[value], value)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        got = value or "end of input"
        self.error(f"unexpected {got!r}")


def _names_map(names) -> dict[str, int]:
    if isinstance(names, Mapping):
        return dict(names)
    return {name: i for i, name in enumerate(names)}


def parse(text: str, names) -> Expr:
    """Parse a formula; ``names`` is a sequence of variable names (or a name->index map)."""
    p = _Parser(text, _names_map(names))
    node = p.expr()
    if p.tok[0] != "end":
        p.error(f"unexpected {p.tok[1]!r}")
    return node


def parse_constraint(text: str, names, name: str = "") -> Constraint:
    """Parse ``lo <= f <= hi``, ``lhs = rhs``, ``lhs <= rhs`` or ``lhs >= rhs``.

    A side that is a numeric literal becomes a bound; otherwise the body is
    ``lhs - rhs`` compared against zero.
    """
    p = _Parser(text, _names_map(names))
    parts = [p.expr()]
    rels = []
    while p.tok[0] == "op" and p.tok[1] in ("=", "<=", ">=", "<", ">"):
        rel = p.tok[1]
        if rel in ("<", ">"):
            p.error(f"strict relation {rel!r} not supported, use {rel}=")
        rels.append(rel)
        p.i += 1
        parts.append(p.expr())
    if p.tok[0] != "end":
        p.error(f"unexpected {p.tok[1]!r}")
    if not rels:
        raise ParseError("constraint needs a relation (=, <=, >=)", len(text), text)

    if len(rels) == 2:
        if rels[0] != rels[1] or rels[0] == "=":
            raise ParseError("double relation must be lo <= f <= hi or hi >= f >= lo", 0, text)
        lo, body, hi = parts
        if rels[0] == ">=":
            lo, hi = hi, lo
        lo_v, hi_v = _literal(lo), _literal(hi)
        if lo_v is None or hi_v is None:
            raise ParseError("bounds of a double relation must be numbers", 0, text)
        return Constraint(body, Interval(lo_v, hi_v), name)
    if len(rels) > 2:
        raise ParseError("too many relations", 0, text)

    (rel,) = rels
    lhs, rhs = parts
    rv = _literal(rhs)
    lv = _literal(lhs)
    if rv is not None:
        body, v = lhs, rv
    elif lv is not None:
        body, v = rhs, lv
        rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
    else:
        body, v = Sub(lhs, rhs), 0.0
    if rel == "=":
        bounds = Interval(v)
    elif rel == "<=":
        bounds = Interval(-math.inf, v)
    else:
        bounds = Interval(v, math.inf)
    return Constraint(body, bounds, name)


def _literal(e: Expr) -> float | None:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Neg) and isinstance(e.arg, Const):
        return -e.arg.value
    return None


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def to_text(e: Expr, names: Sequence[str] | None = None) -> str:
    """Render ``e`` so that :func:`parse` gives back the same tree."""
    if isinstance(e, Const):
        s = ia.fmt_float(e.value) if math.isfinite(e.value) else repr(e.value)
        if e.value < 0 or s.startswith("-"):
            return f"({s})"
        return s
    if isinstance(e, Var):
        return names[e.index] if names is not None else (e.name or f"v{e.index}")
    if isinstance(e, Sqrt):
        return f"sqrt({to_text(e.arg, names)})"
    if isinstance(e, Neg):
        inner = to_text(e.arg, names)
        if _PREC.get(type(e.arg), 5) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Pow):
        base = to_text(e.base, names)
        if _PREC.get(type(e.base), 5) <= 4:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    prec = _PREC[type(e)]
    sym = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
    left = to_text(e.left, names)
    right = to_text(e.right, names)
    if _PREC.get(type(e.left), 5) < prec:
        left = f"({left})"
    # left-associative: a right operand of equal precedence needs parentheses
    if _PREC.get(type(e.right), 5) <= prec:
        right = f"({right})"
    return f"{left} {sym} {right}"
