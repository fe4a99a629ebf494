"""Outward-rounded interval arithmetic on IEEE doubles.

Endpoints are computed in round-to-nearest and then stepped one ulp
outward only when the operation was inexact. Exactness of + and * is
detected with error-free transformations; division and roots fall back
to exact rational comparisons. Results that are exactly representable
(every value in the worked examples of this package) therefore come out
bit-identical to the mathematical result, while inexact ones are always
enclosed.

A box is a plain tuple of :class:`Interval`, one per problem variable.
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction
from typing import Iterable, Sequence

INF = math.inf

# Dekker splitting constant and the safe range for error-free products.
_SPLITTER = 134217729.0
_MUL_SAFE_HI = 1e290
_MUL_SAFE_LO = 1e-280


class Interval:
    """Closed interval ``[lo, hi]`` with possibly infinite endpoints.

    The empty set is the interval with ``lo > hi`` (canonically
    ``[+inf, -inf]``); use :data:`EMPTY` or :meth:`is_empty`.
    Instances are treated as immutable.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if lo != lo or hi != hi:
            raise ValueError("NaN interval endpoint")
        if lo > hi or lo == INF or hi == -INF:
            lo, hi = INF, -INF
        else:
            # -0.0 + 0.0 == +0.0, so zero endpoints print and hash uniformly
            lo += 0.0
            hi += 0.0
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    def is_empty(self) -> bool:
        return self.lo > self.hi

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        if self.is_empty():
            return "Interval.empty()"
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self) -> str:
        if self.is_empty():
            return "EMPTY"
        return f"[{fmt_float(self.lo)},{fmt_float(self.hi)}]"

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __contains__(self, v: float) -> bool:
        return contains(self, v)

    @classmethod
    def empty(cls) -> "Interval":
        return EMPTY

    # operator sugar for tests and interactive use
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k: int):
        return ipow(self, k)

    def __and__(self, other):
        return intersect(self, other)

    def __or__(self, other):
        return hull(self, other)


EMPTY = Interval(INF, -INF)
ENTIRE = Interval(-INF, INF)
ZERO = Interval(0.0)


def _coerce(v) -> Interval:
    return v if isinstance(v, Interval) else Interval(v)


def fmt_float(v: float) -> str:
    """Shortest decimal that round-trips ``v``; integral values lose the ``.0``."""
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


# ---------------------------------------------------------------------------
# directed rounding of scalar operations
# ---------------------------------------------------------------------------

def _down(v: float) -> float:
    return math.nextafter(v, -INF)


def _up(v: float) -> float:
    return math.nextafter(v, INF)


def _add_err(a: float, b: float, s: float) -> float:
    # TwoSum; exact for finite a, b, s
    bp = s - a
    ap = s - bp
    return (a - ap) + (b - bp)


def add_down(a: float, b: float) -> float:
    s = a + b
    if math.isinf(s):
        if math.isinf(a) or math.isinf(b):
            return s
        return _down(s) if s > 0 else s
    return _down(s) if _add_err(a, b, s) < 0 else s


def add_up(a: float, b: float) -> float:
    s = a + b
    if math.isinf(s):
        if math.isinf(a) or math.isinf(b):
            return s
        return _up(s) if s < 0 else s
    return _up(s) if _add_err(a, b, s) > 0 else s


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _mul_err_sign(a: float, b: float, p: float) -> int:
    """Sign of the exact a*b - p."""
    ap = abs(p)
    if _MUL_SAFE_LO < ap < _MUL_SAFE_HI and abs(a) < _MUL_SAFE_HI and abs(b) < _MUL_SAFE_HI:
        ah, al = _split(a)
        bh, bl = _split(b)
        err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
        return (err > 0) - (err < 0)
    exact = Fraction(a) * Fraction(b)
    fp = Fraction(p)
    return (exact > fp) - (exact < fp)


def mul_down(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if math.isinf(p):
        if math.isinf(a) or math.isinf(b):
            return p
        return _down(p) if p > 0 else p
    return _down(p) if _mul_err_sign(a, b, p) < 0 else p


def mul_up(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if math.isinf(p):
        if math.isinf(a) or math.isinf(b):
            return p
        return _up(p) if p < 0 else p
    return _up(p) if _mul_err_sign(a, b, p) > 0 else p


def _div_cmp(a: float, b: float, q: float) -> int:
    """Sign of the exact a/b - q (finite a, nonzero finite b, finite q)."""
    p = q * b
    if (_MUL_SAFE_LO < abs(a) < _MUL_SAFE_HI and _MUL_SAFE_LO < abs(b) < _MUL_SAFE_HI
            and _MUL_SAFE_LO < abs(q) < _MUL_SAFE_HI and _MUL_SAFE_LO < abs(p) < _MUL_SAFE_HI):
        # q*b == p + err exactly (TwoProduct); a - p is exact since p is within
        # an ulp or two of a; the sign of a float difference is always right
        qh, ql = _split(q)
        bh, bl = _split(b)
        err = ((qh * bh - p) + qh * bl + ql * bh) + ql * bl
        r = (a - p) - err
        s = (r > 0) - (r < 0)
        return s if b > 0 else -s
    exact = Fraction(a) / Fraction(b)
    fq = Fraction(q)
    return (exact > fq) - (exact < fq)


def div_down(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    if math.isinf(b):
        return 0.0 if not math.isinf(a) else (INF if (a > 0) == (b > 0) else -INF)
    q = a / b
    if math.isinf(a):
        return q
    if math.isinf(q):
        return _down(q) if q > 0 else q
    if q == 0.0:
        # underflow to zero; the exact quotient has the sign of a/b
        return -5e-324 if (a > 0) != (b > 0) else 0.0
    return _down(q) if _div_cmp(a, b, q) < 0 else q


def div_up(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    if math.isinf(b):
        return 0.0 if not math.isinf(a) else (INF if (a > 0) == (b > 0) else -INF)
    q = a / b
    if math.isinf(a):
        return q
    if math.isinf(q):
        return _up(q) if q < 0 else q
    if q == 0.0:
        return 5e-324 if (a > 0) == (b > 0) else 0.0
    return _up(q) if _div_cmp(a, b, q) > 0 else q


def _pow_pos_down(a: float, k: int) -> float:
    # a >= 0; each partial product is rounded down, so the result is a lower bound
    r = 1.0
    for _ in range(k):
        r = mul_down(r, a)
    return r


def _pow_pos_up(a: float, k: int) -> float:
    r = 1.0
    for _ in range(k):
        r = mul_up(r, a)
    return r


def pow_down(a: float, k: int) -> float:
    if a >= 0:
        return _pow_pos_down(a, k)
    if k % 2 == 0:
        return _pow_pos_down(-a, k)
    return -_pow_pos_up(-a, k)


def pow_up(a: float, k: int) -> float:
    if a >= 0:
        return _pow_pos_up(a, k)
    if k % 2 == 0:
        return _pow_pos_up(-a, k)
    return -_pow_pos_down(-a, k)


def _root_pos(v: float, k: int, upward: bool) -> float:
    """Directed-rounded k-th root of v >= 0."""
    if v == 0.0 or v == INF:
        return v
    r = math.sqrt(v) if k == 2 else v ** (1.0 / k)
    if r == 0.0:
        r = 5e-324
    fv = Fraction(v)
    if upward:
        while Fraction(r) ** k < fv:
            r = _up(r)
        while r > 0 and Fraction(_down(r)) ** k >= fv:
            r = _down(r)
    else:
        while Fraction(r) ** k > fv:
            r = _down(r)
        while Fraction(_up(r)) ** k <= fv:
            r = _up(r)
    return r


def root_down(v: float, k: int) -> float:
    if v < 0:
        return -_root_pos(-v, k, upward=True)
    return _root_pos(v, k, upward=False)


def root_up(v: float, k: int) -> float:
    if v < 0:
        return -_root_pos(-v, k, upward=False)
    return _root_pos(v, k, upward=True)


# ---------------------------------------------------------------------------
# interval operations
# ---------------------------------------------------------------------------

def _corner_hull(pairs, nearest, down, up) -> Interval:
    """Directed-rounded min/max over corner pairs.

    Round-to-nearest is monotone, so the exact extreme corner is among those
    whose nearest value is extreme; only those are re-rounded. ``nearest`` is
    None (or holds a NaN from 0*inf) when the shortcut does not apply.
    """
    if nearest is None or any(v != v for v in nearest):
        return Interval(min(down(x, y) for x, y in pairs), max(up(x, y) for x, y in pairs))
    lo, hi = min(nearest), max(nearest)
    return Interval(min(down(x, y) for (x, y), v in zip(pairs, nearest) if v == lo),
                    max(up(x, y) for (x, y), v in zip(pairs, nearest) if v == hi))


def add(a: Interval, b: Interval) -> Interval:
    if a.is_empty() or b.is_empty():
        return EMPTY
    return Interval(add_down(a.lo, b.lo), add_up(a.hi, b.hi))


def neg(a: Interval) -> Interval:
    if a.is_empty():
        return EMPTY
    return Interval(-a.hi, -a.lo)


def sub(a: Interval, b: Interval) -> Interval:
    if a.is_empty() or b.is_empty():
        return EMPTY
    return Interval(add_down(a.lo, -b.hi), add_up(a.hi, -b.lo))


def mul(a: Interval, b: Interval) -> Interval:
    if a.is_empty() or b.is_empty():
        return EMPTY
    pairs = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
    return _corner_hull(pairs, [x * y for x, y in pairs], mul_down, mul_up)


def div(a: Interval, b: Interval) -> Interval:
    """Enclosure of ``{x / y : x in a, y in b, y != 0}``.

    A divisor straddling zero yields a single (possibly unbounded)
    enclosing interval; dividing by exactly ``[0, 0]`` is empty.
    """
    if a.is_empty() or b.is_empty():
        return EMPTY
    if b.lo == 0.0 and b.hi == 0.0:
        return EMPTY
    if b.lo > 0 or b.hi < 0:
        pairs = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
        with_inf = math.isinf(b.lo) or math.isinf(b.hi)
        return _corner_hull(pairs, None if with_inf else [x / y for x, y in pairs], div_down, div_up)
    if a.lo <= 0 <= a.hi:
        return ENTIRE
    if b.lo < 0 < b.hi:
        return ENTIRE
    if b.lo == 0.0:
        # b = [0, bh], bh > 0
        if a.lo > 0:
            return Interval(div_down(a.lo, b.hi), INF)
        return Interval(-INF, div_up(a.hi, b.hi))
    # b = [bl, 0], bl < 0
    if a.lo > 0:
        return Interval(-INF, div_up(a.lo, b.lo))
    return Interval(div_down(a.hi, b.lo), INF)


def ipow(a: Interval, k: int) -> Interval:
    """``a ** k`` for an integer ``k >= 1``."""
    if k < 1:
        raise ValueError(f"exponent must be >= 1, got {k}")
    if a.is_empty():
        return EMPTY
    if k == 1:
        return a
    if k % 2 == 1 or a.lo >= 0:
        return Interval(pow_down(a.lo, k), pow_up(a.hi, k))
    if a.hi <= 0:
        return Interval(pow_down(a.hi, k), pow_up(a.lo, k))
    return Interval(0.0, pow_up(max(-a.lo, a.hi), k))


def root(a: Interval, k: int) -> Interval:
    """Principal k-th root; even roots only see the nonnegative part of ``a``."""
    if k < 1:
        raise ValueError(f"root order must be >= 1, got {k}")
    if a.is_empty():
        return EMPTY
    if k == 1:
        return a
    if k % 2 == 0:
        if a.hi < 0:
            return EMPTY
        return Interval(root_down(max(a.lo, 0.0), k), root_up(a.hi, k))
    return Interval(root_down(a.lo, k), root_up(a.hi, k))


def sqrt(a: Interval) -> Interval:
    return root(a, 2)


def intersect(a: Interval, b: Interval) -> Interval:
    return Interval(max(a.lo, b.lo), min(a.hi, b.hi))


def hull(a: Interval, b: Interval) -> Interval:
    if a.is_empty():
        return b
    if b.is_empty():
        return a
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def width(a: Interval) -> float:
    if a.is_empty():
        return 0.0
    return a.hi - a.lo


def midpoint(a: Interval) -> float:
    """A finite point of ``a``; for half-unbounded intervals a point near the finite end."""
    if a.is_empty():
        raise ValueError("midpoint of an empty interval")
    lo, hi = a.lo, a.hi
    if lo == -INF and hi == INF:
        raise ValueError("midpoint of an unbounded interval")
    if lo == -INF:
        return min(hi, -sys.float_info.max)
    if hi == INF:
        return max(lo, sys.float_info.max)
    m = 0.5 * lo + 0.5 * hi
    return min(max(m, lo), hi)


def mag(a: Interval) -> float:
    """Largest absolute value in ``a``."""
    if a.is_empty():
        return 0.0
    return max(abs(a.lo), abs(a.hi))


def contains(a: Interval, v: float) -> bool:
    return a.lo <= v <= a.hi


def is_point(a: Interval) -> bool:
    return a.lo == a.hi


def is_subset(a: Interval, b: Interval) -> bool:
    if a.is_empty():
        return True
    return b.lo <= a.lo and a.hi <= b.hi


# ---------------------------------------------------------------------------
# inverse projections
# ---------------------------------------------------------------------------

def mul_rel(r: Interval, b: Interval) -> Interval:
    """Hull of ``{x : exists y in b, x * y in r}``."""
    if r.is_empty() or b.is_empty():
        return EMPTY
    if r.lo <= 0 <= r.hi and b.lo <= 0 <= b.hi:
        return ENTIRE
    return div(r, b)


def project_inverse(kind: str, result: Interval, *operands: Interval,
                    exponent: int | None = None) -> tuple[Interval, ...]:
    """Contract the operands of ``kind`` knowing the result lies in ``result``.

    ``kind`` is one of ``add``, ``sub``, ``mul``, ``div``, ``neg``, ``pow``
    (requires ``exponent``) or ``sqrt``. Returns the contracted operands in
    the same order; any empty component means the relation is unsatisfiable.
    """
    if kind == "add":
        a, b = operands
        a2 = intersect(a, sub(result, b))
        b2 = intersect(b, sub(result, a2))
        return a2, b2
    if kind == "sub":
        a, b = operands
        a2 = intersect(a, add(result, b))
        b2 = intersect(b, sub(a2, result))
        return a2, b2
    if kind == "mul":
        a, b = operands
        a2 = intersect(a, mul_rel(result, b))
        b2 = intersect(b, mul_rel(result, a2))
        return a2, b2
    if kind == "div":
        a, b = operands
        # b == [0, 0] leaves no admissible quotient at all
        if b.lo == 0.0 and b.hi == 0.0:
            return EMPTY, EMPTY
        a2 = intersect(a, mul(result, b))
        b2 = intersect(b, mul_rel(a2, result))
        return a2, b2
    if kind == "neg":
        (a,) = operands
        return (intersect(a, neg(result)),)
    if kind == "pow":
        (a,) = operands
        k = exponent
        if k is None:
            raise ValueError("pow projection needs an exponent")
        if k % 2 == 1:
            return (intersect(a, root(result, k)),)
        r = intersect(result, Interval(0.0, INF))
        if r.is_empty():
            return (EMPTY,)
        outer = root_up(r.hi, k)
        inner = root_down(r.lo, k)
        pos = intersect(a, Interval(inner, outer))
        negb = intersect(a, Interval(-outer, -inner))
        return (hull(negb, pos),)
    if kind == "sqrt":
        (a,) = operands
        r = intersect(result, Interval(0.0, INF))
        if r.is_empty():
            return (EMPTY,)
        return (intersect(a, Interval(pow_down(r.lo, 2), pow_up(r.hi, 2))),)
    raise ValueError(f"unknown operation {kind!r}")


# ---------------------------------------------------------------------------
# boxes
# ---------------------------------------------------------------------------

Box = tuple  # tuple[Interval, ...]


def make_box(bounds: Iterable) -> tuple[Interval, ...]:
    return tuple(b if isinstance(b, Interval) else Interval(*b) for b in bounds)


def empty_box(n: int) -> tuple[Interval, ...]:
    return (EMPTY,) * n


def box_is_empty(box: Sequence[Interval]) -> bool:
    return any(iv.is_empty() for iv in box)


def box_intersect(a: Sequence[Interval], b: Sequence[Interval]) -> tuple[Interval, ...]:
    return tuple(intersect(x, y) for x, y in zip(a, b, strict=True))


def box_hull(box: Sequence[Interval], point: Sequence[float]) -> tuple[Interval, ...]:
    """Smallest box containing ``box`` and ``point`` (an empty box is the identity)."""
    if box_is_empty(box):
        return tuple(Interval(v) for v in point)
    return tuple(hull(iv, Interval(v)) for iv, v in zip(box, point, strict=True))


def box_is_subset(a: Sequence[Interval], b: Sequence[Interval]) -> bool:
    if box_is_empty(a):
        return True
    return all(is_subset(x, y) for x, y in zip(a, b, strict=True))


def box_contains(box: Sequence[Interval], point: Sequence[float]) -> bool:
    return all(iv.lo <= v <= iv.hi for iv, v in zip(box, point, strict=True))


def box_midpoint(box: Sequence[Interval]) -> tuple[float, ...]:
    return tuple(midpoint(iv) for iv in box)


def box_str(box: Sequence[Interval]) -> str:
    if box_is_empty(box):
        return "EMPTY"
    return "x".join(str(iv) for iv in box)
