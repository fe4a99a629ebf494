import math
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from catopt import interval as ia
from catopt.interval import EMPTY, ENTIRE, Interval


def I(lo, hi=None):
    return Interval(lo, hi)


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def intervals(draw, elements=finite):
    a, b = draw(elements), draw(elements)
    return Interval(min(a, b), max(a, b))


@st.composite
def interval_and_point(draw, elements=finite):
    iv = draw(intervals(elements))
    t = draw(st.floats(0, 1))
    p = iv.lo + t * (iv.hi - iv.lo)
    return iv, min(max(p, iv.lo), iv.hi)


# -- examples ---------------------------------------------------------------

def test_add_example():
    assert ia.add(I(1, 2), I(3, 4)) == I(4, 6)


def test_square_example():
    assert ia.ipow(I(-10, 10), 2) == I(0, 100)


def test_mul_by_constant_example():
    assert ia.mul(I(2), I(0, 20)) == I(0, 40)


def test_intersect_examples():
    assert ia.intersect(I(0, 40), I(-100, 16)) == I(0, 16)
    assert ia.intersect(I(1, 2), I(3, 4)).is_empty()
    assert ia.intersect(I(0, 8), I(0, 8)) == I(0, 8)


def test_hull_examples():
    assert ia.hull(EMPTY, I(3)) == I(3, 3)
    assert ia.hull(I(0, 1), I(5, 6)) == I(0, 6)
    box = ia.box_hull(ia.box_hull(ia.empty_box(2), (3, 2)), (7, -3))
    assert box == (I(3, 7), I(-3, 2))


def test_inverse_examples():
    assert ia.project_inverse("pow", I(0, 16), I(-10, 10), exponent=2) == (I(-4, 4),)
    assert ia.project_inverse("mul", I(0, 16), I(2), I(0, 20))[1] == I(0, 8)
    z, w = ia.project_inverse("sub", I(0, 16), I(0, 16), I(0, 100))
    assert (z, w) == (I(0, 16), I(0, 16))


def test_scalar_helpers():
    assert ia.width(I(3, 7)) == 4
    assert ia.midpoint(I(6, 16)) == 11
    assert ia.contains(I(-3, 2), 2)
    assert ia.is_point(I(3, 3)) and not ia.is_point(I(3, 4))
    assert ia.width(I(0, math.inf)) == math.inf


def test_midpoint_errors():
    with pytest.raises(ValueError):
        ia.midpoint(EMPTY)
    with pytest.raises(ValueError):
        ia.midpoint(ENTIRE)
    assert math.isfinite(ia.midpoint(I(0, math.inf)))
    assert math.isfinite(ia.midpoint(I(-math.inf, 3)))


def test_empty_is_absorbing():
    for op in (ia.add, ia.sub, ia.mul, ia.div):
        assert op(EMPTY, I(1, 2)).is_empty()
        assert op(I(1, 2), EMPTY).is_empty()
    assert ia.neg(EMPTY).is_empty()
    assert ia.ipow(EMPTY, 3).is_empty()
    assert ia.root(EMPTY, 3).is_empty()


def test_no_nan_and_signed_zero_normalised():
    with pytest.raises(ValueError):
        Interval(float("nan"), 1)
    z = ia.neg(I(0, 0))
    assert math.copysign(1, z.lo) == 1 and str(z) == "[0,0]"
    # 0 * inf must not produce NaN endpoints
    r = ia.mul(I(0, 1), I(0, math.inf))
    assert r == I(0, math.inf)


def test_division_through_zero():
    assert ia.div(I(1, 2), I(-1, 1)) == ENTIRE
    assert ia.div(I(1, 2), I(0, 4)) == I(0.25, math.inf)
    assert ia.div(I(-2, -1), I(0, 4)) == I(-math.inf, -0.25)
    assert ia.div(I(1, 2), I(-4, 0)) == I(-math.inf, -0.25)
    assert ia.div(I(-1, 2), I(0, 4)) == ENTIRE
    assert ia.div(I(1, 2), I(0, 0)).is_empty()


def test_inexact_results_are_widened():
    third = ia.div(I(1), I(3))
    assert third.lo < third.hi
    assert Fraction(third.lo) < Fraction(1, 3) < Fraction(third.hi)
    tenth = ia.add(I(0.1), I(0.2))
    assert Fraction(tenth.lo) <= Fraction(0.1) + Fraction(0.2) <= Fraction(tenth.hi)
    assert tenth.lo < tenth.hi


def test_roots():
    assert ia.root(I(8, 27), 3) == I(2, 3)
    assert ia.root(I(-8, 27), 3) == I(-2, 3)
    assert ia.sqrt(I(4, 9)) == I(2, 3)
    assert ia.sqrt(I(-4, -1)).is_empty()
    r = ia.root(I(2), 2)
    assert Fraction(r.lo) ** 2 < 2 < Fraction(r.hi) ** 2
    assert math.nextafter(r.lo, math.inf) == r.hi


def test_pow_projection_excludes_gap():
    # y^2 in [4, 9] with y in [-10, 1] leaves only the negative branch
    (y,) = ia.project_inverse("pow", I(4, 9), I(-10, 1), exponent=2)
    assert y == I(-3, -2)
    (y,) = ia.project_inverse("pow", I(-5, -1), I(-10, 10), exponent=2)
    assert y.is_empty()


def test_mul_projection_with_zero():
    # x * 0 in [0, 0] says nothing about x
    a, b = ia.project_inverse("mul", I(0), I(-5, 5), I(0))
    assert a == I(-5, 5) and b == I(0)
    a, b = ia.project_inverse("mul", I(1, 2), I(-5, 5), I(0))
    assert a.is_empty()


# -- properties -------------------------------------------------------------

def _exact(op, a, b):
    fa, fb = Fraction(a), Fraction(b)
    if op == "add":
        return fa + fb
    if op == "sub":
        return fa - fb
    if op == "mul":
        return fa * fb
    return fa / fb


@settings(max_examples=300, deadline=None)
@given(interval_and_point(), interval_and_point(), st.sampled_from(["add", "sub", "mul", "div"]))
def test_containment_exact(pa, pb, op):
    (A, a), (B, b) = pa, pb
    if op == "div":
        assume(b != 0)
    R = {"add": ia.add, "sub": ia.sub, "mul": ia.mul, "div": ia.div}[op](A, B)
    v = _exact(op, a, b)
    assert R.lo == -math.inf or Fraction(R.lo) <= v
    assert R.hi == math.inf or v <= Fraction(R.hi)


def _to_float(v: Fraction) -> float:
    try:
        return float(v)
    except OverflowError:
        return math.inf if v > 0 else -math.inf


@settings(max_examples=300, deadline=None)
@given(intervals(), intervals(), st.sampled_from(["add", "sub", "mul", "div"]))
def test_outward_rounding_never_inside(A, B, op):
    # endpoints never lie strictly inside the exact result interval
    if op == "div":
        assume(not (B.lo <= 0 <= B.hi))
    R = {"add": ia.add, "sub": ia.sub, "mul": ia.mul, "div": ia.div}[op](A, B)
    corners = [_exact(op, a, b) for a in (A.lo, A.hi) for b in (B.lo, B.hi)]
    assert R.lo == -math.inf or Fraction(R.lo) <= min(corners)
    assert R.hi == math.inf or Fraction(R.hi) >= max(corners)
    # and they are tight to one ulp
    assert R.lo >= math.nextafter(_to_float(min(corners)), -math.inf)
    assert R.hi <= math.nextafter(_to_float(max(corners)), math.inf)


@settings(max_examples=200, deadline=None)
@given(interval_and_point(st.floats(-1e3, 1e3)), st.integers(2, 5))
def test_pow_and_root_containment(pa, k):
    A, a = pa
    P = ia.ipow(A, k)
    v = Fraction(a) ** k
    assert Fraction(P.lo) <= v <= Fraction(P.hi)
    if k % 2 == 1 or a >= 0:
        R = ia.root(Interval(a), k)
        # R encloses the real root r of a: R.lo^k <= a <= R.hi^k
        assert Fraction(R.lo) ** k <= Fraction(a) <= Fraction(R.hi) ** k


@settings(max_examples=300, deadline=None)
@given(intervals(), intervals(), intervals())
def test_lattice_laws(a, b, c):
    assert ia.intersect(a, b) == ia.intersect(b, a)
    assert ia.hull(a, b) == ia.hull(b, a)
    assert ia.intersect(ia.intersect(a, b), c) == ia.intersect(a, ia.intersect(b, c))
    assert ia.hull(ia.hull(a, b), c) == ia.hull(a, ia.hull(b, c))
    assert ia.intersect(a, a) == a and ia.hull(a, a) == a
    assert ia.is_subset(ia.intersect(a, b), a)


OPS2 = ["add", "sub", "mul", "div"]


@settings(max_examples=300, deadline=None)
@given(interval_and_point(), interval_and_point(), intervals(), st.sampled_from(OPS2))
def test_projection_soundness(pa, pb, slack, op):
    (A, a), (B, b) = pa, pb
    if op == "div":
        assume(b != 0)
    v = _exact(op, a, b)
    # a result interval that contains the exact value a op b
    lo = min(float(v), slack.lo) if slack.lo < float(v) else float(v)
    R = Interval(math.nextafter(lo, -math.inf), math.nextafter(max(float(v), slack.hi), math.inf))
    assume(Fraction(R.lo) <= v <= Fraction(R.hi))
    A2, B2 = ia.project_inverse(op, R, A, B)
    assert ia.contains(A2, a)
    assert ia.contains(B2, b)


@settings(max_examples=200, deadline=None)
@given(interval_and_point(), st.integers(2, 4), st.floats(0, 50))
def test_pow_projection_soundness(pa, k, pad):
    A, a = pa
    v = Fraction(a) ** k
    R = Interval(math.nextafter(float(v), -math.inf) - pad, math.nextafter(float(v), math.inf) + pad)
    (A2,) = ia.project_inverse("pow", R, A, exponent=k)
    assert ia.contains(A2, a)


def test_containment_random_sweep():
    rng = random.Random(7)
    for _ in range(2000):
        lo, hi = sorted(rng.uniform(-50, 50) for _ in range(2))
        A = Interval(lo, hi)
        a = rng.uniform(lo, hi)
        lo, hi = sorted(rng.uniform(-50, 50) for _ in range(2))
        B = Interval(lo, hi)
        b = rng.uniform(lo, hi)
        for op in OPS2:
            if op == "div" and b == 0:
                continue
            R = {"add": ia.add, "sub": ia.sub, "mul": ia.mul, "div": ia.div}[op](A, B)
            v = _exact(op, a, b)
            assert (R.lo == -math.inf or Fraction(R.lo) <= v) and (R.hi == math.inf or v <= Fraction(R.hi))
