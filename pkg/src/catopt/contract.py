"""Contractors and the propagation loop.

A contractor maps a box to a sub-box without losing any point that
satisfies its constraint. :func:`hc4_revise` handles one arithmetic
constraint, :func:`clutch` one catalog constraint, and :func:`fixed_point`
runs a set of them until no variable shrinks noticeably anymore.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Callable, Sequence

from . import interval as ia
from .catalog import CatalogConstraint, items_in_box
from .expr import (Add, Const, Constraint, Div, Expr, Mul, Neg, Pow, Sqrt, Sub, Var,
                   eval_interval, variables)
from .interval import EMPTY, Interval, box_is_empty, empty_box


# ---------------------------------------------------------------------------
# HC4Revise
# ---------------------------------------------------------------------------

def _forward(e: Expr, box, memo: dict) -> Interval:
    if isinstance(e, Var):
        v = box[e.index]
    elif isinstance(e, Const):
        v = Interval(e.value)
    elif isinstance(e, Add):
        v = ia.add(_forward(e.left, box, memo), _forward(e.right, box, memo))
    elif isinstance(e, Sub):
        v = ia.sub(_forward(e.left, box, memo), _forward(e.right, box, memo))
    elif isinstance(e, Mul):
        v = ia.mul(_forward(e.left, box, memo), _forward(e.right, box, memo))
    elif isinstance(e, Div):
        v = ia.div(_forward(e.left, box, memo), _forward(e.right, box, memo))
    elif isinstance(e, Pow):
        v = ia.ipow(_forward(e.base, box, memo), e.exponent)
    elif isinstance(e, Neg):
        v = ia.neg(_forward(e.arg, box, memo))
    elif isinstance(e, Sqrt):
        v = ia.sqrt(_forward(e.arg, box, memo))
    else:
        raise TypeError(f"not an expression node: {e!r}")
    memo[id(e)] = v
    return v


def _backward(e: Expr, target: Interval, box: list, memo: dict) -> bool:
    """Push ``target`` down to the leaves; False once something became empty."""
    if target.is_empty():
        return False
    if isinstance(e, Var):
        v = ia.intersect(box[e.index], target)
        box[e.index] = v
        return not v.is_empty()
    if isinstance(e, Const):
        return target.lo <= e.value <= target.hi
    if isinstance(e, (Add, Sub, Mul, Div)):
        kind = {Add: "add", Sub: "sub", Mul: "mul", Div: "div"}[type(e)]
        a, b = ia.project_inverse(kind, target, memo[id(e.left)], memo[id(e.right)])
        return _backward(e.left, a, box, memo) and _backward(e.right, b, box, memo)
    if isinstance(e, Pow):
        (a,) = ia.project_inverse("pow", target, memo[id(e.base)], exponent=e.exponent)
        return _backward(e.base, a, box, memo)
    if isinstance(e, Neg):
        (a,) = ia.project_inverse("neg", target, memo[id(e.arg)])
        return _backward(e.arg, a, box, memo)
    if isinstance(e, Sqrt):
        (a,) = ia.project_inverse("sqrt", target, memo[id(e.arg)])
        return _backward(e.arg, a, box, memo)
    raise TypeError(f"not an expression node: {e!r}")


def hc4_revise(c: Constraint, box: Sequence[Interval]) -> tuple[Interval, ...]:
    """Bottom-up interval evaluation, then top-down projection of ``c.bounds``."""
    n = len(box)
    if box_is_empty(box):
        return empty_box(n)
    memo: dict = {}
    root = _forward(c.body, box, memo)
    target = ia.intersect(root, c.bounds)
    out = list(box)
    if not _backward(c.body, target, out, memo):
        return empty_box(n)
    return tuple(out)


# ---------------------------------------------------------------------------
# CLUTCH
# ---------------------------------------------------------------------------

def clutch(cc: CatalogConstraint, box: Sequence[Interval]) -> tuple[Interval, ...]:
    """Replace the bound property sub-box by the hull of the catalog items inside it."""
    n = len(box)
    if box_is_empty(box):
        return empty_box(n)
    inside = items_in_box(cc.catalog, cc.sub_box(box))
    if not inside:
        return empty_box(n)
    hull = ia.empty_box(len(cc.indices))
    for _, item in inside:
        hull = ia.box_hull(hull, item)
    out = list(box)
    for i, iv in zip(cc.indices, hull):
        out[i] = iv
    return tuple(out)


# ---------------------------------------------------------------------------
# contractor objects and the propagation loop
# ---------------------------------------------------------------------------

class Contractor:
    """A named contraction operator together with the variables it reads and narrows."""

    kind = "?"
    #: jumps ahead of the FIFO when re-awakened
    priority = False
    #: re-awakens itself after a contraction
    self_wake = True

    def __init__(self, label: str, variables: frozenset[int]):
        self.label = label
        self.variables = variables

    @property
    def tag(self) -> str:
        return f"{self.kind}({self.label})"

    def __call__(self, box):
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.tag}>"


class HC4(Contractor):
    kind = "HC4"

    def __init__(self, constraint: Constraint, label: str | None = None):
        super().__init__(label or constraint.name or "c", variables(constraint.body))
        self.constraint = constraint

    def __call__(self, box):
        return hc4_revise(self.constraint, box)


class ObjectiveCut(HC4):
    """HC4Revise on ``objective <= bound``; the dynamic constraint of the search."""

    kind = "OBJ-CUT"

    def __init__(self, objective: Expr, bound: float):
        super().__init__(Constraint(objective, Interval(float("-inf"), bound), "f"), "f")
        self.bound = bound

    @property
    def tag(self) -> str:
        return self.kind


class Clutch(Contractor):
    kind = "CLUTCH"
    priority = True
    # CLUTCH is idempotent
    self_wake = False

    def __init__(self, cc: CatalogConstraint, label: str | None = None):
        super().__init__(label or cc.name or cc.catalog.name, frozenset(cc.indices))
        self.cc = cc

    def __call__(self, box):
        return clutch(self.cc, box)


def _contracted(before, after, tau: float) -> set[int]:
    out = set()
    for i, (a, b) in enumerate(zip(before, after)):
        if a == b:
            continue
        wa, wb = ia.width(a), ia.width(b)
        if b.is_empty() or (ia.is_point(b) and not ia.is_point(a)):
            out.add(i)
        elif wa == float("inf"):
            if wb < wa:
                out.add(i)
        elif wa - wb > tau * wa:
            out.add(i)
    return out


def iteration_budget(m: int, tau: float) -> int:
    """``10 * m * ceil(-log10 tau)`` applications: ten sweeps per decade of threshold."""
    return 10 * max(1, m) * max(1, math.ceil(-math.log10(tau)))


def fixed_point(contractors: Sequence[Contractor], box: Sequence[Interval], *,
                tau: float = 1e-3,
                max_iterations: int | None = None,
                on_apply: Callable | None = None) -> tuple[Interval, ...]:
    """Propagate ``contractors`` over ``box`` until quiescence.

    The awake set starts with every contractor in order and is served FIFO.
    After a contraction, the contractors that read a variable whose width
    dropped by more than ``tau`` (relative), or that became a point, are
    re-awakened; catalog contractors go to the front of the queue so that a
    property range is matched against the catalog as soon as it shrinks.

    ``on_apply(contractor, before, after)`` is called after every application.
    ``max_iterations`` (default :func:`iteration_budget`) caps the applications;
    stopping early is sound since every intermediate box is a valid enclosure.
    """
    box = tuple(box)
    n = len(box)
    if box_is_empty(box):
        return empty_box(n)
    if max_iterations is None:
        max_iterations = iteration_budget(len(contractors), tau)
    queue = deque(contractors)
    queued = set(map(id, contractors))
    iterations = 0
    while queue and iterations < max_iterations:
        ctc = queue.popleft()
        queued.discard(id(ctc))
        iterations += 1
        new = ctc(box)
        if on_apply is not None:
            on_apply(ctc, box, new)
        if box_is_empty(new):
            return empty_box(n)
        if new == box:
            continue
        changed = _contracted(box, new, tau)
        box = new
        if not changed:
            continue
        front = []
        for other in contractors:
            if other is ctc and not ctc.self_wake:
                continue
            if other.variables.isdisjoint(changed):
                continue
            if other.priority:
                front.append(other)
            elif id(other) not in queued:
                queue.append(other)
                queued.add(id(other))
        for other in reversed(front):
            if id(other) in queued:
                queue.remove(other)
            queue.appendleft(other)
            queued.add(id(other))
    return box
