"""Spatial branch and bound over continuous and catalog-property variables.

Each extracted node goes through: inherited-bound test, lower bounding,
filtering (HC4Revise on every constraint, CLUTCH on every catalog
constraint and the objective cut ``f <= f_best - epsilon``, run to a fixed
point), emptiness test, upper bounding, branching, CLUTCH on each child
and insertion. When upper bounding improves ``f_best`` the tightened cut
is applied to the same node right away, so filtering and upper bounding
alternate until the incumbent stops improving.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import interval as ia
from .catalog import CatalogConstraint, items_in_box
from .contract import HC4, Clutch, Contractor, ObjectiveCut, fixed_point
from .expr import Constraint, Expr, eval_interval, gradient_interval, variables
from .interval import INF, Interval, box_is_empty
from .trace import TraceEvent

EXPLORE = ("best", "depth", "breadth")
BRANCHING = ("largest", "roundrobin", "smear")
UPPER_BOUNDING = ("enumerate", "assigned")


@dataclass
class Problem:
    """Minimize ``objective`` over ``box`` subject to ``constraints`` and ``catalogs``.

    Variables ``0 .. n_continuous-1`` are continuous, the rest are catalog
    properties.
    """

    names: tuple[str, ...]
    box: tuple[Interval, ...]
    objective: Expr
    constraints: list[Constraint] = field(default_factory=list)
    catalogs: list[CatalogConstraint] = field(default_factory=list)
    n_continuous: int | None = None

    def __post_init__(self):
        self.names = tuple(self.names)
        self.box = ia.make_box(self.box)
        n = len(self.names)
        if len(self.box) != n:
            raise ValueError(f"{n} variable names but a box of dimension {len(self.box)}")
        if len(set(self.names)) != n:
            raise ValueError("duplicate variable name")
        for name, iv in zip(self.names, self.box):
            if iv.is_empty() or not (math.isfinite(iv.lo) and math.isfinite(iv.hi)):
                raise ValueError(f"domain of {name!r} must be finite and non-empty, got {iv}")
        if self.n_continuous is None:
            bound = {i for cc in self.catalogs for i in cc.indices}
            self.n_continuous = min(bound) if bound else n
        exprs = [self.objective] + [c.body for c in self.constraints]
        for e in exprs:
            bad = [i for i in variables(e) if not 0 <= i < n]
            if bad:
                raise ValueError(f"expression refers to variable index {bad[0]} outside 0..{n - 1}")
        seen: set[int] = set()
        for cc in self.catalogs:
            for i in cc.indices:
                if not self.n_continuous <= i < n:
                    raise ValueError(f"catalog {cc.catalog.name!r} binds {self.names[i]!r}, "
                                     "which is not a property variable")
                if i in seen:
                    raise ValueError(f"variable {self.names[i]!r} bound by two catalogs")
                seen.add(i)

    @property
    def dimension(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass
class SolverConfig:
    epsilon: float = 1e-6
    explore: str = "best"
    branch: str = "largest"
    #: variable names branched on first, one per branching, before ``branch`` takes over
    branch_override: tuple[str, ...] = ()
    #: "enumerate": try item tuples at every node; "assigned": only once every
    #: catalog constraint is down to a single item
    upper_bounding: str = "enumerate"
    tau_fp: float = 1e-3
    tol_feas: float = 1e-8
    eps_branch: float = 1e-9
    max_ub_tuples: int = 64
    #: filter/upper-bound rounds per node; each improvement tightens the cut and
    #: re-filters, but on a continuous slope that would crawl by epsilon steps
    ub_rounds: int = 8
    max_nodes: int = 100_000
    time_limit: float | None = None

    def __post_init__(self):
        for attr in ("epsilon", "tau_fp", "tol_feas", "eps_branch"):
            if not getattr(self, attr) > 0:
                raise ValueError(f"{attr} must be positive")
        if self.explore not in EXPLORE:
            raise ValueError(f"explore must be one of {EXPLORE}")
        if self.branch not in BRANCHING:
            raise ValueError(f"branch must be one of {BRANCHING}")
        if self.upper_bounding not in UPPER_BOUNDING:
            raise ValueError(f"upper_bounding must be one of {UPPER_BOUNDING}")
        if self.max_nodes < 1 or self.max_ub_tuples < 1 or self.ub_rounds < 1:
            raise ValueError("limits must be positive")
        self.branch_override = tuple(self.branch_override)


@dataclass
class Incumbent:
    point: tuple[float, ...]
    items: tuple
    value: float


@dataclass
class SolverStats:
    nodes: int = 0
    contractions: int = 0
    fixed_point_calls: int = 0
    max_fixed_point_iterations: int = 0
    branchings: int = 0
    upper_bound_improvements: int = 0
    discards: Counter = field(default_factory=Counter)


@dataclass
class Result:
    status: str
    f_best: float
    incumbent: Incumbent | None
    lower_bound: float
    stats: SolverStats
    trace: list[TraceEvent]
    elapsed: float = 0.0


@dataclass(order=True)
class QueueEntry:
    key: tuple
    box: tuple = field(compare=False)
    lb: float = field(compare=False)
    depth: int = field(compare=False)
    counter: int = field(compare=False)
    node: int = field(compare=False)


def explore_order(cfg: SolverConfig) -> Callable[[float, int, int], tuple]:
    """Heap key ``(lb, depth, counter) -> key``; smallest key is extracted first."""
    if cfg.explore == "best":
        return lambda lb, depth, counter: (lb, counter)
    if cfg.explore == "depth":
        return lambda lb, depth, counter: (-depth, -counter)
    return lambda lb, depth, counter: (depth, counter)


def lower_bound(problem: Problem, box) -> float:
    return eval_interval(problem.objective, box).lo


def branchable(box, cfg: SolverConfig) -> list[int]:
    return [i for i, iv in enumerate(box) if ia.width(iv) > cfg.eps_branch]


def choose_variable(problem: Problem, box, cfg: SolverConfig, *, depth: int = 0,
                    branch_count: int = 0) -> int | None:
    """Index of the variable to split, or None when the box is atomic."""
    cand = branchable(box, cfg)
    if not cand:
        return None
    if branch_count < len(cfg.branch_override):
        i = problem.index(cfg.branch_override[branch_count])
        if i in cand:
            return i
    if cfg.branch == "roundrobin":
        n = len(box)
        for step in range(n):
            i = (depth + step) % n
            if i in cand:
                return i
    if cfg.branch == "smear":
        grad = gradient_interval(problem.objective, box)
        scores = [(ia.mag(grad[i]) * ia.width(box[i]), i) for i in cand]
        best = max(s for s, _ in scores)
        if best > 0:
            return next(i for s, i in scores if s == best)
    widths = [(ia.width(box[i]), i) for i in cand]
    best = max(w for w, _ in widths)
    return next(i for w, i in widths if w == best)


def smear_scores(problem: Problem, box) -> list[float]:
    grad = gradient_interval(problem.objective, box)
    return [ia.mag(g) * ia.width(iv) if ia.width(iv) > 0 else 0.0 for g, iv in zip(grad, box)]


def split(box, i: int) -> tuple[tuple, tuple]:
    iv = box[i]
    m = ia.midpoint(iv)
    left = box[:i] + (Interval(iv.lo, m),) + box[i + 1:]
    right = box[:i] + (Interval(m, iv.hi),) + box[i + 1:]
    return left, right


def branch(problem: Problem, box, cfg: SolverConfig, *, depth: int = 0,
           branch_count: int = 0):
    """Split ``box`` at the midpoint of the chosen variable; None for an atomic box."""
    i = choose_variable(problem, box, cfg, depth=depth, branch_count=branch_count)
    if i is None:
        return None
    return (i,) + split(box, i)


class SolverState:
    """Mutable search state: incumbent, objective cut, queue, statistics and trace."""

    def __init__(self, problem: Problem, cfg: SolverConfig, on_event=None):
        self.p = problem
        self.cfg = cfg
        self.on_event = on_event
        self.trace: list[TraceEvent] = []
        self.stats = SolverStats()
        self.f_best = INF
        self.incumbent: Incumbent | None = None
        self.base = [HC4(c, c.name or f"c{k + 1}") for k, c in enumerate(problem.constraints)]
        self.clutches = [Clutch(cc, cc.name or f"c{len(problem.constraints) + k + 1}")
                         for k, cc in enumerate(problem.catalogs)]
        self.cut: ObjectiveCut | None = None
        self.node = 0
        self.queue: list[QueueEntry] = []

    def emit(self, node, phase, before=None, after=None, value=None):
        ev = TraceEvent(node, phase, before, after, value)
        self.trace.append(ev)
        if self.on_event is not None:
            self.on_event(ev)

    # -- filtering ----------------------------------------------------------

    def contractors(self, include_clutch=True) -> list[Contractor]:
        ctcs = list(self.base)
        if include_clutch:
            ctcs += self.clutches
        if self.cut is not None:
            ctcs.append(self.cut)
        return ctcs

    def filter(self, box, node: int | None, include_clutch=True):
        ctcs = self.contractors(include_clutch)
        count = 0

        def on_apply(ctc, before, after):
            nonlocal count
            count += 1
            if node is not None and after != before:
                self.emit(node, ctc.tag, before, after)

        out = fixed_point(ctcs, box, tau=self.cfg.tau_fp, on_apply=on_apply)
        self.stats.fixed_point_calls += 1
        self.stats.contractions += count
        self.stats.max_fixed_point_iterations = max(self.stats.max_fixed_point_iterations, count)
        return out

    # -- upper bounding -----------------------------------------------------

    def item_tuples(self, box):
        per_cat = [items_in_box(cc.catalog, cc.sub_box(box)) for cc in self.p.catalogs]
        if any(not items for items in per_cat):
            return []
        if self.cfg.upper_bounding == "assigned":
            if any(len(items) != 1 for items in per_cat):
                return []
            return [tuple(items[0] for items in per_cat)]
        total = math.prod(len(items) for items in per_cat)
        tuples = list(itertools.islice(itertools.product(*per_cat), self.cfg.max_ub_tuples))
        if total > self.cfg.max_ub_tuples:
            nearest = tuple(self._nearest(cc, items, box) for cc, items in zip(self.p.catalogs, per_cat))
            if nearest not in tuples:
                tuples.append(nearest)
        return tuples

    @staticmethod
    def _nearest(cc, items, box):
        mid = [ia.midpoint(box[i]) for i in cc.indices]
        return min(items, key=lambda it: sum((a - b) ** 2 for a, b in zip(it[1], mid)))

    def upper_bound(self, box, node: int) -> bool:
        """Try item assignments inside ``box``; stop at the first improvement."""
        for tup in self.item_tuples(box):
            fixed = list(box)
            for cc, (_, item) in zip(self.p.catalogs, tup):
                for i, v in zip(cc.indices, item):
                    fixed[i] = Interval(v)
            fixed = self.filter(tuple(fixed), None, include_clutch=False)
            if box_is_empty(fixed):
                continue
            point = ia.box_midpoint(fixed)
            if any(c.violation(point) > self.cfg.tol_feas for c in self.p.constraints):
                continue
            value = eval_interval(self.p.objective, [Interval(v) for v in point]).hi
            if value < self.f_best:
                self.f_best = value
                self.incumbent = Incumbent(point, tuple(ident for ident, _ in tup), value)
                # same rounding as the discard tests f_best - epsilon < lb
                self.cut = ObjectiveCut(self.p.objective, value - self.cfg.epsilon)
                self.stats.upper_bound_improvements += 1
                self.emit(node, "UB", box, fixed, value)
                return True
        return False

    # -- main loop ----------------------------------------------------------

    def discard(self, node, cause, box=None):
        self.stats.discards[cause] += 1
        self.emit(node, f"DISCARD({cause})", box)

    def run(self) -> Result:
        cfg = self.cfg
        start = time.perf_counter()
        key = explore_order(cfg)
        counter = itertools.count()
        heap = self.queue

        def push(box, lb, depth, node):
            c = next(counter)
            heapq.heappush(heap, QueueEntry(key(lb, depth, c), box, lb, depth, c, node))

        push(self.p.box, -INF, 0, self.new_node())
        status = None
        while heap:
            if self.stats.nodes >= cfg.max_nodes or (
                    cfg.time_limit is not None and time.perf_counter() - start > cfg.time_limit):
                status = "limit"
                break
            entry = heapq.heappop(heap)
            self.stats.nodes += 1
            node, box = entry.node, entry.box
            self.emit(node, "EXTRACT", box, None, entry.lb)
            if self.f_best - cfg.epsilon < entry.lb:
                self.discard(node, "inherited-bound", box)
                continue
            lb = lower_bound(self.p, box)
            self.emit(node, "LB", box, None, lb)
            if self.f_best - cfg.epsilon < lb:
                self.discard(node, "lower-bound", box)
                continue
            for _ in range(cfg.ub_rounds):
                box = self.filter(box, node)
                if box_is_empty(box) or not self.upper_bound(box, node):
                    break
            else:
                # the last improvement's cut has not been propagated yet
                box = self.filter(box, node)
            if box_is_empty(box):
                self.discard(node, "empty")
                continue
            split_ = branch(self.p, box, cfg, depth=entry.depth, branch_count=self.stats.branchings)
            if split_ is None:
                self.discard(node, "atomic", box)
                continue
            var, *children = split_
            self.stats.branchings += 1
            self.emit(node, f"BRANCH({self.p.names[var]})", box, tuple(children))
            for child in children:
                cid = self.new_node()
                for ctc in self.clutches:
                    new = ctc(child)
                    self.stats.contractions += 1
                    if new != child:
                        self.emit(cid, ctc.tag, child, new)
                    child = new
                    if box_is_empty(child):
                        break
                if box_is_empty(child):
                    self.discard(cid, "empty")
                    continue
                push(child, lb, entry.depth + 1, cid)

        if status is None:
            status = "optimal" if self.incumbent is not None else "infeasible"
            certified = self.f_best - cfg.epsilon if self.incumbent is not None else INF
        else:
            certified = min([e.lb for e in heap] + [self.f_best - cfg.epsilon])
        return Result(status, self.f_best, self.incumbent, certified, self.stats, self.trace,
                      time.perf_counter() - start)

    def new_node(self) -> int:
        n = self.node
        self.node += 1
        return n


def upper_bound(problem: Problem, box, state: SolverState, node: int = 0) -> bool:
    """Look for an incumbent in ``box``; True (and ``state`` updated) when ``f_best`` improved.

    Each catalog-item assignment found inside ``box`` (all tuples up to
    ``max_ub_tuples``, then the tuple nearest the box midpoint) fixes the
    property variables; the remaining variables are contracted with the
    constraints and the current objective cut, and the midpoint of the
    result is accepted when every constraint holds within ``tol_feas``.
    The first improving assignment wins so that the tightened cut can be
    propagated before the next attempt.
    """
    if state.p is not problem:
        raise ValueError("state belongs to another problem")
    return state.upper_bound(tuple(box), node)


def solve(problem: Problem, cfg: SolverConfig | None = None, *,
          on_event: Callable[[TraceEvent], None] | None = None) -> Result:
    """Globally minimize ``problem``; ``f_best - f* <= cfg.epsilon`` on normal termination."""
    cfg = cfg or SolverConfig()
    for name in cfg.branch_override:
        if name not in problem.names:
            raise ValueError(f"branch override names unknown variable {name!r}")
    return SolverState(problem, cfg, on_event).run()
