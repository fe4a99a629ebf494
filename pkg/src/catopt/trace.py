"""Solver trace events and their text, JSON and SVG renderings."""

from __future__ import annotations

import json
import logging
import math
import os
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .interval import Interval, box_is_empty, box_str, fmt_float

log = logging.getLogger(__name__)

#: phases that narrow or split a box; ``after`` is a sub-box of ``before``
CONTRACTION_PHASES = ("HC4", "CLUTCH", "OBJ-CUT")


@dataclass(frozen=True)
class TraceEvent:
    node: int
    phase: str
    before: tuple | None = None
    #: a box, or for BRANCH the tuple of child boxes
    after: tuple | None = None
    value: float | None = None

    @property
    def kind(self) -> str:
        return self.phase.split("(", 1)[0]

    @property
    def is_branch(self) -> bool:
        return self.kind == "BRANCH"

    @property
    def is_contraction(self) -> bool:
        return self.kind in CONTRACTION_PHASES


def _fmt_value(v: float) -> str:
    return fmt_float(v)


def format_event(ev: TraceEvent) -> str:
    before = box_str(ev.before) if ev.before is not None else "-"
    if ev.after is None:
        after = "-"
    elif ev.is_branch:
        after = " U ".join(box_str(b) for b in ev.after)
    else:
        after = box_str(ev.after)
    row = f"{ev.node} | {ev.phase} | {before} | {after}"
    if ev.value is not None:
        row += f" | {_fmt_value(ev.value)}"
    return row


def emit_trace_text(events: Iterable[TraceEvent]) -> str:
    lines = ["node | phase | box | result | value"]
    lines.extend(format_event(ev) for ev in events)
    return "\n".join(lines) + "\n"


def _num(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _unnum(v) -> float:
    return float(v)


def box_to_json(box):
    if box is None:
        return None
    if box_is_empty(box):
        return "EMPTY"
    return [[_num(iv.lo), _num(iv.hi)] for iv in box]


def box_from_json(obj, n: int | None = None):
    if obj is None:
        return None
    if obj == "EMPTY":
        return (Interval.empty(),) * (n or 1)
    return tuple(Interval(_unnum(lo), _unnum(hi)) for lo, hi in obj)


def event_to_json(ev: TraceEvent) -> dict:
    if ev.after is not None and ev.is_branch:
        after = [box_to_json(b) for b in ev.after]
    else:
        after = box_to_json(ev.after)
    return {
        "node": ev.node,
        "phase": ev.phase,
        "before": box_to_json(ev.before),
        "after": after,
        "value": None if ev.value is None else _num(ev.value),
    }


def emit_trace_json(events: Iterable[TraceEvent]) -> str:
    return json.dumps([event_to_json(ev) for ev in events], indent=1) + "\n"


def load_trace_json(text: str) -> list[TraceEvent]:
    events = []
    for obj in json.loads(text):
        before = box_from_json(obj["before"])
        n = len(before) if before else None
        if obj["phase"].startswith("BRANCH"):
            after = tuple(box_from_json(b, n) for b in obj["after"])
        else:
            after = box_from_json(obj["after"], n)
        value = obj["value"]
        events.append(TraceEvent(obj["node"], obj["phase"], before, after,
                                 None if value is None else _unnum(value)))
    return events


def group_by_node(events: Iterable[TraceEvent]) -> list[tuple[int, list[TraceEvent]]]:
    """Events per node, nodes ordered by extraction (first EXTRACT event)."""
    per_node: dict[int, list[TraceEvent]] = {}
    order: list[int] = []
    for ev in events:
        per_node.setdefault(ev.node, []).append(ev)
        if ev.phase == "EXTRACT":
            order.append(ev.node)
    # nodes created but never extracted (limits, discards at insertion) go last
    order += [k for k in per_node if k not in order]
    return [(k, per_node[k]) for k in order]


# ---------------------------------------------------------------------------
# SVG plots of the property space
# ---------------------------------------------------------------------------

def _slug(s: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "_", s).strip("_")


def emit_plot(events: Sequence[TraceEvent], catalog_constraint, names: Sequence[str],
              directory: str | os.PathLike) -> list[str]:
    """One SVG per contraction or branching event, drawn in the catalog's 2-D property plane.

    Items outside the current box are gray, the current box is black, the
    contracted box red and branching children green.
    """
    cat = catalog_constraint.catalog
    if cat.dimension != 2:
        log.warning("catalog %r has %d properties; plots need exactly 2, skipped",
                    cat.name, cat.dimension)
        return []
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Rectangle

    i, j = catalog_constraint.indices
    os.makedirs(directory, exist_ok=True)
    xs = [it[0] for it in cat.items]
    ys = [it[1] for it in cat.items]
    pad_x = 0.05 * ((max(xs) - min(xs)) or 1.0)
    pad_y = 0.05 * ((max(ys) - min(ys)) or 1.0)
    written = []

    def rect(ax, box, color, lw=1.5):
        xi, yi = box[i], box[j]
        ax.add_patch(Rectangle((xi.lo, yi.lo), xi.hi - xi.lo, yi.hi - yi.lo,
                               fill=False, edgecolor=color, linewidth=lw))

    plotted = [ev for ev in events if ev.is_contraction or ev.is_branch]
    for k, ev in enumerate(plotted):
        fig, ax = plt.subplots(figsize=(4, 4))
        cur = ev.before
        inside = [cur[i].lo <= a <= cur[i].hi and cur[j].lo <= b <= cur[j].hi
                  for a, b in cat.items]
        ax.scatter([a for (a, _), ok in zip(cat.items, inside) if ok],
                   [b for (_, b), ok in zip(cat.items, inside) if ok], color="black", zorder=3)
        ax.scatter([a for (a, _), ok in zip(cat.items, inside) if not ok],
                   [b for (_, b), ok in zip(cat.items, inside) if not ok], color="gray", zorder=3)
        for ident, (a, b) in zip(cat.ids, cat.items):
            ax.annotate(str(ident), (a, b), textcoords="offset points", xytext=(4, 4), fontsize=7)
        rect(ax, cur, "black")
        if ev.is_branch:
            for child in ev.after:
                rect(ax, child, "green", 1.0)
        elif box_is_empty(ev.after):
            ax.text(0.5, 0.95, "discarded", transform=ax.transAxes, ha="center", va="top",
                    color="red")
        else:
            rect(ax, ev.after, "red", 1.0)
        lo_x = min(min(xs), cur[i].lo) - pad_x
        hi_x = max(max(xs), cur[i].hi) + pad_x
        lo_y = min(min(ys), cur[j].lo) - pad_y
        hi_y = max(max(ys), cur[j].hi) + pad_y
        ax.set_xlim(lo_x, hi_x)
        ax.set_ylim(lo_y, hi_y)
        ax.set_xlabel(names[i])
        ax.set_ylabel(names[j])
        ax.set_title(f"node {ev.node}: {ev.phase}", fontsize=9)
        path = os.path.join(os.fspath(directory), f"{k:03d}_node{ev.node}_{_slug(ev.phase)}.svg")
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written
