"""Reader for the plain-text problem format.

::

    # comments run to the end of the line
    vars
      x     0   16        # continuous variable: name lo hi
      @y1   0   20        # '@' marks a catalog property variable
      @y2  -10  10
    minimize
      y1^3
    subject_to
      c1: 2*y1 = x - y2^2  # also: lo <= f <= hi, f = v, f <= v, f >= v
    catalog
      c2: catalog1.csv (y1, y2)

Continuous variables are placed before property variables in the box,
each block keeping file order. Catalog paths are relative to the problem
file. Unlabelled constraints are numbered ``c1, c2, ...`` across the
``subject_to`` and ``catalog`` sections.
"""

from __future__ import annotations

import os
import re

from .catalog import CatalogConstraint, CatalogError, load_csv
from .expr import ParseError, parse, parse_constraint
from .interval import Interval
from .solver import Problem

SECTIONS = ("vars", "minimize", "subject_to", "catalog")

_LABEL = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s*:(?!=)\s*(.*)$")
_CATALOG = re.compile(r"^(?P<path>.+?)\s*\((?P<vars>[^()]*)\)\s*$")


class ProblemFileError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        loc = f"{path or '<problem>'}:{line}: " if line is not None else ""
        super().__init__(f"{loc}{message}")
        self.line = line


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def load_problem(path: str | os.PathLike) -> Problem:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_problem(text, base_dir=os.path.dirname(os.path.abspath(path)), path=os.fspath(path))


def parse_problem(text: str, base_dir: str = ".", path: str | None = None) -> Problem:
    sections: dict[str, list[tuple[int, str]]] = {s: [] for s in SECTIONS}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        head = line.rstrip(":").strip().lower()
        if head in SECTIONS:
            current = head
            continue
        if current is None:
            raise ProblemFileError(f"content before any section: {line!r}", lineno, path)
        sections[current].append((lineno, line))

    cont, prop = [], []
    for lineno, line in sections["vars"]:
        parts = line.split()
        if len(parts) != 3:
            raise ProblemFileError("variable line must be 'name lo hi'", lineno, path)
        name, lo, hi = parts
        is_prop = name.startswith("@")
        name = name.lstrip("@")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or name == "sqrt":
            raise ProblemFileError(f"invalid variable name {name!r}", lineno, path)
        try:
            iv = Interval(float(lo), float(hi))
        except ValueError:
            raise ProblemFileError(f"bounds of {name!r} are not numbers", lineno, path) from None
        if iv.is_empty():
            raise ProblemFileError(f"empty domain for {name!r}", lineno, path)
        (prop if is_prop else cont).append((name, iv, lineno))
    declared = cont + prop
    if not declared:
        raise ProblemFileError("no variables declared", None, path)
    names = [d[0] for d in declared]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ProblemFileError(f"variable {sorted(dup)[0]!r} declared twice", None, path)

    if len(sections["minimize"]) != 1:
        raise ProblemFileError("exactly one objective formula expected under 'minimize'", None, path)
    lineno, line = sections["minimize"][0]
    try:
        objective = parse(line, names)
    except ParseError as exc:
        raise ProblemFileError(str(exc), lineno, path) from None

    counter = 0
    constraints = []
    for lineno, line in sections["subject_to"]:
        counter += 1
        label, body = _split_label(line, f"c{counter}")
        try:
            constraints.append(parse_constraint(body, names, label))
        except ParseError as exc:
            raise ProblemFileError(str(exc), lineno, path) from None

    catalogs = []
    for lineno, line in sections["catalog"]:
        counter += 1
        label, body = _split_label(line, f"c{counter}")
        m = _CATALOG.match(body)
        if m is None:
            raise ProblemFileError("catalog line must be 'path (var, ...)'", lineno, path)
        csv_path = os.path.join(base_dir, m["path"].strip())
        bound = [v.strip() for v in m["vars"].split(",") if v.strip()]
        for v in bound:
            if v not in names:
                raise ProblemFileError(f"catalog binds undeclared variable {v!r}", lineno, path)
            if v not in {p[0] for p in prop}:
                raise ProblemFileError(f"catalog variable {v!r} must be declared with '@'", lineno, path)
        try:
            cat = load_csv(csv_path)
        except OSError as exc:
            raise ProblemFileError(f"cannot read catalog {csv_path!r}: {exc.strerror}", lineno, path) from None
        except CatalogError as exc:
            raise ProblemFileError(f"catalog {csv_path!r}: {exc}", lineno, path) from None
        if cat.dimension != len(bound):
            raise ProblemFileError(
                f"catalog {csv_path!r} has {cat.dimension} property columns, bound to {len(bound)} variables",
                lineno, path)
        catalogs.append(CatalogConstraint(cat, tuple(names.index(v) for v in bound), label))

    try:
        return Problem(tuple(names), tuple(d[1] for d in declared), objective, constraints,
                       catalogs, n_continuous=len(cont))
    except ValueError as exc:
        raise ProblemFileError(str(exc), None, path) from None


def _split_label(line: str, default: str) -> tuple[str, str]:
    m = _LABEL.match(line)
    if m:
        return m.group(1), m.group(2)
    return default, line
