"""Catalogs of items living in property space."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import Sequence, TextIO, Union

from .interval import Interval


class CatalogError(ValueError):
    """Malformed catalog file; carries the 1-based row/column when known."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.row = row
        self.column = column


@dataclass(frozen=True)
class Catalog:
    name: str
    properties: tuple[str, ...]
    items: tuple[tuple[float, ...], ...]
    ids: tuple = ()

    def __post_init__(self):
        if not self.items:
            raise CatalogError("empty catalog")
        p = len(self.properties)
        if p == 0:
            raise CatalogError("catalog needs at least one property")
        for k, item in enumerate(self.items):
            if len(item) != p:
                raise CatalogError(f"item has {len(item)} coordinates, expected {p}", row=k + 2)
            if not all(math.isfinite(v) for v in item):
                raise CatalogError("non-finite coordinate", row=k + 2)
        if not self.ids:
            object.__setattr__(self, "ids", tuple(range(1, len(self.items) + 1)))
        elif len(self.ids) != len(self.items):
            raise CatalogError("one identifier per item required")

    @property
    def dimension(self) -> int:
        return len(self.properties)

    def __len__(self) -> int:
        return len(self.items)

    def item(self, ident) -> tuple[float, ...]:
        return self.items[self.ids.index(ident)]


@dataclass(frozen=True)
class CatalogConstraint:
    """Binds the catalog to a tuple of property-variable positions in the box."""

    catalog: Catalog
    indices: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.indices) != self.catalog.dimension:
            raise ValueError(
                f"catalog {self.catalog.name!r} has {self.catalog.dimension} properties, "
                f"bound to {len(self.indices)} variables"
            )
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("catalog constraint binds a variable twice")

    def sub_box(self, box: Sequence[Interval]) -> tuple[Interval, ...]:
        return tuple(box[i] for i in self.indices)


def items_in_box(cat: Catalog, ybox: Sequence[Interval]) -> list[tuple[object, tuple[float, ...]]]:
    """Items whose every coordinate lies in the matching closed interval, in catalog order."""
    if len(ybox) != cat.dimension:
        raise ValueError(f"box has dimension {len(ybox)}, catalog has {cat.dimension}")
    bounds = [(iv.lo, iv.hi) for iv in ybox]
    return [
        (ident, item)
        for ident, item in zip(cat.ids, cat.items)
        if all(lo <= v <= hi for v, (lo, hi) in zip(item, bounds))
    ]


def load_csv(source: Union[str, os.PathLike, TextIO], name: str | None = None) -> Catalog:
    """Read a catalog: header of property names, optional leading ``item`` label column."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            text = fh.read()
        if name is None:
            name = os.path.splitext(os.path.basename(os.fspath(source)))[0]
    else:
        text = source.read()
    name = name or "catalog"

    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise CatalogError("empty file")
    header = [h.strip() for h in rows[0]]
    labelled = header[0].lower() == "item"
    props = tuple(header[1:] if labelled else header)
    if not props:
        raise CatalogError("no property columns", row=1)
    if len(set(props)) != len(props):
        raise CatalogError("duplicate property name", row=1)

    items, ids = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CatalogError(f"expected {len(header)} cells, found {len(row)}", row=r)
        cells = row[1:] if labelled else row
        offset = 2 if labelled else 1
        coords = []
        for c, cell in enumerate(cells):
            try:
                v = float(cell)
            except ValueError:
                raise CatalogError(f"non-numeric cell {cell.strip()!r}", row=r, column=c + offset) from None
            if not math.isfinite(v):
                raise CatalogError(f"non-finite cell {cell.strip()!r}", row=r, column=c + offset)
            coords.append(v)
        items.append(tuple(coords))
        if labelled:
            label = row[0].strip()
            ids.append(int(label) if label.isdigit() else label)
    if not items:
        raise CatalogError("empty catalog")
    if labelled and len(set(ids)) != len(ids):
        raise CatalogError("duplicate item label")
    return Catalog(name, props, tuple(items), tuple(ids) if labelled else ())
