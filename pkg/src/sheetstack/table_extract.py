"""Table extraction and column classification.

A raw sheet may carry free text above or left of the real table. The widest
row (scanning top-down) becomes the header, leading columns empty in that
header row are dropped, and everything below is the body. Columns are then
routed into four disjoint classes: key (K), categorical (C), numeric (N),
and other.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum

from .cells import Cell, CellKind, SheetGrid, cell_to_text
from .errors import NoTableFound

log = logging.getLogger(__name__)


class ColumnKind(str, Enum):
    NUMERIC = "numeric"
    TEXT = "text"
    TIMESTAMP = "timestamp"
    BOOLEAN = "boolean"
    MIXED = "mixed"
    EMPTY = "empty"


_KIND_BY_CELL = {
    CellKind.NUMBER: ColumnKind.NUMERIC,
    CellKind.TEXT: ColumnKind.TEXT,
    CellKind.TIMESTAMP: ColumnKind.TIMESTAMP,
    CellKind.BOOLEAN: ColumnKind.BOOLEAN,
}


@dataclass(frozen=True)
class ExtractedTable:
    header: tuple[str, ...]
    columns: tuple[tuple[Cell, ...], ...]
    header_row_index: int
    dropped_leading_columns: int

    @property
    def n_rows(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    def column(self, name: str) -> tuple[Cell, ...]:
        return self.columns[self.header.index(name)]

    def has_column(self, name: str) -> bool:
        return name in self.header

    def row(self, i: int) -> tuple[Cell, ...]:
        return tuple(col[i] for col in self.columns)


@dataclass(frozen=True)
class SchemaProfile:
    keys: tuple[str, ...]
    categoricals: tuple[tuple[str, float], ...]
    numerics: tuple[str, ...]
    other: tuple[str, ...]
    combos: tuple[tuple[str, ...], ...]

    @property
    def categorical_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.categoricals)


@dataclass(frozen=True)
class ClassifierConfig:
    """Thresholds for the heuristics; defaults tolerate a few dirty rows."""

    kind_dominance: float = 0.95
    key_uniqueness: float = 0.99
    key_coverage: float = 0.99
    categorical_min_ratio: float = 2.0
    categorical_unique_floor: int = 20
    categorical_unique_rows_frac: float = 0.5
    max_key_columns: int = 5
    max_categoricals: int = 5


DEFAULT_CLASSIFIER = ClassifierConfig()


@dataclass
class Diagnostic:
    column: str
    rule: str
    details: dict = field(default_factory=dict)


def _unique_names(raw: list[str]) -> tuple[str, ...]:
    names: list[str] = []
    seen: dict[str, int] = {}
    for i, name in enumerate(raw):
        base = name if name else f"column_{i + 1}"
        count = seen.get(base, 0) + 1
        seen[base] = count
        names.append(base if count == 1 else f"{base}#{count}")
    return tuple(names)


def extract_table(grid: SheetGrid) -> ExtractedTable:
    """Pull the main table out of a raw grid; raises NoTableFound."""
    counts = [sum(1 for c in row if not c.is_empty) for row in grid.rows]
    best = max(counts, default=0)
    if best < 2:
        raise NoTableFound("no row with two or more non-empty cells")
    header_idx = counts.index(best)
    header_row = grid.rows[header_idx]

    drop = 0
    while drop < len(header_row) and header_row[drop].is_empty:
        drop += 1

    header = _unique_names([cell_to_text(c) for c in header_row[drop:]])
    body = [row[drop:] for row in grid.rows[header_idx + 1 :]]
    while body and all(c.is_empty for c in body[-1]):
        body.pop()

    columns = tuple(
        tuple(row[j] for row in body) for j in range(len(header))
    )
    return ExtractedTable(
        header=header,
        columns=columns,
        header_row_index=header_idx,
        dropped_leading_columns=drop,
    )


def infer_column_kind(
    column: tuple[Cell, ...], dominance: float = DEFAULT_CLASSIFIER.kind_dominance
) -> ColumnKind:
    """Dominant cell kind of a column, or MIXED below the dominance threshold."""
    counts: dict[ColumnKind, int] = {}
    total = 0
    for cell in column:
        if cell.is_empty:
            continue
        total += 1
        k = _KIND_BY_CELL[cell.kind]
        counts[k] = counts.get(k, 0) + 1
    if total == 0:
        return ColumnKind.EMPTY
    kind, n = max(counts.items(), key=lambda kv: kv[1])
    return kind if n / total >= dominance else ColumnKind.MIXED


def _combo_stats(table: ExtractedTable, positions: tuple[int, ...]):
    """(coverage, uniqueness) of the composite value over the given columns."""
    rows = table.n_rows
    seen: set[tuple[str, ...]] = set()
    nonempty = 0
    for i in range(rows):
        cells = [table.columns[p][i] for p in positions]
        if any(c.is_empty for c in cells):
            continue
        nonempty += 1
        seen.add(tuple(cell_to_text(c) for c in cells))
    if nonempty == 0:
        return 0.0, 0.0
    return nonempty / rows, len(seen) / nonempty


def _find_keys(
    table: ExtractedTable, cfg: ClassifierConfig, diagnostics: list[Diagnostic] | None
) -> tuple[str, ...]:
    span = min(cfg.max_key_columns, len(table.header))
    for size in range(1, span + 1):
        for positions in itertools.combinations(range(span), size):
            coverage, uniqueness = _combo_stats(table, positions)
            if coverage >= cfg.key_coverage and uniqueness >= cfg.key_uniqueness:
                names = tuple(table.header[p] for p in positions)
                if diagnostics is not None:
                    diagnostics.append(
                        Diagnostic(
                            column=",".join(names),
                            rule="key_selected",
                            details={"coverage": coverage, "uniqueness": uniqueness},
                        )
                    )
                return names
    if diagnostics is not None:
        diagnostics.append(Diagnostic(column="", rule="no_key_found"))
    return ()


def classify_attributes(
    table: ExtractedTable,
    cfg: ClassifierConfig = DEFAULT_CLASSIFIER,
    diagnostics: list[Diagnostic] | None = None,
) -> SchemaProfile:
    """Route every column into exactly one of K / C / N / other."""
    rows = table.n_rows
    keys = _find_keys(table, cfg, diagnostics) if rows else ()
    key_set = set(keys)

    categoricals: list[tuple[str, float]] = []
    numerics: list[str] = []
    other: list[str] = []

    for name, column in zip(table.header, table.columns):
        if name in key_set:
            continue
        kind = infer_column_kind(column, cfg.kind_dominance)
        if kind is ColumnKind.NUMERIC:
            numerics.append(name)
            continue
        if kind in (ColumnKind.TEXT, ColumnKind.BOOLEAN):
            values = [cell_to_text(c) for c in column if not c.is_empty]
            unique = len(set(values))
            max_unique = max(
                cfg.categorical_unique_floor, cfg.categorical_unique_rows_frac * rows
            )
            if 2 <= unique <= max_unique:
                ratio = len(values) / unique
                if ratio >= cfg.categorical_min_ratio:
                    categoricals.append((name, ratio))
                    continue
            if diagnostics is not None:
                diagnostics.append(
                    Diagnostic(
                        column=name,
                        rule="categorical_rejected",
                        details={"unique": unique, "nonempty": len(values)},
                    )
                )
        other.append(name)

    categoricals.sort(key=lambda nr: (-nr[1], nr[0]))
    selected, combos = select_categorical_subset(categoricals, cfg.max_categoricals)
    selected_set = set(selected)
    # Categoricals beyond the pick limit stay in C (they are categorical);
    # only the combos are restricted to the selected subset.
    if diagnostics is not None and len(categoricals) > len(selected):
        dropped = [n for n, _ in categoricals if n not in selected_set]
        diagnostics.append(
            Diagnostic(
                column=",".join(dropped),
                rule="categorical_not_selected",
                details={"selected": list(selected)},
            )
        )

    return SchemaProfile(
        keys=keys,
        categoricals=tuple(categoricals),
        numerics=tuple(numerics),
        other=tuple(other),
        combos=combos,
    )


def select_categorical_subset(
    categoricals: list[tuple[str, float]], max_pick: int = 5
) -> tuple[tuple[str, ...], tuple[tuple[str, ...], ...]]:
    """Pick <= max_pick categoricals (uniformly over the ratio-sorted order)
    and build all singleton and pair combinations."""
    ordered = sorted(categoricals, key=lambda nr: (-nr[1], nr[0]))
    if len(ordered) <= max_pick:
        picked = [name for name, _ in ordered]
    else:
        last = len(ordered) - 1
        idx = sorted({round(i * last / (max_pick - 1)) for i in range(max_pick)})
        picked = [ordered[i][0] for i in idx]

    combos: list[tuple[str, ...]] = [(name,) for name in picked]
    combos.extend(itertools.combinations(picked, 2))
    return tuple(picked), tuple(combos)
