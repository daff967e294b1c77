"""Timeseries construction over the snapshots in the active window.

Three families are built from the extracted tables:
  NTS: one series per composite key value and numeric attribute.
  RTS: the same shape over per-sheet ascending competition ranks.
  CTS: per categorical combo value, the count of matching rows per sheet.

Ordinals may have gaps; entities are allowed to disappear and reappear.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass
from typing import NamedTuple

from .cells import Cell, CellKind, EMPTY_CELL, cell_to_text
from .table_extract import ExtractedTable, SchemaProfile

NTS = "NTS"
RTS = "RTS"
CTS = "CTS"
GROUPS = (NTS, RTS, CTS)

RANK_SUFFIX = "-rank"
COMBO_JOIN = " + "


@dataclass(frozen=True)
class SeriesId:
    group: str
    entity: tuple[str, ...]
    attribute: str

    def key(self) -> str:
        """Canonical encoding; also the URL path form for drill-down."""
        return json.dumps(
            [self.group, list(self.entity), self.attribute],
            separators=(",", ":"),
            ensure_ascii=False,
        )

    def sort_key(self) -> tuple:
        return (self.group, self.entity, self.attribute)

    @staticmethod
    def from_key(text: str) -> "SeriesId":
        try:
            doc = json.loads(text)
            group, entity, attribute = doc
            if group not in GROUPS or not isinstance(entity, list):
                raise ValueError
            return SeriesId(str(group), tuple(str(e) for e in entity), str(attribute))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"not a series key: {text!r}") from exc


class Point(NamedTuple):
    ordinal: int
    ts: int
    value: float  # int for RTS/CTS points


@dataclass(frozen=True)
class TimeSeries:
    id: SeriesId
    points: tuple[Point, ...]
    combo: tuple[str, ...] = ()  # CTS only: the combo's member columns

    @property
    def n(self) -> int:
        return len(self.points)

    def values(self) -> list[float]:
        return [p.value for p in self.points]

    def ordinals(self) -> list[int]:
        return [p.ordinal for p in self.points]


@dataclass(frozen=True)
class WindowSheet:
    """One snapshot of the active window, extracted and classified."""

    table: ExtractedTable
    profile: SchemaProfile
    ordinal: int
    timestamp: int


def _by_ordinal(sheets) -> list[WindowSheet]:
    return sorted(sheets, key=lambda sh: sh.ordinal)


def _key_rows(table: ExtractedTable, keys: tuple[str, ...]) -> dict[tuple[str, ...], int]:
    """Composite key value -> first row index carrying it (later dups ignored)."""
    if not keys or not all(table.has_column(k) for k in keys):
        return {}
    positions = [table.header.index(k) for k in keys]
    out: dict[tuple[str, ...], int] = {}
    for i in range(table.n_rows):
        cells = [table.columns[p][i] for p in positions]
        if any(c.is_empty for c in cells):
            continue
        out.setdefault(tuple(cell_to_text(c) for c in cells), i)
    return out


def build_nts(sheets) -> dict[SeriesId, TimeSeries]:
    """Key x numeric-attribute series; a point needs the key present and a Number cell."""
    acc: dict[SeriesId, list[Point]] = {}
    for sh in _by_ordinal(sheets):
        rows = _key_rows(sh.table, sh.profile.keys)
        if not rows:
            continue
        for attr in sh.profile.numerics:
            col = sh.table.column(attr)
            for kv, i in rows.items():
                cell = col[i]
                if cell.kind is CellKind.NUMBER:
                    sid = SeriesId(NTS, kv, attr)
                    acc.setdefault(sid, []).append(
                        Point(sh.ordinal, sh.timestamp, cell.value)
                    )
    return {sid: TimeSeries(sid, tuple(pts)) for sid, pts in acc.items()}


def competition_ranks(values: list[float]) -> list[int]:
    """Ascending competition ranks: smallest value gets 1, ties share the minimum."""
    ordered = sorted(values)
    return [bisect_left(ordered, v) + 1 for v in values]


def add_rank_columns(table: ExtractedTable, profile: SchemaProfile) -> ExtractedTable:
    """Append one '<n>-rank' column per numeric attribute; unranked rows stay Empty."""
    header = list(table.header)
    columns = list(table.columns)
    for attr in profile.numerics:
        col = table.column(attr)
        idx = [i for i, c in enumerate(col) if c.kind is CellKind.NUMBER]
        ranks = competition_ranks([col[i].value for i in idx])
        rank_col: list[Cell] = [EMPTY_CELL] * table.n_rows
        for i, r in zip(idx, ranks):
            rank_col[i] = Cell(CellKind.NUMBER, r)
        header.append(f"{attr}{RANK_SUFFIX}")
        columns.append(tuple(rank_col))
    return ExtractedTable(
        header=tuple(header),
        columns=tuple(columns),
        header_row_index=table.header_row_index,
        dropped_leading_columns=table.dropped_leading_columns,
    )


def build_rts(sheets) -> dict[SeriesId, TimeSeries]:
    """Rank series: identical shape to NTS over per-sheet competition ranks."""
    acc: dict[SeriesId, list[Point]] = {}
    for sh in _by_ordinal(sheets):
        rows = _key_rows(sh.table, sh.profile.keys)
        if not rows:
            continue
        for attr in sh.profile.numerics:
            col = sh.table.column(attr)
            idx = [i for i, c in enumerate(col) if c.kind is CellKind.NUMBER]
            if not idx:
                continue
            by_row = dict(zip(idx, competition_ranks([col[i].value for i in idx])))
            for kv, i in rows.items():
                rank = by_row.get(i)
                if rank is not None:
                    sid = SeriesId(RTS, kv, f"{attr}{RANK_SUFFIX}")
                    acc.setdefault(sid, []).append(Point(sh.ordinal, sh.timestamp, rank))
    return {sid: TimeSeries(sid, tuple(pts)) for sid, pts in acc.items()}


def build_cts(sheets, zero_fill: bool = False) -> dict[SeriesId, TimeSeries]:
    """Row counts per composite categorical value, one series per (value, combo).

    Rows empty in any combo column are excluded. Zero-count sheets contribute
    no point unless zero_fill is set; sheets missing a combo column never do.
    """
    sheets = _by_ordinal(sheets)
    combos: list[tuple[str, ...]] = []
    seen: set[tuple[str, ...]] = set()
    for sh in sheets:
        for combo in sh.profile.combos:
            if combo not in seen:
                seen.add(combo)
                combos.append(combo)

    out: dict[SeriesId, TimeSeries] = {}
    for combo in combos:
        per_sheet: list[tuple[WindowSheet, dict[tuple[str, ...], int]]] = []
        for sh in sheets:
            if not all(sh.table.has_column(c) for c in combo):
                continue
            cols = [sh.table.column(c) for c in combo]
            counts: dict[tuple[str, ...], int] = {}
            for i in range(sh.table.n_rows):
                cells = [col[i] for col in cols]
                if any(c.is_empty for c in cells):
                    continue
                v = tuple(cell_to_text(c) for c in cells)
                counts[v] = counts.get(v, 0) + 1
            per_sheet.append((sh, counts))
        if not per_sheet:
            continue
        values: set[tuple[str, ...]] = set()
        for _, counts in per_sheet:
            values.update(counts)
        attr = COMBO_JOIN.join(combo)
        for v in sorted(values):
            pts = []
            for sh, counts in per_sheet:
                n = counts.get(v, 0)
                if n >= 1 or zero_fill:
                    pts.append(Point(sh.ordinal, sh.timestamp, n))
            if pts:
                sid = SeriesId(CTS, v, attr)
                out[sid] = TimeSeries(sid, tuple(pts), combo=combo)
    return out


def build_population(sheets, cts_zero_fill: bool = False) -> dict[SeriesId, TimeSeries]:
    pop: dict[SeriesId, TimeSeries] = {}
    pop.update(build_nts(sheets))
    pop.update(build_rts(sheets))
    pop.update(build_cts(sheets, zero_fill=cts_zero_fill))
    return pop


def _fmt_value(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def series_dump_line(series: TimeSeries) -> str:
    """Debug form: group, entity, attribute, then (ordinal:value) pairs."""
    pts = " ".join(f"({p.ordinal}:{_fmt_value(p.value)})" for p in series.points)
    entity = json.dumps(list(series.id.entity), ensure_ascii=False)
    return f"{series.id.group} {entity} {series.id.attribute} {pts}".rstrip()
