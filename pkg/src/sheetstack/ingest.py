"""Snapshot ingestion, persistence, and the moving window.

Layout on disk: ``<data_root>/<report_type>/<timestamp>.csv`` holds the
normalized grid, ``<timestamp>.meta`` the JSON sidecar. The meta file is the
commit point: readers only see snapshots whose sidecar exists.
"""

from __future__ import annotations

import calendar
import json
import os
import re
import threading
import time
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from .cells import SheetGrid, grid_from_csv_bytes, grid_to_csv_bytes, parse_grid
from .errors import DuplicateTimestamp, EmptySheet, MalformedFile, UnknownReportType

_IDENTIFIER = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")

_NAME_DATE_DASHED = re.compile(r"(?<!\d)(\d{4})-(\d{2})-(\d{2})(?!\d)")
_NAME_DATE_COMPACT = re.compile(r"(?<!\d)(\d{4})(\d{2})(\d{2})(?!\d)")


@dataclass(frozen=True)
class WindowConfig:
    """Moving window of the newest snapshots; size None means unbounded."""

    size: int | None = None

    def __post_init__(self):
        if self.size is not None and self.size < 2:
            raise ValueError("window size must be >= 2 (or None for unbounded)")

    @property
    def unbounded(self) -> bool:
        return self.size is None


UNBOUNDED = WindowConfig(None)


@dataclass(frozen=True)
class ReportSnapshot:
    report_type: str
    timestamp: int
    source_name: str
    grid: SheetGrid
    ordinal: int


def timestamp_from_name(name: str) -> int | None:
    """First ISO date (YYYY-MM-DD or YYYYMMDD) in a filename, as midnight UTC."""
    for pattern in (_NAME_DATE_DASHED, _NAME_DATE_COMPACT):
        for m in pattern.finditer(name):
            y, mo, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
            if y < 1970:
                continue
            try:
                dt = datetime(y, mo, d)
            except ValueError:
                continue
            return calendar.timegm(dt.timetuple())
    return None


def _check_report_type(report_type: str) -> None:
    if not report_type or not _IDENTIFIER.match(report_type):
        raise MalformedFile(f"invalid report type identifier: {report_type!r}")


class SnapshotStore:
    """Per-report-type snapshot directory with single-writer ingestion."""

    def __init__(self, data_root: str | os.PathLike):
        self.data_root = Path(data_root)
        self.data_root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, report_type: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(report_type, threading.Lock())

    def _report_dir(self, report_type: str) -> Path:
        return self.data_root / report_type

    def report_types(self) -> list[str]:
        if not self.data_root.exists():
            return []
        return sorted(
            p.name
            for p in self.data_root.iterdir()
            if p.is_dir() and not p.name.startswith("_")
        )

    def has_report(self, report_type: str) -> bool:
        if report_type.startswith("_"):
            return False
        return self._report_dir(report_type).is_dir()

    def ingest_snapshot(
        self,
        report_type: str,
        file_bytes: bytes,
        fmt: str = "csv",
        explicit_timestamp: int | None = None,
        source_name: str = "",
    ) -> ReportSnapshot:
        _check_report_type(report_type)
        grid = parse_grid(file_bytes, fmt)
        if grid.non_empty_count() == 0:
            raise EmptySheet(f"{source_name or report_type}: no non-empty cells")

        if explicit_timestamp is not None:
            ts = int(explicit_timestamp)
        else:
            named = timestamp_from_name(source_name)
            ts = named if named is not None else int(time.time())

        with self._lock_for(report_type):
            rdir = self._report_dir(report_type)
            rdir.mkdir(parents=True, exist_ok=True)
            meta_path = rdir / f"{ts}.meta"
            if meta_path.exists():
                raise DuplicateTimestamp(
                    f"{report_type} already has a snapshot at timestamp {ts}"
                )
            csv_path = rdir / f"{ts}.csv"
            self._write_atomic(csv_path, grid_to_csv_bytes(grid))
            meta = {"timestamp": ts, "source_name": source_name, "format": fmt}
            self._write_atomic(
                meta_path, json.dumps(meta, sort_keys=True).encode("utf-8")
            )

        for snap in self.snapshots(report_type):
            if snap.timestamp == ts:
                return snap
        raise RuntimeError("snapshot vanished after commit")  # pragma: no cover

    @staticmethod
    def _write_atomic(path: Path, data: bytes) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(data)
        os.replace(tmp, path)

    def snapshots(self, report_type: str) -> list[ReportSnapshot]:
        """All snapshots, timestamp ascending, ordinals 0..s-1."""
        rdir = self._report_dir(report_type)
        if not rdir.is_dir():
            raise UnknownReportType(report_type)
        entries = []
        for meta_path in rdir.glob("*.meta"):
            try:
                meta = json.loads(meta_path.read_text("utf-8"))
            except (ValueError, OSError):
                continue
            entries.append((int(meta["timestamp"]), meta))
        entries.sort(key=lambda e: e[0])
        snaps = []
        for ordinal, (ts, meta) in enumerate(entries):
            csv_path = rdir / f"{ts}.csv"
            grid = grid_from_csv_bytes(csv_path.read_bytes())
            snaps.append(
                ReportSnapshot(
                    report_type=report_type,
                    timestamp=ts,
                    source_name=meta.get("source_name", ""),
                    grid=grid,
                    ordinal=ordinal,
                )
            )
        return snaps

    def active_window(
        self, report_type: str, cfg: WindowConfig = UNBOUNDED
    ) -> list[ReportSnapshot]:
        """The newest W snapshots in timestamp order (all, when unbounded)."""
        snaps = self.snapshots(report_type)
        if cfg.unbounded or len(snaps) <= cfg.size:
            return snaps
        return snaps[-cfg.size :]
