"""End-to-end engine: snapshots in, per-user insight feeds out.

Scoring is config-independent (except the normalization flag), so scored
populations are cached per window signature; per-user feed requests rerun
only filtering and selection.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .analytics import NoveltyReport, SeriesScore, detect_novelty, score_window
from .cells import parse_grid
from .errors import NoInsights, NoTableFound, UnknownReportType, UnknownSeries
from .ingest import SnapshotStore, WindowConfig
from .insights import build_feed, feed_to_bytes, select_insights
from .personalize import ConfigStore, UserConfig, allowed_attribute_names, filter_series
from .table_extract import classify_attributes, extract_table
from .timeseries import GROUPS, SeriesId, WindowSheet, build_population, series_dump_line

DEFAULT_MAX_UPLOAD = 10 * 2**20


@dataclass(frozen=True)
class EngineConfig:
    data_root: Path
    window: int | None = None  # None = every snapshot
    seed: int = 42
    normalize: bool = False
    backend: str | None = None
    cts_zero_fill: bool = False
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD


def score_record(score: SeriesScore) -> dict:
    """Flat per-series stats record (debug dumps and the series endpoint)."""
    reg, short, delta = score.regression, score.short, score.delta
    return {
        "m": reg.m if reg else None,
        "b": reg.b if reg else None,
        "mse": reg.mse if reg else None,
        "mcd": reg.mcd if reg else None,
        "mean": short.mean if short else None,
        "variance": short.variance if short else None,
        "delta": (
            {
                "squared_diff": delta.squared_diff,
                "from_ordinal": delta.from_ordinal,
                "to_ordinal": delta.to_ordinal,
                "from_value": delta.from_value,
                "to_value": delta.to_value,
            }
            if delta
            else None
        ),
    }


class Engine:
    def __init__(self, config: EngineConfig):
        self.config = config
        self.store = SnapshotStore(config.data_root)
        self.configs = ConfigStore(config.data_root)
        self._table_cache: dict = {}
        self._score_cache: dict = {}
        self._lock = threading.Lock()

    # ---------------- config ----------------

    def default_user_config(self, report_type: str, user: str = "default") -> UserConfig:
        return UserConfig(
            user=user,
            report_type=report_type,
            normalize=self.config.normalize,
            rng_seed=self.config.seed,
        )

    def user_config(self, report_type: str, user: str) -> UserConfig:
        return self.configs.load(
            report_type, user, default=self.default_user_config(report_type, user)
        )

    # ---------------- ingest ----------------

    def ingest(
        self,
        report_type: str,
        file_bytes: bytes,
        fmt: str = "csv",
        explicit_timestamp: int | None = None,
        source_name: str = "",
    ) -> dict:
        """Validate, persist, recompute; returns the run summary."""
        started = time.perf_counter()
        grid = parse_grid(file_bytes, fmt)
        extract_table(grid)  # uploads must contain a recognizable table
        snap = self.store.ingest_snapshot(
            report_type,
            file_bytes,
            fmt=fmt,
            explicit_timestamp=explicit_timestamp,
            source_name=source_name,
        )
        users = ["default"] + [
            u for u in self.configs.users(report_type) if u != "default"
        ]
        feed_ids = []
        counts = dict.fromkeys(GROUPS, 0)
        window_desc = {"from_ts": snap.timestamp, "to_ts": snap.timestamp, "count": 1}
        for user in users:
            feed = self.feed_for(report_type, user)
            feed_ids.append(f"{report_type}/{user}")
            if user == "default":
                window_desc = feed["window"]
        sheets, population, _, _ = self._scored(
            report_type, self.config.window, self.config.normalize
        )
        for sid in population:
            counts[sid.group] += 1
        return {
            "report_type": report_type,
            "snapshot": {
                "timestamp": snap.timestamp,
                "ordinal": snap.ordinal,
                "source_name": snap.source_name,
            },
            "window": window_desc,
            "series_counts": counts,
            "duration_ms": round((time.perf_counter() - started) * 1000.0, 3),
            "feed_ids": feed_ids,
        }

    # ---------------- scoring ----------------

    def _table_profile(self, report_type: str, snap):
        key = (report_type, snap.timestamp)
        with self._lock:
            hit = self._table_cache.get(key)
        if hit is not None:
            return hit
        try:
            table = extract_table(snap.grid)
        except NoTableFound:
            return None
        profile = classify_attributes(table)
        with self._lock:
            if len(self._table_cache) > 256:
                self._table_cache.clear()
            self._table_cache[key] = (table, profile)
        return table, profile

    def _scored(self, report_type: str, window: int | None, normalize: bool):
        snaps = self.store.active_window(report_type, WindowConfig(window))
        sheets: list[WindowSheet] = []
        for snap in snaps:
            tp = self._table_profile(report_type, snap)
            if tp is None:
                continue
            sheets.append(WindowSheet(tp[0], tp[1], snap.ordinal, snap.timestamp))
        if not sheets:
            raise NoTableFound(f"no usable sheets for report {report_type!r}")
        sig = (
            report_type,
            tuple((sh.ordinal, sh.timestamp) for sh in sheets),
            normalize,
            self.config.cts_zero_fill,
        )
        with self._lock:
            hit = self._score_cache.get(sig)
        if hit is not None:
            return hit
        population = build_population(sheets, cts_zero_fill=self.config.cts_zero_fill)
        scores = score_window(
            population,
            [sh.ordinal for sh in sheets],
            normalize=normalize,
            backend=self.config.backend,
        )
        novelty = detect_novelty(sheets)
        result = (sheets, population, scores, novelty)
        with self._lock:
            if len(self._score_cache) > 16:
                self._score_cache.pop(next(iter(self._score_cache)))
            self._score_cache[sig] = result
        return result

    # ---------------- feeds ----------------

    def feed_for(self, report_type: str, user: str = "default") -> dict:
        if not self.store.has_report(report_type):
            raise UnknownReportType(report_type)
        cfg = self.user_config(report_type, user)
        return self._compute_feed(report_type, cfg)

    def _compute_feed(self, report_type: str, cfg: UserConfig) -> dict:
        window = cfg.window_size if cfg.window_size is not None else self.config.window
        sheets, population, scores, novelty = self._scored(
            report_type, window, cfg.normalize
        )
        filtered = filter_series(population, cfg)
        filtered_scores = {sid: scores[sid] for sid in filtered}
        if cfg.attribute_allowlist is not None or cfg.attribute_denylist:
            kept = allowed_attribute_names(cfg, novelty.new_attributes)
            novelty = NoveltyReport(
                new_keys=novelty.new_keys,
                new_attributes=tuple(a for a in novelty.new_attributes if a in kept),
            )
        try:
            chosen = select_insights(filtered, filtered_scores, novelty, cfg.rng_seed)
        except NoInsights:
            chosen = []
        return build_feed(report_type, cfg.user, sheets, chosen, filtered_scores)

    def feed_bytes(self, report_type: str, user: str = "default") -> bytes:
        return feed_to_bytes(self.feed_for(report_type, user))

    # ---------------- commands ----------------

    def run_command(self, user: str, text: str) -> dict:
        from .personalize import apply_command, parse_command

        cmd = parse_command(text)
        report_type = cmd.report_type
        if not self.store.has_report(report_type):
            raise UnknownReportType(report_type)
        cfg = self.user_config(report_type, user)
        warnings: list[str] = []
        if cmd.verb != "show":
            window = (
                cfg.window_size if cfg.window_size is not None else self.config.window
            )
            sheets, _, _, _ = self._scored(report_type, window, cfg.normalize)
            known = set()
            for sh in sheets:
                known.update(sh.table.header)
            cfg, warnings = apply_command(cfg, cmd, known_attributes=known)
            self.configs.save(cfg)
        feed = self._compute_feed(report_type, cfg)
        return {
            "user": user,
            "verb": cmd.verb,
            "report_type": report_type,
            "warnings": warnings,
            "feed": feed,
        }

    # ---------------- drill-down and dumps ----------------

    def get_series(self, key: str, report_type: str | None = None) -> dict:
        try:
            sid = SeriesId.from_key(key)
        except ValueError as exc:
            raise UnknownSeries(str(exc)) from exc
        reports = [report_type] if report_type else self.store.report_types()
        for rt in reports:
            if not self.store.has_report(rt):
                continue
            try:
                _, population, scores, _ = self._scored(
                    rt, self.config.window, self.config.normalize
                )
            except NoTableFound:
                continue
            series = population.get(sid)
            if series is not None:
                return {
                    "report_type": rt,
                    "series": {
                        "group": sid.group,
                        "entity": list(sid.entity),
                        "attribute": sid.attribute,
                    },
                    "points": [
                        {"ordinal": p.ordinal, "ts": p.ts, "value": p.value}
                        for p in series.points
                    ],
                    "stats": score_record(scores[sid]),
                }
        raise UnknownSeries(key)

    def dump_stats(self, report_type: str, user: str = "default") -> list[dict]:
        if not self.store.has_report(report_type):
            raise UnknownReportType(report_type)
        cfg = self.user_config(report_type, user)
        window = cfg.window_size if cfg.window_size is not None else self.config.window
        _, population, scores, _ = self._scored(report_type, window, cfg.normalize)
        filtered = filter_series(population, cfg)
        out = []
        for sid in sorted(filtered, key=SeriesId.sort_key):
            rec = {
                "series": {
                    "group": sid.group,
                    "entity": list(sid.entity),
                    "attribute": sid.attribute,
                },
                "n": filtered[sid].n,
            }
            rec.update(score_record(scores[sid]))
            out.append(rec)
        return out

    def dump_series(self, report_type: str) -> list[str]:
        if not self.store.has_report(report_type):
            raise UnknownReportType(report_type)
        _, population, _, _ = self._scored(
            report_type, self.config.window, self.config.normalize
        )
        return [
            series_dump_line(population[sid])
            for sid in sorted(population, key=SeriesId.sort_key)
        ]
