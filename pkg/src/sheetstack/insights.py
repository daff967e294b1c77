"""Insight selection and feed assembly.

Eligible series (>= 6 points) are ordered three ways per group: descending
m^2, descending mse, descending max Cook's distance. The composite rank is
the product of a series' 1-based positions in those lists. Per group the
feed carries one Highlight, a sharpest and a flattest Trend, one Outlier,
and one Delta; a Novelty insight is emitted once when anything is new.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace

from .analytics import NoveltyReport, RegressionStats, SeriesScore
from .errors import NoInsights
from .timeseries import GROUPS, Point, SeriesId, TimeSeries

HIGHLIGHT = "Highlight"
TREND = "Trend"
OUTLIER = "Outlier"
DELTA = "Delta"
NOVELTY = "Novelty"

NOVELTY_GROUP = "ALL"  # novelty is windowwide, not tied to one family
APPENDIX_SHORT_CAP = 25


@dataclass(frozen=True)
class GroupOrderings:
    group: str
    by_m2: tuple[SeriesId, ...]
    by_mse: tuple[SeriesId, ...]
    by_mcd: tuple[SeriesId, ...]

    def __bool__(self) -> bool:
        return bool(self.by_m2)


@dataclass(frozen=True)
class Insight:
    category: str
    group: str
    series: SeriesId | None
    stats: dict
    score: float
    points: tuple[Point, ...]
    narrative: str = ""


def build_orderings(stats: dict[SeriesId, RegressionStats], group: str) -> GroupOrderings:
    """Three total orders over the group's eligible series (ties: id ascending)."""
    sids = [sid for sid in stats if sid.group == group]

    def order(metric) -> tuple[SeriesId, ...]:
        return tuple(sorted(sids, key=lambda s: (-metric(stats[s]), s.sort_key())))

    return GroupOrderings(
        group=group,
        by_m2=order(lambda r: r.m * r.m),
        by_mse=order(lambda r: r.mse),
        by_mcd=order(lambda r: r.mcd),
    )


def composite_rank(orderings: GroupOrderings) -> dict[SeriesId, int]:
    """Product of 1-based positions across the three orderings; lower is better."""
    pos_m2 = {sid: i + 1 for i, sid in enumerate(orderings.by_m2)}
    pos_mse = {sid: i + 1 for i, sid in enumerate(orderings.by_mse)}
    pos_mcd = {sid: i + 1 for i, sid in enumerate(orderings.by_mcd)}
    return {sid: pos_m2[sid] * pos_mse[sid] * pos_mcd[sid] for sid in orderings.by_m2}


def _first_excluding(ordering, excluded) -> SeriesId | None:
    for sid in ordering:
        if sid not in excluded:
            return sid
    return ordering[0] if ordering else None  # pool exhausted: allow a double


def _last_excluding(ordering, excluded) -> SeriesId | None:
    for sid in reversed(ordering):
        if sid not in excluded:
            return sid
    return ordering[-1] if ordering else None


def select_group_picks(
    orderings: GroupOrderings, ranks: dict[SeriesId, int], rng: random.Random
) -> dict[str, SeriesId]:
    """Highlight / sharpest / flattest / Outlier picks for one group.

    Exclusions apply in that order; when an exclusion empties the pool the
    pick falls back to the unfiltered best (a doubled series).
    """
    if not orderings:
        return {}
    best = min(ranks.values())
    tied = sorted((sid for sid, r in ranks.items() if r == best), key=SeriesId.sort_key)
    highlight = tied[0] if len(tied) == 1 else rng.choice(tied)
    sharpest = _first_excluding(orderings.by_m2, {highlight})
    flattest = _last_excluding(orderings.by_m2, {highlight, sharpest})
    outlier = _first_excluding(orderings.by_mcd, {highlight, sharpest, flattest})
    return {
        "highlight": highlight,
        "sharpest": sharpest,
        "flattest": flattest,
        "outlier": outlier,
    }


def _entity_disp(entity: tuple[str, ...]) -> str:
    return "/".join(entity)


def _num(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _subject(group: str, sid: SeriesId) -> str:
    e = _entity_disp(sid.entity)
    if group == "CTS":
        return f"segment {e} ({sid.attribute}) row count"
    return f"{e}'s {sid.attribute}"


def render_narrative(insight: Insight) -> str:
    """Deterministic English template per (category, group)."""
    st = insight.stats
    if insight.category == NOVELTY:
        parts = []
        if st["new_keys"]:
            parts.append("key(s) " + ", ".join(_entity_disp(tuple(k)) for k in st["new_keys"]))
        if st["new_attributes"]:
            parts.append("attribute(s) " + ", ".join(st["new_attributes"]))
        return "New in the latest report: " + "; ".join(parts) + "."
    subject = _subject(insight.group, insight.series)
    n = st.get("n", len(insight.points))
    if insight.category == HIGHLIGHT:
        return (
            f"{subject} is the strongest combined signal (composite rank {st['composite_rank']}): "
            f"slope {_num(st['m'])} per period, mse {_num(st['mse'])}, "
            f"max Cook's distance {_num(st['mcd'])} over {n} reports."
        )
    if insight.category == TREND:
        if st["which"] == "sharpest":
            word = "rising" if st["m"] > 0 else ("falling" if st["m"] < 0 else "flat")
            return (
                f"{subject} shows the sharpest {word} trend "
                f"(slope {_num(st['m'])} per period) over {n} reports."
            )
        return (
            f"{subject} shows the flattest trend "
            f"(slope {_num(st['m'])} per period) over {n} reports."
        )
    if insight.category == OUTLIER:
        return (
            f"{subject} deviates most from its trend at period {st['at_ordinal']}: "
            f"value {_num(st['at_value'])} has Cook's distance {_num(st['mcd'])}."
        )
    if insight.category == DELTA:
        return (
            f"{subject} moved from {_num(st['from_value'])} to {_num(st['to_value'])} "
            f"across the last two reports (squared change {_num(st['squared_diff'])})."
        )
    raise ValueError(f"unknown category {insight.category!r}")


def _with_narrative(insight: Insight) -> Insight:
    return replace(insight, narrative=render_narrative(insight))


def _regression_snapshot(reg: RegressionStats, n: int) -> dict:
    return {
        "m": reg.m,
        "b": reg.b,
        "mse": reg.mse,
        "mcd": reg.mcd,
        "at_ordinal": reg.mcd_point[0],
        "at_value": reg.mcd_point[1],
        "n": n,
    }


def select_insights(
    population: dict[SeriesId, TimeSeries],
    scores: dict[SeriesId, SeriesScore],
    novelty: NoveltyReport,
    rng_seed: int = 42,
) -> list[Insight]:
    """All insights for one window, in fixed category-major order."""
    regression = {
        sid: sc.regression for sid, sc in scores.items() if sc.regression is not None
    }
    picks_by_group: dict[str, dict[str, SeriesId]] = {}
    ranks_by_group: dict[str, dict[SeriesId, int]] = {}
    for group in GROUPS:
        orderings = build_orderings(regression, group)
        ranks = composite_rank(orderings)
        rng = random.Random(f"{rng_seed}:{group}")
        picks_by_group[group] = select_group_picks(orderings, ranks, rng)
        ranks_by_group[group] = ranks

    def mk(category: str, group: str, sid: SeriesId, stats: dict, score) -> Insight:
        return _with_narrative(
            Insight(
                category=category,
                group=group,
                series=sid,
                stats=stats,
                score=score,
                points=population[sid].points,
            )
        )

    out: list[Insight] = []
    for group in GROUPS:
        picks = picks_by_group[group]
        if not picks:
            continue
        sid = picks["highlight"]
        reg = regression[sid]
        snap = _regression_snapshot(reg, population[sid].n)
        snap["composite_rank"] = ranks_by_group[group][sid]
        # reciprocal rank keeps every category's score higher-is-better
        out.append(mk(HIGHLIGHT, group, sid, snap, 1.0 / ranks_by_group[group][sid]))
    for group in GROUPS:
        picks = picks_by_group[group]
        if not picks:
            continue
        for which in ("sharpest", "flattest"):
            sid = picks[which]
            reg = regression[sid]
            snap = _regression_snapshot(reg, population[sid].n)
            snap["which"] = which
            out.append(mk(TREND, group, sid, snap, reg.m * reg.m))
    for group in GROUPS:
        picks = picks_by_group[group]
        if not picks:
            continue
        sid = picks["outlier"]
        reg = regression[sid]
        out.append(
            mk(OUTLIER, group, sid, _regression_snapshot(reg, population[sid].n), reg.mcd)
        )
    for group in GROUPS:
        candidates = [
            (sid, sc.delta)
            for sid, sc in scores.items()
            if sid.group == group and sc.delta is not None
        ]
        if not candidates:
            continue
        candidates.sort(key=lambda sd: (-sd[1].squared_diff, sd[0].sort_key()))
        sid, delta = candidates[0]
        snap = {
            "squared_diff": delta.squared_diff,
            "from_ordinal": delta.from_ordinal,
            "to_ordinal": delta.to_ordinal,
            "from_value": delta.from_value,
            "to_value": delta.to_value,
        }
        out.append(mk(DELTA, group, sid, snap, delta.squared_diff))
    if novelty:
        snap = {
            "new_keys": [list(k) for k in novelty.new_keys],
            "new_attributes": list(novelty.new_attributes),
        }
        out.append(
            _with_narrative(
                Insight(
                    category=NOVELTY,
                    group=NOVELTY_GROUP,
                    series=None,
                    stats=snap,
                    score=len(novelty.new_keys) + len(novelty.new_attributes),
                    points=(),
                )
            )
        )
    if not out:
        raise NoInsights("window produced no insights")
    return out


def build_feed(
    report_type: str,
    user: str,
    window_sheets,
    insights: list[Insight],
    scores: dict[SeriesId, SeriesScore] | None = None,
) -> dict:
    """Wire-format document (schema feed.schema.v1); field order is fixed."""
    sheets = sorted(window_sheets, key=lambda sh: sh.ordinal)
    from_ts = sheets[0].timestamp if sheets else 0
    to_ts = sheets[-1].timestamp if sheets else 0
    doc = {
        "report_type": report_type,
        "window": {"from_ts": from_ts, "to_ts": to_ts, "count": len(sheets)},
        "user": user,
        "generated_at": to_ts,
        "insights": [
            {
                "category": ins.category,
                "group": ins.group,
                "entity": list(ins.series.entity) if ins.series else [],
                "attribute": ins.series.attribute if ins.series else "",
                "narrative": ins.narrative,
                "score": ins.score,
                "points": [
                    {"ordinal": p.ordinal, "ts": p.ts, "value": p.value}
                    for p in ins.points
                ],
            }
            for ins in insights
        ],
    }
    shorts = []
    if scores:
        # most volatile short series first; the cap bounds feed size
        ranked = sorted(
            ((sid, sc.short) for sid, sc in scores.items() if sc.short is not None),
            key=lambda pair: (-pair[1].variance, pair[0].sort_key()),
        )
        for sid, short in ranked[:APPENDIX_SHORT_CAP]:
            shorts.append(
                {
                    "group": sid.group,
                    "entity": list(sid.entity),
                    "attribute": sid.attribute,
                    "mean": short.mean,
                    "variance": short.variance,
                }
            )
    doc["appendix"] = {"short_series": shorts}
    return doc


def feed_to_bytes(feed: dict) -> bytes:
    """Canonical serialization; byte-identical across runs."""
    return json.dumps(feed, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
