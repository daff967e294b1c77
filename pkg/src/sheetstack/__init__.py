"""sheetstack: insight feeds from periodic spreadsheet snapshots.

Drop CSV or XLSX exports of a recurring report into the store; the engine
finds the main table, classifies columns, builds timeseries over a moving
window, scores them, and serves ranked, personalized insight feeds over
HTTP and a CLI.
"""

from __future__ import annotations

import json
from importlib import resources

from .analytics import (
    DeltaStat,
    NoveltyReport,
    RegressionStats,
    SeriesScore,
    ShortStats,
    cook_distance,
    detect_novelty,
    fit_ols,
    latest_delta,
    score_window,
    short_stats,
)
from .cells import Cell, CellKind, SheetGrid, parse_cell, parse_grid
from .errors import (
    CommandParseError,
    DegenerateSeries,
    DuplicateTimestamp,
    EmptySheet,
    MalformedFile,
    NoInsights,
    NoTableFound,
    SheetstackError,
    TooShort,
    UnknownReportType,
    UnknownSeries,
)
from .ingest import ReportSnapshot, SnapshotStore, WindowConfig, timestamp_from_name
from .insights import (
    DELTA,
    HIGHLIGHT,
    NOVELTY,
    NOVELTY_GROUP,
    OUTLIER,
    TREND,
    GroupOrderings,
    Insight,
    build_feed,
    build_orderings,
    composite_rank,
    feed_to_bytes,
    render_narrative,
    select_group_picks,
    select_insights,
)
from .personalize import (
    Command,
    ConfigStore,
    UserConfig,
    apply_command,
    filter_series,
    parse_command,
)
from .pipeline import Engine, EngineConfig, score_record
from .table_extract import (
    ClassifierConfig,
    ColumnKind,
    ExtractedTable,
    SchemaProfile,
    classify_attributes,
    extract_table,
    infer_column_kind,
    select_categorical_subset,
)
from .timeseries import (
    CTS,
    GROUPS,
    NTS,
    RTS,
    Point,
    SeriesId,
    TimeSeries,
    WindowSheet,
    add_rank_columns,
    build_cts,
    build_nts,
    build_population,
    build_rts,
    competition_ranks,
)

__version__ = "0.1.0"

FEED_SCHEMA_NAME = "feed.schema.v1.json"


def load_feed_schema() -> dict:
    """The versioned JSON schema for the feed wire format."""
    with resources.files(__package__).joinpath(FEED_SCHEMA_NAME).open("rb") as fh:
        return json.load(fh)
