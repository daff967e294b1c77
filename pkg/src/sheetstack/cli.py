"""Command line mirror of the service endpoints.

Subcommands: ingest, feed, command, series, dump-stats, dump-series, serve.
Global flags (or SHEETSTACK_* env equivalents): --data-root, --window,
--seed, --normalize, --backend; serve adds --host/--port.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import CommandParseError, SheetstackError
from .insights import feed_to_bytes
from .pipeline import DEFAULT_MAX_UPLOAD, Engine, EngineConfig


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "on", "yes")


def _env_int(name: str, default=None):
    raw = os.environ.get(name, "").strip()
    return int(raw) if raw else default


def _window_arg(raw: str):
    if raw.strip().lower() in ("unbounded", "none", ""):
        return None
    return int(raw)


def _env_window(name: str):
    raw = os.environ.get(name, "")
    return _window_arg(raw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sheetstack",
        description="Insight feeds from periodic spreadsheet snapshots.",
    )
    p.add_argument(
        "--data-root",
        default=os.environ.get("SHEETSTACK_DATA_ROOT", "./data"),
        help="snapshot and config directory (SHEETSTACK_DATA_ROOT)",
    )
    p.add_argument(
        "--window",
        type=_window_arg,
        default=_env_window("SHEETSTACK_WINDOW"),
        help="moving window size (>= 2) or 'unbounded' to use every snapshot (SHEETSTACK_WINDOW)",
    )
    p.add_argument(
        "--seed",
        type=int,
        default=_env_int("SHEETSTACK_SEED", 42),
        help="tie-break RNG seed (SHEETSTACK_SEED)",
    )
    p.add_argument(
        "--normalize",
        action="store_true",
        default=_env_flag("SHEETSTACK_NORMALIZE"),
        help="min-max scale series before fitting (SHEETSTACK_NORMALIZE)",
    )
    p.add_argument(
        "--backend",
        choices=("auto", "numba", "numpy"),
        default=os.environ.get("SHEETSTACK_BACKEND") or "auto",
        help="scoring kernel backend (SHEETSTACK_BACKEND)",
    )

    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("ingest", help="add one snapshot and recompute feeds")
    sp.add_argument("report_type")
    sp.add_argument("file", type=Path)
    sp.add_argument("--ts", type=int, default=None, help="explicit epoch timestamp")
    sp.add_argument("--fmt", choices=("csv", "xlsx"), default=None)

    sp = sub.add_parser("feed", help="print a feed as canonical JSON")
    sp.add_argument("report_type")
    sp.add_argument("--user", default="default")

    sp = sub.add_parser("command", help="run one personalization command")
    sp.add_argument("text")
    sp.add_argument("--user", default="default")

    sp = sub.add_parser("series", help="drill into one series by canonical key")
    sp.add_argument("key")
    sp.add_argument("--report", default=None)

    sp = sub.add_parser("dump-stats", help="per-series stats records (JSON lines)")
    sp.add_argument("report_type")
    sp.add_argument("--user", default="default")

    sp = sub.add_parser("dump-series", help="per-series point dump (text lines)")
    sp.add_argument("report_type")

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default=os.environ.get("SHEETSTACK_HOST", "127.0.0.1"))
    sp.add_argument("--port", type=int, default=_env_int("SHEETSTACK_PORT", 8000))

    return p


def _engine(args) -> Engine:
    return Engine(
        EngineConfig(
            data_root=Path(args.data_root),
            window=args.window,
            seed=args.seed,
            normalize=args.normalize,
            backend=None if args.backend == "auto" else args.backend,
            max_upload_bytes=_env_int("SHEETSTACK_MAX_UPLOAD", DEFAULT_MAX_UPLOAD),
        )
    )


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    engine = _engine(args)
    try:
        if args.cmd == "ingest":
            fmt = args.fmt or ("xlsx" if args.file.suffix.lower() == ".xlsx" else "csv")
            summary = engine.ingest(
                args.report_type,
                args.file.read_bytes(),
                fmt=fmt,
                explicit_timestamp=args.ts,
                source_name=args.file.name,
            )
            _emit(summary)
        elif args.cmd == "feed":
            sys.stdout.write(
                engine.feed_bytes(args.report_type, args.user).decode("utf-8") + "\n"
            )
        elif args.cmd == "command":
            _emit(engine.run_command(args.user, args.text))
        elif args.cmd == "series":
            _emit(engine.get_series(args.key, report_type=args.report))
        elif args.cmd == "dump-stats":
            for rec in engine.dump_stats(args.report_type, args.user):
                sys.stdout.write(json.dumps(rec, ensure_ascii=False) + "\n")
        elif args.cmd == "dump-series":
            for line in engine.dump_series(args.report_type):
                sys.stdout.write(line + "\n")
        elif args.cmd == "serve":
            import uvicorn

            from .service import create_app

            uvicorn.run(create_app(engine), host=args.host, port=args.port)
        return 0
    except CommandParseError as exc:
        sys.stderr.write(
            json.dumps(
                {"error": "CommandParseError", "detail": str(exc), "help": exc.help_text},
                indent=2,
            )
            + "\n"
        )
        return 2
    except SheetstackError as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}, indent=2)
            + "\n"
        )
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
