"""HTTP facade over the engine.

Endpoints:
  POST /reports/{type}/sheets   multipart upload (optional ?ts=epoch)
  GET  /feeds/{type}?user=      latest feed for a user (default feed otherwise)
  POST /commands                {"user": ..., "text": ...}
  GET  /series/{key}?report=    drill-down by canonical series key
"""

from __future__ import annotations

import json

from fastapi import FastAPI, File, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .errors import (
    CommandParseError,
    DuplicateTimestamp,
    EmptySheet,
    MalformedFile,
    NoTableFound,
    SheetstackError,
    UnknownReportType,
    UnknownSeries,
)
from .pipeline import Engine

_STATUS = (
    (CommandParseError, 422),
    (UnknownReportType, 404),
    (UnknownSeries, 404),
    (MalformedFile, 400),
    (DuplicateTimestamp, 400),
    (EmptySheet, 400),
    (NoTableFound, 400),
)


def _compact(doc, status_code: int = 200) -> Response:
    return Response(
        content=json.dumps(doc, separators=(",", ":"), ensure_ascii=False),
        media_type="application/json",
        status_code=status_code,
    )


class CommandIn(BaseModel):
    text: str
    user: str = "default"


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="sheetstack", docs_url=None, redoc_url=None)
    # The chat client is served as static files from its own origin.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(SheetstackError)
    async def _handle(request, exc: SheetstackError):
        code = 500
        for cls, status in _STATUS:
            if isinstance(exc, cls):
                code = status
                break
        body = {"error": type(exc).__name__, "detail": str(exc)}
        if isinstance(exc, CommandParseError):
            body["help"] = exc.help_text
        return JSONResponse(status_code=code, content=body)

    @app.get("/")
    def index():
        return {
            "service": "sheetstack",
            "report_types": engine.store.report_types(),
            "endpoints": [
                "POST /reports/{type}/sheets",
                "GET /feeds/{type}?user=",
                "POST /commands",
                "GET /series/{key}?report=",
            ],
        }

    @app.post("/reports/{report_type}/sheets", status_code=201)
    async def upload(report_type: str, file: UploadFile = File(...), ts: int | None = None):
        data = await file.read()
        if len(data) > engine.config.max_upload_bytes:
            raise HTTPException(
                status_code=413,
                detail=f"upload exceeds {engine.config.max_upload_bytes} bytes",
            )
        name = file.filename or ""
        fmt = "xlsx" if name.lower().endswith(".xlsx") else "csv"
        summary = engine.ingest(
            report_type, data, fmt=fmt, explicit_timestamp=ts, source_name=name
        )
        return _compact(summary, status_code=201)

    @app.get("/feeds/{report_type}")
    def feed(report_type: str, user: str = "default"):
        return Response(
            content=engine.feed_bytes(report_type, user),
            media_type="application/json",
        )

    @app.post("/commands")
    def command(payload: CommandIn):
        return _compact(engine.run_command(payload.user, payload.text))

    @app.get("/series/{key:path}")
    def series(key: str, report: str | None = None):
        return _compact(engine.get_series(key, report_type=report))

    return app
