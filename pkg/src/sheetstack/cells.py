"""Cell model and sheet parsing.

Every incoming spreadsheet (CSV or XLSX) is normalized into a rectangular
grid of typed cells. All text-to-type coercion happens here, once; the rest
of the pipeline only ever looks at cell kinds.
"""

from __future__ import annotations

import calendar
import csv
import io
import math
import re
import zipfile
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from xml.etree import ElementTree

from .errors import MalformedFile


class CellKind(str, Enum):
    EMPTY = "empty"
    TEXT = "text"
    NUMBER = "number"
    TIMESTAMP = "timestamp"
    BOOLEAN = "boolean"


@dataclass(frozen=True)
class Cell:
    """One typed cell. ``value`` is None / str / int|float / int epoch / bool."""

    kind: CellKind
    value: object = None

    @property
    def is_empty(self) -> bool:
        return self.kind is CellKind.EMPTY


EMPTY_CELL = Cell(CellKind.EMPTY)

_TRUE_WORDS = {"true", "yes"}
_FALSE_WORDS = {"false", "no"}
_CURRENCY = "$€£₹"
_GROUPED_NUMBER = re.compile(r"^[+-]?\d{1,3}(,\d{3})+(\.\d+)?$")

# Cell-level timestamp formats; dates without time parse to midnight UTC.
_CELL_TS_FORMATS = (
    "%Y-%m-%d",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y/%m/%d",
)


def _try_number(text: str):
    t = text
    if t and t[0] in _CURRENCY:
        t = t[1:].strip()
    if t.startswith("-") and t[1:2] in _CURRENCY:
        t = "-" + t[2:].strip()
    if _GROUPED_NUMBER.match(t):
        t = t.replace(",", "")
    # Zero-padded digit runs are ID-like codes, not numbers.
    if len(t) > 1 and t[0] == "0" and t.isdigit():
        return None
    try:
        return int(t)
    except ValueError:
        pass
    try:
        x = float(t)
    except ValueError:
        return None
    return x if math.isfinite(x) else None


def _try_timestamp(text: str):
    for fmt in _CELL_TS_FORMATS:
        try:
            dt = datetime.strptime(text, fmt)
        except ValueError:
            continue
        if dt.year < 1970:
            return None
        return calendar.timegm(dt.timetuple())
    return None


def parse_cell(raw: str) -> Cell:
    """Coerce one raw string into a typed cell."""
    text = raw.strip()
    if not text:
        return EMPTY_CELL
    num = _try_number(text)
    if num is not None:
        return Cell(CellKind.NUMBER, num)
    low = text.lower()
    if low in _TRUE_WORDS:
        return Cell(CellKind.BOOLEAN, True)
    if low in _FALSE_WORDS:
        return Cell(CellKind.BOOLEAN, False)
    ts = _try_timestamp(text)
    if ts is not None:
        return Cell(CellKind.TIMESTAMP, ts)
    return Cell(CellKind.TEXT, text)


def cell_to_text(cell: Cell) -> str:
    """Canonical string form; parse_cell(cell_to_text(c)) == c."""
    if cell.kind is CellKind.EMPTY:
        return ""
    if cell.kind is CellKind.TEXT:
        return cell.value
    if cell.kind is CellKind.NUMBER:
        v = cell.value
        return str(v) if isinstance(v, int) else repr(v)
    if cell.kind is CellKind.BOOLEAN:
        return "true" if cell.value else "false"
    return datetime.utcfromtimestamp(cell.value).strftime("%Y-%m-%dT%H:%M:%S")


@dataclass(frozen=True)
class SheetGrid:
    """Rectangular grid of cells; every row has the same width >= 1."""

    rows: tuple[tuple[Cell, ...], ...]

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def height(self) -> int:
        return len(self.rows)

    def non_empty_count(self) -> int:
        return sum(1 for row in self.rows for c in row if not c.is_empty)


def grid_from_rows(raw_rows: list[list[Cell]]) -> SheetGrid:
    width = max((len(r) for r in raw_rows), default=0)
    width = max(width, 1)
    padded = tuple(
        tuple(r) + (EMPTY_CELL,) * (width - len(r)) for r in raw_rows
    )
    return SheetGrid(rows=padded)


def grid_from_csv_bytes(data: bytes) -> SheetGrid:
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise MalformedFile(f"not valid UTF-8: {exc}") from None
    try:
        reader = csv.reader(io.StringIO(text, newline=""))
        rows = [[parse_cell(field) for field in record] for record in reader]
    except csv.Error as exc:
        raise MalformedFile(f"CSV parse failed: {exc}") from None
    return grid_from_rows(rows)


def grid_to_csv_bytes(grid: SheetGrid) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    for row in grid.rows:
        writer.writerow([cell_to_text(c) for c in row])
    return buf.getvalue().encode("utf-8")


# --- minimal XLSX reader (first worksheet, values only) ---------------------

_XLSX_NS = {
    "m": "http://schemas.openxmlformats.org/spreadsheetml/2006/main",
    "r": "http://schemas.openxmlformats.org/officeDocument/2006/relationships",
    "pr": "http://schemas.openxmlformats.org/package/2006/relationships",
}


def _col_index(ref: str) -> int:
    """'C5' -> 2 (0-based column)."""
    n = 0
    for ch in ref:
        if ch.isalpha():
            n = n * 26 + (ord(ch.upper()) - ord("A") + 1)
        else:
            break
    return n - 1


def _first_sheet_path(zf: zipfile.ZipFile) -> str:
    wb = ElementTree.fromstring(zf.read("xl/workbook.xml"))
    sheet = wb.find("m:sheets/m:sheet", _XLSX_NS)
    if sheet is None:
        raise MalformedFile("workbook has no sheets")
    rid = sheet.get(f"{{{_XLSX_NS['r']}}}id")
    rels = ElementTree.fromstring(zf.read("xl/_rels/workbook.xml.rels"))
    for rel in rels.findall("pr:Relationship", _XLSX_NS):
        if rel.get("Id") == rid:
            target = rel.get("Target").lstrip("/")
            return target if target.startswith("xl/") else f"xl/{target}"
    raise MalformedFile("first sheet relationship not found")


def _shared_strings(zf: zipfile.ZipFile) -> list[str]:
    try:
        root = ElementTree.fromstring(zf.read("xl/sharedStrings.xml"))
    except KeyError:
        return []
    strings = []
    for si in root.findall("m:si", _XLSX_NS):
        strings.append("".join(t.text or "" for t in si.iter(f"{{{_XLSX_NS['m']}}}t")))
    return strings


def grid_from_xlsx_bytes(data: bytes) -> SheetGrid:
    try:
        zf = zipfile.ZipFile(io.BytesIO(data))
        sheet_xml = zf.read(_first_sheet_path(zf))
        shared = _shared_strings(zf)
        root = ElementTree.fromstring(sheet_xml)
    except (zipfile.BadZipFile, KeyError, ElementTree.ParseError) as exc:
        raise MalformedFile(f"not a readable XLSX file: {exc}") from None

    rows: list[list[Cell]] = []
    for row_el in root.findall("m:sheetData/m:row", _XLSX_NS):
        cells: list[Cell] = []
        for c_el in row_el.findall("m:c", _XLSX_NS):
            ref = c_el.get("r")
            idx = _col_index(ref) if ref else len(cells)
            while len(cells) < idx:
                cells.append(EMPTY_CELL)
            cells.append(_xlsx_cell(c_el, shared))
        rows.append(cells)
    return grid_from_rows(rows)


def _xlsx_cell(c_el, shared: list[str]) -> Cell:
    ctype = c_el.get("t", "n")
    m = _XLSX_NS["m"]
    if ctype == "inlineStr":
        text = "".join(t.text or "" for t in c_el.iter(f"{{{m}}}t"))
        return parse_cell(text)
    v_el = c_el.find("m:v", _XLSX_NS)
    if v_el is None or v_el.text is None:
        return EMPTY_CELL
    raw = v_el.text
    if ctype == "s":
        try:
            return parse_cell(shared[int(raw)])
        except (ValueError, IndexError):
            return EMPTY_CELL
    if ctype == "b":
        return Cell(CellKind.BOOLEAN, raw.strip() == "1")
    if ctype == "str":
        return parse_cell(raw)
    if ctype == "e":
        return EMPTY_CELL
    num = _try_number(raw.strip())
    return Cell(CellKind.NUMBER, num) if num is not None else parse_cell(raw)


def parse_grid(data: bytes, fmt: str) -> SheetGrid:
    """Parse uploaded bytes per the declared format ('csv' or 'xlsx')."""
    if fmt == "csv":
        return grid_from_csv_bytes(data)
    if fmt == "xlsx":
        return grid_from_xlsx_bytes(data)
    raise MalformedFile(f"unsupported format: {fmt!r}")
