"""Cell parsing, grid round-trips, and the XLSX reader."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import csv_bytes, xlsx_bytes
from sheetstack import MalformedFile, parse_grid
from sheetstack.cells import (
    Cell,
    CellKind,
    EMPTY_CELL,
    cell_to_text,
    grid_from_csv_bytes,
    grid_from_rows,
    grid_to_csv_bytes,
    parse_cell,
)


def kind_of(raw: str) -> CellKind:
    return parse_cell(raw).kind


class TestParseCell:
    @pytest.mark.parametrize(
        "raw,value",
        [
            ("42", 42),
            ("-3", -3),
            ("3.50", 3.5),
            ("1e3", 1000.0),
            ("$1,234.50", 1234.5),
            ("-$5", -5),
            ("1,234,567", 1234567),
            ("0", 0),
        ],
    )
    def test_numbers(self, raw, value):
        cell = parse_cell(raw)
        assert cell.kind is CellKind.NUMBER
        assert cell.value == value

    @pytest.mark.parametrize("raw", ["007", "0042"])
    def test_zero_padded_codes_stay_text(self, raw):
        cell = parse_cell(raw)
        assert cell.kind is CellKind.TEXT
        assert cell.value == raw

    @pytest.mark.parametrize("raw", ["nan", "inf", "-inf", "NaN"])
    def test_non_finite_never_number(self, raw):
        assert parse_cell(raw).kind is CellKind.TEXT

    @pytest.mark.parametrize(
        "raw,value", [("true", True), ("Yes", True), ("FALSE", False), ("no", False)]
    )
    def test_booleans(self, raw, value):
        cell = parse_cell(raw)
        assert cell.kind is CellKind.BOOLEAN
        assert cell.value is value

    def test_timestamps(self):
        cell = parse_cell("2020-03-01")
        assert cell.kind is CellKind.TIMESTAMP
        assert cell.value == 1583020800  # 2020-03-01T00:00:00Z
        assert parse_cell("2020-03-01T06:30:00").value == 1583020800 + 6 * 3600 + 1800
        assert parse_cell("1969-12-31").kind is CellKind.TEXT

    def test_empty_and_whitespace(self):
        assert parse_cell("") is EMPTY_CELL
        assert parse_cell("   ") is EMPTY_CELL

    def test_text_never_empty_string(self):
        cell = parse_cell("  hello  ")
        assert cell.kind is CellKind.TEXT
        assert cell.value == "hello"

    @pytest.mark.parametrize(
        "cell,text",
        [
            (Cell(CellKind.NUMBER, 5), "5"),
            (Cell(CellKind.NUMBER, 5.25), "5.25"),
            (Cell(CellKind.BOOLEAN, True), "true"),
            (EMPTY_CELL, ""),
        ],
    )
    def test_cell_to_text(self, cell, text):
        assert cell_to_text(cell) == text

    @given(
        st.one_of(
            st.integers(min_value=-(10**12), max_value=10**12),
            st.floats(allow_nan=False, allow_infinity=False, width=64),
            st.booleans(),
            st.text(min_size=1, max_size=20).map(str.strip).filter(bool),
        )
    )
    def test_canonical_text_round_trip(self, value):
        """parse(canonical_text(parse(x))) is a fixed point."""
        first = parse_cell(str(value))
        text = cell_to_text(first)
        second = parse_cell(text)
        assert second == first


class TestGrids:
    def test_rectangular_padding(self):
        grid = grid_from_rows(
            [[parse_cell("a")], [parse_cell("b"), parse_cell("c")]]
        )
        assert grid.width == 2
        assert grid.height == 2
        assert grid.rows[0][1].is_empty

    def test_csv_round_trip_bytes(self):
        data = csv_bytes(
            [["Name", "Qty", "When"], ["ada", 3, "2021-05-01"], ["bob", "", "x,y"]]
        )
        grid = grid_from_csv_bytes(data)
        out = grid_to_csv_bytes(grid)
        assert grid_from_csv_bytes(out) == grid
        assert grid_to_csv_bytes(grid_from_csv_bytes(out)) == out

    def test_csv_rejects_non_utf8(self):
        with pytest.raises(MalformedFile):
            grid_from_csv_bytes(b"\xff\xfe\x00bad")

    def test_quoted_commas(self):
        grid = grid_from_csv_bytes(b'a,"x, y",c\r\n')
        assert grid.width == 3
        assert grid.rows[0][1].value == "x, y"

    def test_non_empty_count(self):
        grid = grid_from_csv_bytes(b"a,,b\r\n,,\r\n")
        assert grid.non_empty_count() == 2


class TestXlsx:
    def test_reads_basic_workbook(self):
        data = xlsx_bytes([["ID", "Sales", "Active"], ["P1", 10.5, True], ["P2", 3, False]])
        grid = parse_grid(data, "xlsx")
        assert grid.height == 3
        assert grid.rows[0][0].value == "ID"
        assert grid.rows[1][1] == Cell(CellKind.NUMBER, 10.5)
        assert grid.rows[1][2] == Cell(CellKind.BOOLEAN, True)
        assert grid.rows[2][1] == Cell(CellKind.NUMBER, 3)

    def test_sparse_rows_pad(self):
        data = xlsx_bytes([["a", "", "c"], ["d"]])
        grid = parse_grid(data, "xlsx")
        assert grid.width == 3
        assert grid.rows[0][1].is_empty
        assert grid.rows[1][2].is_empty

    def test_malformed_zip(self):
        with pytest.raises(MalformedFile):
            parse_grid(b"this is not a zip", "xlsx")

    def test_unknown_format(self):
        with pytest.raises(MalformedFile):
            parse_grid(b"a,b\r\n", "parquet")
