"""HTTP surface and engine behavior under real request flows."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from corpus import DAY, T0, csv_bytes, sales_rows, xlsx_bytes
from sheetstack import Engine, EngineConfig, feed_to_bytes, load_feed_schema
from sheetstack.service import create_app

import random


def make_engine(data_root, window=10, max_upload=None):
    kw = {"data_root": data_root, "window": window}
    if max_upload is not None:
        kw["max_upload_bytes"] = max_upload
    return Engine(EngineConfig(**kw))


@pytest.fixture()
def engine(data_root):
    return make_engine(data_root)


@pytest.fixture()
def client(engine):
    return TestClient(create_app(engine))


def upload(client, day, report="sales", fmt="csv", rows=None):
    rows = rows if rows is not None else sales_rows(day, random.Random(day))
    if fmt == "csv":
        body, ctype, name = csv_bytes(rows), "text/csv", f"s{day}.csv"
    else:
        body, ctype, name = xlsx_bytes(rows), "application/octet-stream", f"s{day}.xlsx"
    return client.post(
        f"/reports/{report}/sheets",
        params={"ts": T0 + day * DAY},
        files={"file": (name, body, ctype)},
    )


class TestUpload:
    def test_first_upload_created_and_baseline_feed(self, client):
        resp = upload(client, 0)
        assert resp.status_code == 201
        doc = resp.json()
        assert doc["snapshot"]["ordinal"] == 0
        assert doc["window"]["count"] == 1
        feed = client.get("/feeds/sales").json()
        cats = {i["category"] for i in feed["insights"]}
        assert cats == {"Novelty"}  # single sheet: everything is new

    def test_xlsx_accepted(self, client):
        assert upload(client, 0, fmt="xlsx").status_code == 201
        feed = client.get("/feeds/sales").json()
        assert feed["window"]["count"] == 1

    def test_duplicate_timestamp_400(self, client):
        upload(client, 0)
        resp = upload(client, 0)
        assert resp.status_code == 400
        assert "error" in resp.json()

    def test_unparseable_400(self, client):
        resp = client.post(
            "/reports/sales/sheets",
            files={"file": ("x.csv", b"\xff\xfe\x00bad", "text/csv")},
        )
        assert resp.status_code == 400

    def test_no_table_400(self, client):
        body = csv_bytes([["just-one-cell"], [""], ["another"]])
        resp = client.post(
            "/reports/sales/sheets", files={"file": ("x.csv", body, "text/csv")}
        )
        assert resp.status_code == 400

    def test_oversize_413(self, data_root):
        client = TestClient(create_app(make_engine(data_root, max_upload=1024)))
        big = csv_bytes(
            [["ID", "Sales"]] + [[f"P{i}", i] for i in range(500)]
        )
        assert len(big) > 1024
        resp = client.post(
            "/reports/sales/sheets", files={"file": ("x.csv", big, "text/csv")}
        )
        assert resp.status_code == 413

    def test_read_your_writes(self, client):
        for day in range(7):
            resp = upload(client, day)
            feed = client.get("/feeds/sales").json()
            assert feed["window"]["count"] == resp.json()["window"]["count"] == day + 1
            assert feed["window"]["to_ts"] == T0 + day * DAY


class TestWindowSlide:
    def test_eleventh_upload_drops_oldest(self, client):
        for day in range(10):
            upload(client, day)
        feed = client.get("/feeds/sales").json()
        assert feed["window"]["count"] == 10
        assert feed["window"]["from_ts"] == T0

        upload(client, 10)
        feed = client.get("/feeds/sales").json()
        assert feed["window"]["count"] == 10
        assert feed["window"]["from_ts"] == T0 + 1 * DAY
        assert feed["window"]["to_ts"] == T0 + 10 * DAY


class TestFeeds:
    def test_unknown_report_404(self, client):
        assert client.get("/feeds/nope").status_code == 404

    def test_feed_matches_schema(self, client):
        import jsonschema

        for day in range(8):
            upload(client, day)
        feed = client.get("/feeds/sales").json()
        jsonschema.validate(feed, load_feed_schema())

    def test_all_categories_at_full_window(self, client):
        for day in range(12):
            upload(client, day)
        feed = client.get("/feeds/sales").json()
        cats = [i["category"] for i in feed["insights"]]
        assert cats == sorted(
            cats,
            key=["Highlight", "Trend", "Outlier", "Delta", "Novelty"].index,
        )
        assert {"Highlight", "Trend", "Outlier", "Delta"} <= set(cats)

    def test_http_bytes_equal_library_bytes(self, client, engine):
        for day in range(6):
            upload(client, day)
        http = client.get("/feeds/sales").content
        assert http == engine.feed_bytes("sales")


class TestCommands:
    def seed(self, client, days=8):
        for day in range(days):
            upload(client, day)

    def test_command_feed_matches_subsequent_get(self, client):
        self.seed(client)
        resp = client.post(
            "/commands",
            json={"text": "use attributes Sales for sales", "user": "alice"},
        )
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["verb"] == "use"
        follow = client.get("/feeds/sales", params={"user": "alice"}).content
        assert feed_to_bytes(doc["feed"]) == follow

    def test_filter_confines_attributes(self, client):
        self.seed(client)
        doc = client.post(
            "/commands",
            json={"text": "use attributes Sales for sales", "user": "alice"},
        ).json()
        attrs = {
            i["attribute"]
            for i in doc["feed"]["insights"]
            if i["category"] not in ("Novelty",)
        }
        assert attrs <= {"Sales", "Sales-rank"}

    def test_set_window_shrinks_count(self, client):
        self.seed(client)
        doc = client.post(
            "/commands", json={"text": "set window 5 for sales", "user": "bob"}
        ).json()
        assert doc["feed"]["window"]["count"] == 5
        # default user unaffected
        assert client.get("/feeds/sales").json()["window"]["count"] == 8

    def test_reset_restores_default_feed(self, client):
        self.seed(client)
        client.post("/commands", json={"text": "set window 5 for sales", "user": "eve"})
        doc = client.post(
            "/commands", json={"text": "reset preferences for sales", "user": "eve"}
        ).json()
        default = client.get("/feeds/sales").json()
        # identical content; only the user field names eve
        assert doc["feed"]["user"] == "eve"
        assert doc["feed"]["insights"] == default["insights"]
        assert doc["feed"]["window"] == default["window"]
        assert doc["feed"]["appendix"] == default["appendix"]

    def test_show_does_not_mutate(self, client, engine):
        self.seed(client)
        client.post("/commands", json={"text": "set window 5 for sales", "user": "kim"})
        before = engine.user_config("sales", "kim")
        doc = client.post(
            "/commands", json={"text": "show insights for sales", "user": "kim"}
        ).json()
        assert doc["feed"]["window"]["count"] == 5
        assert engine.user_config("sales", "kim") == before

    def test_unknown_attribute_warns(self, client):
        self.seed(client)
        doc = client.post(
            "/commands", json={"text": "use attributes Ghost for sales", "user": "z"}
        ).json()
        assert any("Ghost" in w for w in doc["warnings"])

    def test_parse_error_422_with_help(self, client):
        self.seed(client)
        resp = client.post(
            "/commands", json={"text": "pls show me stuff", "user": "alice"}
        )
        assert resp.status_code == 422
        doc = resp.json()
        assert "error" in doc
        assert "use attributes" in doc["help"]

    def test_command_against_unknown_report_404(self, client):
        resp = client.post(
            "/commands", json={"text": "show insights for nope", "user": "a"}
        )
        assert resp.status_code == 404


class TestSeries:
    def test_drilldown(self, client):
        for day in range(12):
            upload(client, day)
        feed = client.get("/feeds/sales").json()
        target = next(i for i in feed["insights"] if i["category"] == "Highlight")
        key = json.dumps(
            [target["group"], target["entity"], target["attribute"]],
            separators=(",", ":"),
        )
        resp = client.get(f"/series/{key}", params={"report": "sales"})
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["report_type"] == "sales"
        assert doc["series"]["group"] == target["group"]
        assert len(doc["points"]) == 10  # window caps at ten sheets
        assert doc["stats"]["m"] is not None

    def test_search_without_report_param(self, client):
        for day in range(6):
            upload(client, day)
        key = json.dumps(["NTS", ["P1000"], "Sales"], separators=(",", ":"))
        assert client.get(f"/series/{key}").status_code == 200

    def test_unknown_series_404(self, client):
        upload(client, 0)
        key = json.dumps(["NTS", ["nope"], "Sales"], separators=(",", ":"))
        assert client.get(f"/series/{key}", params={"report": "sales"}).status_code == 404

    def test_malformed_key_404(self, client):
        upload(client, 0)
        assert client.get("/series/garbage").status_code == 404

    def test_series_outside_window_404(self, data_root):
        client = TestClient(create_app(make_engine(data_root, window=3)))
        rows_with = [["ID", "Sales"]] + [[f"P{i}", i + 1] for i in range(8)]
        rows_without = [["ID", "Sales"]] + [[f"P{i}", i + 1] for i in range(1, 8)]
        client.post(
            "/reports/r/sheets",
            params={"ts": T0},
            files={"file": ("a.csv", csv_bytes(rows_with), "text/csv")},
        )
        key = json.dumps(["NTS", ["P0"], "Sales"], separators=(",", ":"))
        assert client.get(f"/series/{key}", params={"report": "r"}).status_code == 200
        for day in (1, 2, 3):
            client.post(
                "/reports/r/sheets",
                params={"ts": T0 + day * DAY},
                files={"file": (f"{day}.csv", csv_bytes(rows_without), "text/csv")},
            )
        # P0 only exists in the sheet that just slid out of the window
        assert client.get(f"/series/{key}", params={"report": "r"}).status_code == 404


class TestRestart:
    def test_feed_identical_after_restart(self, data_root):
        first = make_engine(data_root)
        client = TestClient(create_app(first))
        for day in range(9):
            upload(client, day)
        client.post(
            "/commands", json={"text": "use attributes Sales for sales", "user": "amy"}
        )
        before_default = client.get("/feeds/sales").content
        before_amy = client.get("/feeds/sales", params={"user": "amy"}).content

        reborn = TestClient(create_app(make_engine(data_root)))
        assert reborn.get("/feeds/sales").content == before_default
        assert reborn.get("/feeds/sales", params={"user": "amy"}).content == before_amy


class TestIndex:
    def test_root_lists_reports(self, client):
        upload(client, 0)
        doc = client.get("/").json()
        assert "sales" in doc["report_types"]
