"""End-to-end runs over replay fixtures, publishers, CLI surface."""
from __future__ import annotations

import json
import subprocess
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest

from newsmosaic.clusters import FixtureLanglinkResolver
from newsmosaic.edits import ReplaySource
from newsmosaic.media import FixtureConnector
from newsmosaic.monitor import MonitorConfig
from newsmosaic.pipeline import (
    ConfigError,
    PipelineConfig,
    StdoutPublisher,
    WebhookPublisher,
    detect_events,
    run_pipeline,
)
from newsmosaic import cli


@pytest.fixture
def pipeline_cfg(data_dir, media_root, tmp_path):
    return PipelineConfig(
        monitor=MonitorConfig(),
        connectors=[FixtureConnector(media_root, name="fixturenet")],
        resolver=FixtureLanglinkResolver.from_file(data_dir / "langlinks.tsv"),
        archive_dir=tmp_path / "archive",
    )


# ------------------------------------------------------------------
# run_pipeline
# ------------------------------------------------------------------


def test_two_events_make_four_galleries(pipeline_cfg, data_dir):
    report = run_pipeline(pipeline_cfg, ReplaySource(data_dir / "replay_pipeline.tsv"))
    assert report.emissions == 2
    assert report.unique_events == 2
    assert report.illustrated == 2
    assert report.galleries == 4
    assert report.galleries == 2 * report.illustrated
    pngs = sorted(pipeline_cfg.archive_dir.rglob("*.png"))
    assert len(pngs) == 4
    kinds = {p.name.split("_")[0] for p in pngs}
    assert kinds == {"strict-order-equal-size", "loose-order-varying-size"}
    htmls = sorted(pipeline_cfg.archive_dir.rglob("*.html"))
    assert len(htmls) == 4
    # archive layout: <archive>/<YYYY-MM-DD>/<kind>_<slug>_<ts>.png
    assert all(p.parent.name == "1970-01-01" for p in pngs)


def test_published_records_carry_gallery_facts(pipeline_cfg, data_dir):
    records = []
    pipeline_cfg.publisher = type("Sink", (), {"publish": lambda self, r: records.append(r)})()
    run_pipeline(pipeline_cfg, ReplaySource(data_dir / "replay_pipeline.tsv"))
    assert len(records) == 4
    for record in records:
        assert set(record) == {"event_id", "kind", "archive_path", "terms",
                               "item_count", "aesthetics"}
        assert set(record["aesthetics"]) == {"balanced", "hole_free", "order_respecting"}
        assert record["item_count"] > 0
        assert Path(record["archive_path"]).exists()
    assert records[0]["terms"][0] == "Riesenslalom Finale"


def test_below_threshold_fixture_is_quiet(pipeline_cfg, tmp_path):
    fixture = tmp_path / "quiet.tsv"
    fixture.write_text(
        "100\t#en.wikipedia\t[[Lone Article]]  https://u * OnlyEditor * (+5) x\n"
        "160\t#en.wikipedia\t[[Lone Article]]  https://u * OnlyEditor * (+5) y\n",
        encoding="utf-8",
    )
    report = run_pipeline(pipeline_cfg, ReplaySource(fixture))
    assert report.emissions == 0
    assert report.galleries == 0
    assert list(pipeline_cfg.archive_dir.rglob("*.png")) == []


def test_no_connectors_degrades_not_fails(pipeline_cfg, data_dir):
    pipeline_cfg.connectors = []
    report = run_pipeline(pipeline_cfg, ReplaySource(data_dir / "replay_pipeline.tsv"))
    assert report.emissions == 2
    assert report.galleries == 0
    assert report.degraded_searches == 2
    assert report.skipped_low_media == 2


def test_parse_errors_counted_and_skipped(pipeline_cfg, tmp_path):
    fixture = tmp_path / "noisy.tsv"
    fixture.write_text(
        "100\t#en.wikipedia\tthis is not the grammar\n"
        "160\t#en.wikipedia\t[[Ok Article]]  https://u * E * (+1) c\n",
        encoding="utf-8",
    )
    report = run_pipeline(pipeline_cfg, ReplaySource(fixture))
    assert report.parse_errors == 1


def test_unwritable_archive_dir_is_fatal(pipeline_cfg, data_dir, tmp_path):
    blocker = tmp_path / "blocked"
    blocker.write_text("a file, not a directory", encoding="utf-8")
    pipeline_cfg.archive_dir = blocker
    with pytest.raises(ConfigError):
        run_pipeline(pipeline_cfg, ReplaySource(data_dir / "replay_pipeline.tsv"))


def test_detection_identical_across_worker_counts(pipeline_cfg, data_dir, tmp_path):
    source = data_dir / "replay_timeline.tsv"
    runs = []
    for workers in (1, 4):
        cfg = PipelineConfig(
            monitor=pipeline_cfg.monitor,
            connectors=[],
            resolver=pipeline_cfg.resolver,
            archive_dir=tmp_path / f"archive-{workers}",
            workers=workers,
        )
        report = run_pipeline(cfg, ReplaySource(source))
        runs.append(report.emissions)
    assert runs[0] == runs[1] == 5


# ------------------------------------------------------------------
# publishers
# ------------------------------------------------------------------


def test_stdout_publisher_prints_json_line(capsys):
    StdoutPublisher().publish({"event_id": "e", "kind": "k"})
    out = capsys.readouterr().out.strip()
    assert json.loads(out) == {"event_id": "e", "kind": "k"}


def test_webhook_publisher_posts_record():
    received = []

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers["Content-Length"])
            received.append(json.loads(self.rfile.read(length)))
            self.send_response(204)
            self.end_headers()

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        url = f"http://127.0.0.1:{server.server_port}/hook"
        WebhookPublisher(url).publish({"event_id": "e1"})
    finally:
        server.shutdown()
    assert received == [{"event_id": "e1"}]


# ------------------------------------------------------------------
# config file loading
# ------------------------------------------------------------------


def _write_config(tmp_path, data_dir, media_root, **overrides):
    config = {
        "monitor": {"min_edits": 5, "min_editors": 2, "min_languages": 2,
                    "max_inter_edit_gap": 240, "ttl": 3600, "re_emit_throttle": 60},
        "strict_layout": {"gallery_width_px": 600, "max_row_height_px": 200,
                          "columns": 3, "gutter_px": 0},
        "loose_layout": {"gallery_width_px": 600, "max_row_height_px": 200,
                         "columns": 3, "gutter_px": 0},
        "connectors": [{"type": "fixture", "root": str(media_root), "name": "fixturenet"}],
        "langlinks": str(data_dir / "langlinks.tsv"),
        "archive_dir": str(tmp_path / "archive"),
        "publisher": "none",
    }
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


def test_config_round_trip(tmp_path, data_dir, media_root):
    cfg = PipelineConfig.from_file(_write_config(tmp_path, data_dir, media_root))
    assert cfg.monitor.min_edits == 5
    assert cfg.connectors[0].name == "fixturenet"
    assert cfg.archive_dir == tmp_path / "archive"


def test_config_language_list(tmp_path, data_dir, media_root):
    path = _write_config(tmp_path, data_dir, media_root, languages=["en", "de", "wikidata"])
    cfg = PipelineConfig.from_file(path)
    assert cfg.languages == ("en", "de", "wikidata")


def test_config_rejects_unknown_keys(tmp_path, data_dir, media_root):
    path = _write_config(tmp_path, data_dir, media_root, mystery=1)
    with pytest.raises(ConfigError):
        PipelineConfig.from_file(path)


def test_config_rejects_bad_values(tmp_path, data_dir, media_root):
    path = _write_config(tmp_path, data_dir, media_root, monitor={"min_edits": -3})
    with pytest.raises(ConfigError):
        PipelineConfig.from_file(path)


def test_config_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig.from_file(tmp_path / "nope.json")


# ------------------------------------------------------------------
# CLI
# ------------------------------------------------------------------


def test_cli_run_replay(tmp_path, data_dir, media_root, capsys):
    config = _write_config(tmp_path, data_dir, media_root)
    code = cli.main(["run", "--config", str(config),
                     "--replay", str(data_dir / "replay_pipeline.tsv")])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["galleries"] == 4
    assert report["galleries"] == 2 * report["illustrated"]


def test_cli_run_archive_dir_override(tmp_path, data_dir, media_root, capsys):
    config = _write_config(tmp_path, data_dir, media_root)
    override = tmp_path / "elsewhere"
    code = cli.main(["run", "--config", str(config),
                     "--replay", str(data_dir / "replay_pipeline.tsv"),
                     "--archive-dir", str(override)])
    assert code == 0
    assert len(list(override.rglob("*.png"))) == 4


def test_cli_run_bad_config_exit_1(tmp_path, data_dir):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert cli.main(["run", "--config", str(bad),
                     "--replay", str(data_dir / "replay_pipeline.tsv")]) == 1


def test_cli_run_missing_fixture_exit_2(tmp_path, data_dir, media_root):
    config = _write_config(tmp_path, data_dir, media_root)
    assert cli.main(["run", "--config", str(config),
                     "--replay", str(tmp_path / "absent.tsv")]) == 2


def test_cli_metrics_bundled_numbers(tmp_path, capsys):
    from importlib import resources
    source = resources.files("newsmosaic.data").joinpath("eval_labels.jsonl")
    labels = tmp_path / "labels.jsonl"
    labels.write_bytes(source.read_bytes())
    assert cli.main(["metrics", "--labels", str(labels)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["recall"] == pytest.approx(48 / 69, abs=1e-4)
    assert out["absolute_precision"] == pytest.approx(175 / 253, abs=1e-4)
    assert out["relative_precision"] == pytest.approx(30 / 48, abs=1e-4)


def test_cli_metrics_missing_file_exit_2(tmp_path):
    assert cli.main(["metrics", "--labels", str(tmp_path / "none.jsonl")]) == 2


def test_cli_layout_prints_rects(tmp_path, capsys):
    items = [{"item_id": f"i{k}", "network": "n", "kind": "photo",
              "media_url": f"u{k}", "width_px": 200, "height_px": 200,
              "micropost_text": "t", "micropost_url": f"m{k}",
              "author": "a", "published_at": k} for k in range(3)]
    path = tmp_path / "items.json"
    path.write_text(json.dumps(items), encoding="utf-8")
    code = cli.main(["layout", "--items", str(path),
                     "--kind", "strict-order-equal-size",
                     "--width", "600", "--row-height", "200", "--gutter", "0"])
    assert code == 0
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["item_id"] for r in rows] == ["i0", "i1", "i2"]
    assert rows[-1]["x"] == 400.0


def test_cli_usage_error_exit_1():
    assert cli.main(["run"]) == 1          # missing required --config
    assert cli.main(["layout", "--items", "x.json", "--kind", "diagonal"]) == 1


def test_cli_layout_impossible_spec_exit_1(tmp_path):
    items = [{"item_id": "i", "network": "n", "kind": "photo", "media_url": "u",
              "width_px": 100, "height_px": 100, "micropost_text": "t",
              "micropost_url": "m", "author": "a", "published_at": 1}]
    path = tmp_path / "items.json"
    path.write_text(json.dumps(items), encoding="utf-8")
    code = cli.main(["layout", "--items", str(path),
                     "--kind", "loose-order-varying-size",
                     "--width", "90", "--columns", "3", "--gutter", "0"])
    assert code == 1


def test_cli_run_requires_mode(tmp_path, data_dir, media_root):
    config = _write_config(tmp_path, data_dir, media_root)
    assert cli.main(["run", "--config", str(config)]) == 1


def test_console_script_entry_point(tmp_path, data_dir, media_root):
    config = _write_config(tmp_path, data_dir, media_root)
    proc = subprocess.run(
        ["newsmosaic", "run", "--config", str(config),
         "--replay", str(data_dir / "replay_pipeline.tsv")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["galleries"] == 4


# ------------------------------------------------------------------
# detection helper reuse
# ------------------------------------------------------------------


def test_detect_events_documented_sequence(pipeline_cfg, data_dir):
    emissions = detect_events(pipeline_cfg, ReplaySource(data_dir / "replay_timeline.tsv"))
    assert [(e.cluster_id, e.detected_at) for e in emissions] == [
        ("en:Giant Slalom Final#1", 1240),
        ("en:Giant Slalom Final#1", 1310),
        ("en:Medal Table#1", 2320),
        ("en:Downhill Winner#1", 3240),
        ("en:Downhill Winner#2", 8240),
    ]
