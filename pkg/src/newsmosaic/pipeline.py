"""End-to-end orchestration: edit stream in, archived gallery pairs out."""
from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Protocol
from urllib.request import Request, urlopen

import numpy as np
from PIL import Image

from .clusters import ClusterStore, FixtureLanglinkResolver, LanglinkResolver
from .dedup import cluster_duplicates, rank_items
from .edits import DEFAULT_LANGUAGES, StreamParseError, parse_irc_line
from .layout import (
    LOOSE_KIND,
    STRICT_KIND,
    LayoutSpec,
    balance_gallery,
    check_aesthetics,
)
from .media import Connector, FixtureConnector, MediaItem, VIDEO, search_media
from .monitor import BreakingNewsEvent, MonitorConfig, SpikeMonitor
from .render import RenderConfig, archive_path, compose_png, emit_html
from .util import atomic_write_bytes

log = logging.getLogger(__name__)

DEFAULT_TOP_K = 12
DEFAULT_MIN_ITEMS = 3


class ConfigError(ValueError):
    """Fatal configuration problem; the pipeline refuses to start."""


class Publisher(Protocol):
    def publish(self, record: dict) -> None: ...


class NullPublisher:
    def publish(self, record: dict) -> None:
        pass


class StdoutPublisher:
    def publish(self, record: dict) -> None:
        print(json.dumps(record, ensure_ascii=False), flush=True)


class WebhookPublisher:
    def __init__(self, url: str, timeout: float = 10.0):
        self.url = url
        self.timeout = timeout

    def publish(self, record: dict) -> None:
        body = json.dumps(record, ensure_ascii=False).encode("utf-8")
        request = Request(self.url, data=body,
                          headers={"Content-Type": "application/json"})
        with urlopen(request, timeout=self.timeout):
            pass


@dataclass
class PipelineConfig:
    monitor: MonitorConfig = field(default_factory=MonitorConfig)
    strict_layout: LayoutSpec = field(default_factory=lambda: LayoutSpec(600, 200, 3, 0))
    loose_layout: LayoutSpec = field(default_factory=lambda: LayoutSpec(600, 200, 3, 0))
    render: RenderConfig = field(default_factory=RenderConfig)
    connectors: list[Connector] = field(default_factory=list)
    resolver: LanglinkResolver = field(default_factory=FixtureLanglinkResolver)
    archive_dir: Path = Path("archive")
    publisher: Publisher = field(default_factory=NullPublisher)
    languages: tuple[str, ...] = DEFAULT_LANGUAGES
    top_k: int = DEFAULT_TOP_K
    min_items: int = DEFAULT_MIN_ITEMS
    workers: int = 1

    @classmethod
    def from_file(cls, path: Path | str) -> "PipelineConfig":
        """Build a config from a JSON document; unknown keys are fatal."""
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        known = {
            "monitor", "strict_layout", "loose_layout", "render", "connectors",
            "langlinks", "archive_dir", "publisher", "languages",
            "top_k", "min_items", "workers",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            cfg = cls()
            if "monitor" in raw:
                cfg.monitor = MonitorConfig(**raw["monitor"])
            if "strict_layout" in raw:
                cfg.strict_layout = LayoutSpec(**raw["strict_layout"])
            if "loose_layout" in raw:
                cfg.loose_layout = LayoutSpec(**raw["loose_layout"])
            if "render" in raw:
                render = dict(raw["render"])
                if "background_color" in render:
                    render["background_color"] = tuple(render["background_color"])
                cfg.render = RenderConfig(**render)
            for spec in raw.get("connectors", []):
                if spec.get("type", "fixture") != "fixture":
                    raise ConfigError(f"unsupported connector type: {spec!r}")
                cfg.connectors.append(FixtureConnector(spec["root"], spec.get("name")))
            if "langlinks" in raw:
                cfg.resolver = FixtureLanglinkResolver.from_file(raw["langlinks"])
            if "archive_dir" in raw:
                cfg.archive_dir = Path(raw["archive_dir"])
            publisher = raw.get("publisher", "none")
            if publisher == "none":
                cfg.publisher = NullPublisher()
            elif publisher == "stdout":
                cfg.publisher = StdoutPublisher()
            elif isinstance(publisher, dict) and "webhook" in publisher:
                cfg.publisher = WebhookPublisher(publisher["webhook"])
            else:
                raise ConfigError(f"unsupported publisher: {publisher!r}")
            if "languages" in raw:
                cfg.languages = tuple(raw["languages"])
            cfg.top_k = raw.get("top_k", DEFAULT_TOP_K)
            cfg.min_items = raw.get("min_items", DEFAULT_MIN_ITEMS)
            cfg.workers = raw.get("workers", 1)
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad config value: {exc}") from exc
        if cfg.top_k < 1 or cfg.min_items < 1 or cfg.workers < 1:
            raise ConfigError("top_k, min_items and workers must be positive")
        return cfg


@dataclass
class RunReport:
    emissions: int = 0
    unique_events: int = 0
    illustrated: int = 0
    galleries: int = 0
    skipped_low_media: int = 0
    degraded_searches: int = 0
    parse_errors: int = 0
    event_failures: int = 0
    archive_paths: list[str] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "emissions": self.emissions,
            "unique_events": self.unique_events,
            "illustrated": self.illustrated,
            "galleries": self.galleries,
            "skipped_low_media": self.skipped_low_media,
            "degraded_searches": self.degraded_searches,
            "parse_errors": self.parse_errors,
            "event_failures": self.event_failures,
            "archive_paths": self.archive_paths,
        }


def load_raster(item: MediaItem) -> np.ndarray | None:
    """Decode the local file behind an item (poster frame for videos)."""
    source = item.poster_url if item.kind == VIDEO else item.media_url
    if not source:
        return None
    path = Path(source)
    if not path.exists():
        return None
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except OSError:
        return None


@dataclass
class _EventOutcome:
    event: BreakingNewsEvent
    records: list[dict] = field(default_factory=list)
    paths: list[str] = field(default_factory=list)
    degraded: bool = False
    skipped: bool = False
    failed: bool = False


def _archive_day_dir(cfg: PipelineConfig, event: BreakingNewsEvent) -> Path:
    day = datetime.fromtimestamp(event.detected_at, tz=timezone.utc).strftime("%Y-%m-%d")
    return cfg.archive_dir / day


def illustrate_event(cfg: PipelineConfig, event: BreakingNewsEvent) -> _EventOutcome:
    """Produce, archive and describe the gallery pair for one emission."""
    outcome = _EventOutcome(event)
    result = search_media(list(event.search_terms), cfg.connectors)
    outcome.degraded = result.degraded
    if len(result.items) < cfg.min_items:
        outcome.skipped = True
        return outcome

    cache: dict[str, np.ndarray | None] = {}

    def cached_raster(item: MediaItem) -> np.ndarray | None:
        if item.item_id not in cache:
            cache[item.item_id] = load_raster(item)
        return cache[item.item_id]

    clusters = cluster_duplicates(result.items, raster_for=cached_raster)
    ranked = rank_items(clusters)
    top = ranked[: cfg.top_k]
    reserve = ranked[cfg.top_k :]
    rasters = {
        item.item_id: raster
        for item in ranked
        if (raster := cached_raster(item)) is not None
    }
    day_dir = _archive_day_dir(cfg, event)

    try:
        for kind, spec in ((STRICT_KIND, cfg.strict_layout), (LOOSE_KIND, cfg.loose_layout)):
            gallery = balance_gallery(top, spec, kind, reserve=reserve)
            html = emit_html(gallery)
            _, png = compose_png(gallery, rasters, cfg.render)
            name = archive_path(kind, list(event.search_terms), event.detected_at)
            atomic_write_bytes(day_dir / name, png)
            atomic_write_bytes(
                day_dir / (name[: -len(".png")] + ".html"), html.encode("utf-8")
            )
            report = check_aesthetics(gallery)
            outcome.paths.append(str(day_dir / name))
            outcome.records.append(
                {
                    "event_id": event.cluster_id,
                    "kind": kind,
                    "archive_path": str(day_dir / name),
                    "terms": list(event.search_terms),
                    "item_count": len(gallery.placed),
                    "aesthetics": {
                        "balanced": report.balanced,
                        "hole_free": report.hole_free,
                        "order_respecting": report.order_respecting,
                    },
                }
            )
    except Exception as exc:
        log.error("illustration failed for %s: %s", event.cluster_id, exc)
        outcome.failed = True
        outcome.records.clear()
        outcome.paths.clear()
    return outcome


def detect_events(
    cfg: PipelineConfig,
    source: Iterable[tuple[str, str, int]],
    report: RunReport | None = None,
) -> list[BreakingNewsEvent]:
    """Run the monitoring loop over a stream and collect emissions in order."""
    store = ClusterStore(cfg.resolver, ttl=cfg.monitor.ttl)
    monitor = SpikeMonitor(store, cfg.monitor)
    emissions: list[BreakingNewsEvent] = []
    for channel, raw_line, arrival in source:
        try:
            event = parse_irc_line(channel, raw_line, arrival)
        except (StreamParseError, ValueError) as exc:
            if report is not None:
                report.parse_errors += 1
            log.debug("skipping unparseable line: %s", exc)
            continue
        emission = monitor.observe(event)
        if emission is not None:
            emissions.append(emission)
    return emissions


def run_pipeline(cfg: PipelineConfig, source: Iterable[tuple[str, str, int]]) -> RunReport:
    """Detect breaking news on a stream and emit an archived gallery pair per
    illustrated emission. Per-event failures are counted, not fatal."""
    try:
        cfg.archive_dir.mkdir(parents=True, exist_ok=True)
        probe = cfg.archive_dir / ".write-probe"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"archive dir not writable: {exc}") from exc
    if not cfg.connectors:
        log.warning("no connectors configured; every event will be degraded")

    report = RunReport()
    emissions = detect_events(cfg, source, report)
    report.emissions = len(emissions)
    report.unique_events = len({e.cluster_id for e in emissions})

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(lambda e: illustrate_event(cfg, e), emissions))
    else:
        outcomes = [illustrate_event(cfg, event) for event in emissions]

    for outcome in outcomes:
        report.degraded_searches += int(outcome.degraded)
        report.skipped_low_media += int(outcome.skipped)
        report.event_failures += int(outcome.failed)
        if outcome.records:
            report.illustrated += 1
            report.galleries += len(outcome.records)
            report.archive_paths.extend(outcome.paths)
            report.records.extend(outcome.records)
            for record in outcome.records:
                cfg.publisher.publish(record)
    return report
