"""Media search: connector abstraction, fixtures, full-phrase relevance filter."""
from __future__ import annotations

import json
import logging
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from PIL import Image

from .util import slugify

log = logging.getLogger(__name__)

PHOTO = "photo"
VIDEO = "video"


@dataclass(frozen=True)
class SocialSignals:
    """Unified per-item interaction counts; absent sources map to zero."""

    likes: int = 0
    shares: int = 0
    comments: int = 0
    views: int = 0

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if value < 0:
                raise ValueError(f"{name} must be non-negative")

    def as_dict(self) -> dict[str, int]:
        return {
            "likes": self.likes,
            "shares": self.shares,
            "comments": self.comments,
            "views": self.views,
        }

    def __add__(self, other: "SocialSignals") -> "SocialSignals":
        return SocialSignals(
            self.likes + other.likes,
            self.shares + other.shares,
            self.comments + other.comments,
            self.views + other.views,
        )


@dataclass(frozen=True)
class MediaItem:
    """One photo or video lifted from a social network micropost."""

    item_id: str
    network: str
    kind: str
    media_url: str
    width_px: int
    height_px: int
    micropost_text: str
    micropost_url: str
    author: str
    published_at: int
    signals: SocialSignals = field(default_factory=SocialSignals)
    poster_url: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in (PHOTO, VIDEO):
            raise ValueError(f"kind must be {PHOTO!r} or {VIDEO!r}: {self.kind!r}")
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("dimensions must be positive")
        if self.kind == VIDEO and not self.poster_url:
            raise ValueError("video items need a poster_url")
        if not self.micropost_url:
            raise ValueError("micropost_url is required for attribution")


def _fold(text: str) -> str:
    return unicodedata.normalize("NFC", text).casefold()


def matches_phrase(text: str, phrase: str) -> bool:
    """Whole-phrase containment, Unicode-aware.

    Both sides are NFC-normalized and case-folded; the phrase must appear as
    a contiguous substring whose neighbors are not letters or digits. Marks
    like ``#`` and ``_`` count as valid boundaries, so "#sochi2014" matches
    the phrase "sochi2014" while "#2014 #nofilter" does not match
    "2014 Winter Olympics".
    """
    phrase = phrase.strip()
    if not phrase:
        raise ValueError("phrase must be non-empty")
    haystack = _fold(text)
    needle = _fold(phrase)
    start = 0
    while True:
        i = haystack.find(needle, start)
        if i < 0:
            return False
        j = i + len(needle)
        before_ok = i == 0 or not haystack[i - 1].isalnum()
        after_ok = j == len(haystack) or not haystack[j].isalnum()
        if before_ok and after_ok:
            return True
        start = i + 1


class Connector(Protocol):
    name: str

    def search(self, term: str) -> list[MediaItem]: ...


class FixtureConnector:
    """Connector reading per-term record files from a directory.

    Each term maps to ``<slug>.json`` holding a list of item records; media
    and poster URLs that point at files are resolved relative to the
    directory so raster tests can find them. Items without dimensions get
    them from the local image header when possible and are dropped
    otherwise, because layout needs aspect ratios.
    """

    def __init__(self, root: Path | str, name: str | None = None):
        self.root = Path(root)
        self.name = name or self.root.name

    def search(self, term: str) -> list[MediaItem]:
        path = self.root / f"{slugify(term)}.json"
        if not path.exists():
            return []
        records = json.loads(path.read_text(encoding="utf-8"))
        items = []
        for record in records:
            item = self._to_item(record)
            if item is not None:
                items.append(item)
        return items

    def _resolve(self, url: str | None) -> str | None:
        if not url or "://" in url:
            return url
        candidate = self.root / url
        return str(candidate) if candidate.exists() else url

    def _to_item(self, record: dict) -> MediaItem | None:
        media_url = self._resolve(record.get("media_url"))
        width = record.get("width_px") or 0
        height = record.get("height_px") or 0
        if not width or not height:
            probe = Path(media_url) if media_url else None
            if probe is None or not probe.exists():
                log.warning("dropping %s: no dimensions and no local file",
                            record.get("item_id"))
                return None
            with Image.open(probe) as img:
                width, height = img.size
        return MediaItem(
            item_id=record["item_id"],
            network=self.name,
            kind=record.get("kind", PHOTO),
            media_url=media_url or "",
            width_px=width,
            height_px=height,
            micropost_text=record.get("micropost_text", ""),
            micropost_url=record["micropost_url"],
            author=record.get("author", ""),
            published_at=record.get("published_at", 0),
            signals=SocialSignals(**record.get("signals", {})),
            poster_url=self._resolve(record.get("poster_url")),
        )


@dataclass
class MediaSearchResult:
    items: list[MediaItem]
    degraded: bool = False
    errors: list[str] = field(default_factory=list)


def search_media(
    terms: list[str],
    connectors: list[Connector],
    max_workers: int = 8,
    timeout: float = 10.0,
) -> MediaSearchResult:
    """Query every (connector, term) pair and keep full-phrase-relevant items.

    Items survive when they match at least one term (terms are translations
    of one concept, any match suffices). Exact item-id and media-url
    duplicates collapse to the smallest (network, item id) survivor so the
    result never depends on term order; connector failures are logged and
    skipped, and a result with every query failed is flagged degraded rather
    than raised.
    """
    if not terms:
        raise ValueError("terms must be non-empty")
    if not connectors:
        return MediaSearchResult(items=[], degraded=True)

    pairs = [(connector, term) for connector in connectors for term in terms]
    batches: list[list[MediaItem]] = [[] for _ in pairs]
    errors: list[str] = []
    failures = 0
    pool = ThreadPoolExecutor(max_workers=max_workers)
    try:
        futures = [pool.submit(connector.search, term) for connector, term in pairs]
        for index, future in enumerate(futures):
            connector, term = pairs[index]
            try:
                batches[index] = future.result(timeout=timeout)
            except Exception as exc:
                failures += 1
                message = f"{connector.name} failed for {term!r}: {exc}"
                errors.append(message)
                log.warning("%s", message)
    finally:
        # don't let one hung connector wedge the merge step
        pool.shutdown(wait=False, cancel_futures=True)

    relevant = [
        item
        for batch in batches
        for item in batch
        if any(matches_phrase(item.micropost_text, term) for term in terms)
    ]
    # canonical order first, so duplicate survivors never depend on term order
    relevant.sort(key=lambda item: (item.network, item.item_id))
    merged: list[MediaItem] = []
    seen_ids: set[str] = set()
    seen_urls: set[str] = set()
    for item in relevant:
        if item.item_id in seen_ids:
            continue
        if item.media_url and item.media_url in seen_urls:
            continue
        seen_ids.add(item.item_id)
        if item.media_url:
            seen_urls.add(item.media_url)
        merged.append(item)
    return MediaSearchResult(
        items=merged,
        degraded=failures == len(pairs),
        errors=errors,
    )
