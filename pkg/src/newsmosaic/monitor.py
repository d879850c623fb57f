"""Concurrent-edit spike detection over the cluster store."""
from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import quote

from .clusters import ArticleRef, ClusterStore, ConceptCluster, EditRecord
from .edits import EditEvent


@dataclass(frozen=True)
class MonitorConfig:
    """Thresholds deciding when a cluster's edit activity is breaking news.

    All values are configuration, not constants of nature; every test states
    the config it runs under.
    """

    min_edits: int = 5
    min_editors: int = 2
    min_languages: int = 2
    max_inter_edit_gap: int = 240
    ttl: int = 3600
    re_emit_throttle: int = 60
    ignore_flagged_bots: bool = False

    def __post_init__(self) -> None:
        for name in ("min_edits", "min_editors", "min_languages",
                     "max_inter_edit_gap", "ttl", "re_emit_throttle"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.min_editors > self.min_edits:
            raise ValueError("min_editors cannot exceed min_edits")


@dataclass(frozen=True)
class BreakingNewsEvent:
    """Snapshot of a cluster at the moment it satisfied the spike conditions."""

    cluster_id: str
    members: frozenset[ArticleRef]
    search_terms: tuple[str, ...]
    article_urls: tuple[str, ...]
    detected_at: int
    edit_count: int
    editor_count: int
    language_count: int


def _latest_run(edits: list[EditRecord], max_gap: int) -> list[EditRecord]:
    """The most recent maximal run of edits with consecutive gaps <= max_gap."""
    if not edits:
        return []
    start = len(edits) - 1
    while start > 0 and edits[start].timestamp - edits[start - 1].timestamp <= max_gap:
        start -= 1
    return edits[start:]


def evaluate_breaking(cluster: ConceptCluster, config: MonitorConfig, now: int) -> bool:
    """True when the cluster's latest edit run crosses every spike threshold."""
    if now >= cluster.ttl_deadline:
        return False
    run = _latest_run(cluster.edits, config.max_inter_edit_gap)
    if len(run) < config.min_edits:
        return False
    if len({rec.editor for rec in run}) < config.min_editors:
        return False
    return len({rec.language for rec in run}) >= config.min_languages


def search_terms_for_cluster(cluster: ConceptCluster) -> list[str]:
    """One search term per non-alias member, key language first.

    Remaining languages follow in lexicographic order. Alias members
    (conflicting second titles within a language) never become terms.
    """
    if not cluster.primaries:
        raise ValueError("cluster has no members")
    key_language = cluster.key.split(":", 1)[0]
    ordered = sorted(cluster.primaries, key=lambda lang: (lang != key_language, lang))
    return [cluster.primaries[lang].title for lang in ordered]


def article_url(language: str, title: str) -> str:
    slug = quote(title.replace(" ", "_"), safe="()_,!~*'-.:")
    if language == "wikidata":
        return f"https://www.wikidata.org/wiki/{slug}"
    return f"https://{language}.wikipedia.org/wiki/{slug}"


class SpikeMonitor:
    """Single-threaded state machine turning the edit stream into breaking news.

    Drives TTL expiry and cluster upserts off each event's timestamp, so a
    replayed fixture yields the identical emission sequence every run.
    """

    def __init__(self, store: ClusterStore, config: MonitorConfig):
        self.store = store
        self.config = config
        self._last_emit: dict[str, tuple[int, int]] = {}

    def observe(self, event: EditEvent) -> BreakingNewsEvent | None:
        """Feed one edit; returns an emission when the spike conditions fire."""
        if self.config.ignore_flagged_bots and "B" in event.flags:
            return None
        now = event.timestamp
        for expired in self.store.expire(now):
            self._last_emit.pop(expired, None)
        cluster_id, _ = self.store.upsert_edit(event)
        cluster = self.store.get(cluster_id)
        if not evaluate_breaking(cluster, self.config, now):
            return None
        return self.on_breaking(cluster, now)

    def on_breaking(self, cluster: ConceptCluster, now: int) -> BreakingNewsEvent | None:
        """Emit for a breaking cluster unless throttled.

        Re-emissions require both the throttle interval to have elapsed and
        at least one new edit since the previous emission, so galleries can
        evolve without flooding downstream consumers.
        """
        previous = self._last_emit.get(cluster.id)
        if previous is not None:
            emitted_at, edit_count = previous
            if now - emitted_at < self.config.re_emit_throttle:
                return None
            if len(cluster.edits) <= edit_count:
                return None
        run = _latest_run(cluster.edits, self.config.max_inter_edit_gap)
        terms = search_terms_for_cluster(cluster)
        key_language = cluster.key.split(":", 1)[0]
        ordered = sorted(cluster.primaries, key=lambda lang: (lang != key_language, lang))
        urls = tuple(
            article_url(lang, cluster.primaries[lang].title) for lang in ordered
        )
        event = BreakingNewsEvent(
            cluster_id=cluster.id,
            members=frozenset(cluster.members),
            search_terms=tuple(terms),
            article_urls=urls,
            detected_at=now,
            edit_count=len(run),
            editor_count=len({rec.editor for rec in run}),
            language_count=len({rec.language for rec in run}),
        )
        self._last_emit[cluster.id] = (now, len(cluster.edits))
        return event
