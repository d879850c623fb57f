"""Cross-language article clustering driven by interlanguage-link lookups."""
from __future__ import annotations

import json
import logging
import unicodedata
from bisect import insort
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Protocol
from urllib.parse import quote
from urllib.request import urlopen

from .edits import EditEvent

log = logging.getLogger(__name__)


def normalize_title(title: str) -> str:
    """Canonical article title: underscores become spaces, Unicode NFC."""
    return unicodedata.normalize("NFC", title.replace("_", " "))


@dataclass(frozen=True, order=True)
class ArticleRef:
    """A (language, title) article handle, normalized on construction."""

    language: str
    title: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "language", self.language.strip().lower())
        object.__setattr__(self, "title", normalize_title(self.title))
        if not self.language or not self.title:
            raise ValueError("language and title must be non-empty")

    @property
    def key(self) -> str:
        return f"{self.language}:{self.title}"

    @classmethod
    def parse(cls, text: str) -> "ArticleRef":
        language, sep, title = text.partition(":")
        if not sep:
            raise ValueError(f"expected 'language:title', got {text!r}")
        return cls(language, title)


class EditRecord(NamedTuple):
    timestamp: int
    editor: str
    language: str


class LanglinkResolver(Protocol):
    def lookup(self, ref: ArticleRef) -> set[ArticleRef]:
        """Interlanguage equivalents of ``ref``, excluding ``ref`` itself."""
        ...


class FixtureLanglinkResolver:
    """Deterministic resolver backed by a bidirectional link list.

    The fixture format is UTF-8 lines ``lang:title TAB lang:title``; the
    loader takes connected components so lookups are transitively closed.
    """

    def __init__(self, links: Iterable[tuple[ArticleRef, ArticleRef]] = ()):
        self._component: dict[ArticleRef, frozenset[ArticleRef]] = {}
        adjacency: dict[ArticleRef, set[ArticleRef]] = {}
        for a, b in links:
            adjacency.setdefault(a, set()).add(b)
            adjacency.setdefault(b, set()).add(a)
        seen: set[ArticleRef] = set()
        for start in adjacency:
            if start in seen:
                continue
            component = {start}
            frontier = [start]
            while frontier:
                node = frontier.pop()
                for neighbor in adjacency.get(node, ()):
                    if neighbor not in component:
                        component.add(neighbor)
                        frontier.append(neighbor)
            seen |= component
            frozen = frozenset(component)
            for node in component:
                self._component[node] = frozen

    @classmethod
    def from_file(cls, path: Path | str) -> "FixtureLanglinkResolver":
        links = []
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                left, sep, right = line.partition("\t")
                if not sep:
                    raise ValueError(f"langlink fixture line missing TAB: {line!r}")
                links.append((ArticleRef.parse(left), ArticleRef.parse(right)))
        return cls(links)

    def lookup(self, ref: ArticleRef) -> set[ArticleRef]:
        return set(self._component.get(ref, frozenset())) - {ref}


class HttpLanglinkResolver:
    """Live resolver against a wiki langlinks API endpoint."""

    def __init__(self, url_template: str = "https://{lang}.wikipedia.org/w/api.php", timeout: float = 10.0):
        self.url_template = url_template
        self.timeout = timeout

    def lookup(self, ref: ArticleRef) -> set[ArticleRef]:
        url = (
            self.url_template.format(lang=ref.language)
            + "?action=query&prop=langlinks&lllimit=500&format=json&titles="
            + quote(ref.title)
        )
        with urlopen(url, timeout=self.timeout) as resp:
            payload = json.load(resp)
        out: set[ArticleRef] = set()
        for page in payload.get("query", {}).get("pages", {}).values():
            for link in page.get("langlinks", []):
                out.add(ArticleRef(link["lang"], link["*"]))
        return out - {ref}


def resolve_equivalents(ref: ArticleRef, resolver: LanglinkResolver) -> set[ArticleRef]:
    """All articles denoting ``ref``'s concept, including ``ref``.

    Resolver failures degrade to ``{ref}`` so ingestion never stalls on a
    flaky link source.
    """
    try:
        return {ref} | set(resolver.lookup(ref))
    except Exception as exc:
        log.warning("langlink lookup failed for %s: %s", ref.key, exc)
        return {ref}


def cluster_key(members: Iterable[ArticleRef]) -> str:
    """Stable cluster identity: the lexicographically smallest member key."""
    keys = [ref.key for ref in members]
    if not keys:
        raise ValueError("cluster has no members")
    return min(keys)


@dataclass
class ConceptCluster:
    """Articles across languages for one concept, plus its edit history."""

    id: str
    key: str
    primaries: dict[str, ArticleRef]
    alias_members: set[ArticleRef] = field(default_factory=set)
    edits: list[EditRecord] = field(default_factory=list)
    first_seen: int = 0
    last_seen: int = 0
    ttl_deadline: int = 0

    @property
    def members(self) -> set[ArticleRef]:
        return set(self.primaries.values()) | self.alias_members

    @property
    def languages(self) -> set[str]:
        return {rec.language for rec in self.edits}

    @property
    def editors(self) -> set[str]:
        return {rec.editor for rec in self.edits}


class ClusterStore:
    """Single-writer store mapping live concept clusters to edit activity.

    Langlink lookups are cached per article for the store's lifetime:
    links change far slower than edits do.
    """

    def __init__(self, resolver: LanglinkResolver, ttl: int = 3600):
        if ttl <= 0:
            raise ValueError("ttl must be positive")
        self.resolver = resolver
        self.ttl = ttl
        self._clusters: dict[str, ConceptCluster] = {}
        self._by_ref: dict[ArticleRef, str] = {}
        self._by_key: dict[str, str] = {}
        self._generation: Counter[str] = Counter()
        self._lookup_cache: dict[ArticleRef, frozenset[ArticleRef]] = {}

    # -- reads ---------------------------------------------------------

    def get(self, cluster_id: str) -> ConceptCluster:
        return self._clusters[cluster_id]

    def get_by_key(self, key: str) -> ConceptCluster | None:
        cluster_id = self._by_key.get(key)
        return self._clusters.get(cluster_id) if cluster_id else None

    def live_clusters(self) -> list[ConceptCluster]:
        return list(self._clusters.values())

    def __len__(self) -> int:
        return len(self._clusters)

    # -- writes --------------------------------------------------------

    def _equivalents(self, ref: ArticleRef) -> frozenset[ArticleRef]:
        cached = self._lookup_cache.get(ref)
        if cached is None:
            cached = frozenset(resolve_equivalents(ref, self.resolver))
            self._lookup_cache[ref] = cached
        return cached

    def _create(self, ref: ArticleRef, record: EditRecord) -> ConceptCluster:
        key = ref.key
        self._generation[key] += 1
        cluster = ConceptCluster(
            id=f"{key}#{self._generation[key]}",
            key=key,
            primaries={ref.language: ref},
            edits=[record],
            first_seen=record.timestamp,
            last_seen=record.timestamp,
        )
        self._clusters[cluster.id] = cluster
        self._by_ref[ref] = cluster.id
        self._by_key[key] = cluster.id
        return cluster

    def _adopt(self, cluster: ConceptCluster, ref: ArticleRef) -> None:
        if ref in cluster.members:
            return
        current = cluster.primaries.get(ref.language)
        if current is None:
            cluster.primaries[ref.language] = ref
        else:
            log.warning(
                "language %s already has %r in cluster %s; keeping %r as alias",
                ref.language, current.title, cluster.id, ref.title,
            )
            cluster.alias_members.add(ref)
        self._by_ref[ref] = cluster.id

    def _rekey(self, cluster: ConceptCluster) -> None:
        new_key = cluster_key(cluster.members)
        if new_key != cluster.key:
            self._by_key[cluster.key] = cluster.id  # old key stays as an alias
            cluster.key = new_key
        self._by_key[new_key] = cluster.id

    def _merge(self, cluster_ids: list[str]) -> ConceptCluster:
        clusters = [self._clusters[cid] for cid in cluster_ids]
        clusters.sort(key=lambda c: (c.first_seen, c.id))
        winner_key = min(c.key for c in clusters)
        winner = next(c for c in clusters if c.key == winner_key)
        for other in clusters:
            if other is winner:
                continue
            for ref in other.primaries.values():
                self._adopt(winner, ref)
            for ref in other.alias_members:
                self._adopt(winner, ref)
            for record in other.edits:
                insort(winner.edits, record)
            winner.first_seen = min(winner.first_seen, other.first_seen)
            winner.last_seen = max(winner.last_seen, other.last_seen)
            del self._clusters[other.id]
            self._by_key[other.key] = winner.id
            for key, cid in list(self._by_key.items()):
                if cid == other.id:  # aliases follow the merged cluster
                    self._by_key[key] = winner.id
        self._rekey(winner)
        return winner

    def upsert_edit(self, event: EditEvent) -> tuple[str, bool]:
        """Route one edit to its concept cluster, creating or merging as needed.

        Returns (cluster id, True when a fresh cluster was created).
        """
        ref = ArticleRef(event.language, event.title)
        record = EditRecord(event.timestamp, event.editor, event.language)
        equivalents = self._equivalents(ref)
        hits = sorted({self._by_ref[r] for r in equivalents if r in self._by_ref})
        if not hits:
            cluster = self._create(ref, record)
            cluster.ttl_deadline = cluster.last_seen + self.ttl
            return cluster.id, True
        cluster = self._merge(hits) if len(hits) > 1 else self._clusters[hits[0]]
        self._adopt(cluster, ref)
        self._rekey(cluster)
        insort(cluster.edits, record)
        cluster.last_seen = max(cluster.last_seen, record.timestamp)
        cluster.ttl_deadline = cluster.last_seen + self.ttl
        return cluster.id, False

    def expire(self, now: int) -> list[str]:
        """Drop every cluster whose TTL deadline has passed; return their ids."""
        expired = [cid for cid, c in self._clusters.items() if c.ttl_deadline <= now]
        for cid in expired:
            cluster = self._clusters.pop(cid)
            for ref in cluster.members:
                if self._by_ref.get(ref) == cid:
                    del self._by_ref[ref]
            for key in [k for k, v in self._by_key.items() if v == cid]:
                del self._by_key[key]
        return expired


def expire_clusters(store: ClusterStore, now: int) -> list[str]:
    return store.expire(now)
