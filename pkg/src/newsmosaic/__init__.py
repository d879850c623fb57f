"""newsmosaic: breaking-news detection from wiki edit streams with
automatically laid-out, deterministically rendered social-media galleries."""

from .clusters import (
    ArticleRef,
    ClusterStore,
    ConceptCluster,
    FixtureLanglinkResolver,
    cluster_key,
    expire_clusters,
    resolve_equivalents,
)
from .dedup import (
    DedupConfig,
    DuplicateCluster,
    TileSignature,
    cluster_duplicates,
    is_near_duplicate,
    rank_items,
    signal_score,
    tile_signature,
)
from .edits import (
    EditEvent,
    LiveIrcSource,
    ReplaySource,
    channel_for_language,
    parse_irc_line,
    replay_stream,
    serialize_event,
    strip_control_codes,
)
from .layout import (
    LOOSE_KIND,
    STRICT_KIND,
    AestheticsReport,
    LayoutSpec,
    MediaGallery,
    PlacedItem,
    balance_gallery,
    check_aesthetics,
    classify_prominent,
    layout_loose,
    layout_strict,
)
from .media import (
    FixtureConnector,
    MediaItem,
    MediaSearchResult,
    SocialSignals,
    matches_phrase,
    search_media,
)
from .metrics import EvalLabel, MetricsReport, bundled_labels, compute_metrics, load_labels
from .monitor import (
    BreakingNewsEvent,
    MonitorConfig,
    SpikeMonitor,
    evaluate_breaking,
    search_terms_for_cluster,
)
from .pipeline import PipelineConfig, RunReport, run_pipeline
from .render import RenderConfig, archive_path, compose_png, emit_html

__version__ = "0.1.0"

__all__ = [
    "ArticleRef", "ClusterStore", "ConceptCluster", "FixtureLanglinkResolver",
    "cluster_key", "expire_clusters", "resolve_equivalents",
    "DedupConfig", "DuplicateCluster", "TileSignature", "cluster_duplicates",
    "is_near_duplicate", "rank_items", "signal_score", "tile_signature",
    "EditEvent", "LiveIrcSource", "ReplaySource", "channel_for_language",
    "parse_irc_line", "replay_stream", "serialize_event", "strip_control_codes",
    "LOOSE_KIND", "STRICT_KIND", "AestheticsReport", "LayoutSpec", "MediaGallery",
    "PlacedItem", "balance_gallery", "check_aesthetics", "classify_prominent",
    "layout_loose", "layout_strict",
    "FixtureConnector", "MediaItem", "MediaSearchResult", "SocialSignals",
    "matches_phrase", "search_media",
    "EvalLabel", "MetricsReport", "bundled_labels", "compute_metrics", "load_labels",
    "BreakingNewsEvent", "MonitorConfig", "SpikeMonitor", "evaluate_breaking",
    "search_terms_for_cluster",
    "PipelineConfig", "RunReport", "run_pipeline",
    "RenderConfig", "archive_path", "compose_png", "emit_html",
]
