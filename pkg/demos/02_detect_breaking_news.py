"""From single edits to breaking-news events.

Articles about one concept are linked across language editions. Edits to any
of them land in one concept cluster, and a burst of edits by several editors
in several languages within a short window is the breaking-news signal.
"""
from newsmosaic import (
    ArticleRef,
    ClusterStore,
    EditEvent,
    FixtureLanglinkResolver,
    MonitorConfig,
    SpikeMonitor,
)

# Interlanguage links: the same concept in three editions.
resolver = FixtureLanglinkResolver([
    (ArticleRef("en", "Giant Slalom Final"), ArticleRef("de", "Riesenslalom Finale")),
    (ArticleRef("de", "Riesenslalom Finale"), ArticleRef("fr", "Slalom géant finale")),
])

config = MonitorConfig(min_edits=5, min_editors=2, min_languages=2,
                       max_inter_edit_gap=240, ttl=3600, re_emit_throttle=60)
store = ClusterStore(resolver, ttl=config.ttl)
monitor = SpikeMonitor(store, config)


def edit(lang, title, editor, ts):
    return EditEvent(language=lang, title=title, editor=editor, byte_delta=42,
                     diff_url="https://example.org/diff", comment="", timestamp=ts)


burst = [
    ("en", "Giant Slalom Final", "Alice", 1000),
    ("de", "Riesenslalom Finale", "Bob", 1060),
    ("en", "Giant Slalom Final", "Alice", 1120),
    ("fr", "Slalom géant finale", "Carol", 1180),
    ("en", "Giant Slalom Final", "Dana", 1240),
]

for row in burst:
    emitted = monitor.observe(edit(*row))
    status = "BREAKING" if emitted else "quiet"
    print(f"t={row[3]} {row[0]}:{row[1]:<24} -> {status}")
    if emitted:
        print("  cluster:", emitted.cluster_id)
        print("  search terms:", list(emitted.search_terms))
        print("  article urls:", list(emitted.article_urls))
        print(f"  run: {emitted.edit_count} edits, {emitted.editor_count} editors,"
              f" {emitted.language_count} languages")

# Within the throttle window nothing is re-emitted, even though the cluster
# still satisfies the spike conditions.
assert monitor.observe(edit("en", "Giant Slalom Final", "Eve", 1250)) is None
print("\nre-emission 10s later: suppressed by throttle")

# After the throttle has elapsed and a new edit arrived, the event re-emits;
# downstream this is how galleries evolve over an event's lifetime.
again = monitor.observe(edit("de", "Riesenslalom Finale", "Bob", 1310))
print("re-emission 70s later:", "emitted" if again else "suppressed")
