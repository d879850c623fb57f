"""The whole machine: replayed edits in, archived gallery pairs out.

This demo builds a tiny world in ./demo_output — a langlink table, a recorded
edit stream with one genuine burst, and a fixture connector with images —
then runs the pipeline. Every illustrated event yields two galleries (one per
kind), each saved as a deterministic PNG dump with micropost-URL attribution
plus an HTML fragment, named kind_terms_timestamp under an archive/date dir.
"""
import json
from pathlib import Path

import numpy as np
from PIL import Image

from newsmosaic import MonitorConfig, ReplaySource, run_pipeline
from newsmosaic.clusters import FixtureLanglinkResolver
from newsmosaic.media import FixtureConnector
from newsmosaic.pipeline import PipelineConfig, StdoutPublisher

out = Path("demo_output")
(out / "connector").mkdir(parents=True, exist_ok=True)

# --- the cross-language link table ---------------------------------
(out / "langlinks.tsv").write_text(
    "en:Giant Slalom Final\tde:Riesenslalom Finale\n", encoding="utf-8")

# --- a recorded burst: 5 edits, 4 editors, 2 languages in 4 minutes --
(out / "stream.tsv").write_text("".join(
    f"{ts}\t#{lang}.wikipedia\t[[{title}]]  https://{lang}.example/diff * {editor} * (+{delta}) \n"
    for ts, lang, title, editor, delta in [
        (1000, "en", "Giant Slalom Final", "Alice", 210),
        (1060, "de", "Riesenslalom Finale", "Bob", 88),
        (1120, "en", "Giant Slalom Final", "Alice", 14),
        (1180, "de", "Riesenslalom Finale", "Carol", 45),
        (1240, "en", "Giant Slalom Final", "Dana", 302),
    ]), encoding="utf-8")

# --- media fixtures: one record file per search term, images on disk --
rng = np.random.default_rng(1)
records = []
for k in range(6):
    name = f"img{k}.png"
    arr = rng.integers(20, 236, (48, 64, 3), dtype=np.uint8)
    Image.fromarray(np.repeat(np.repeat(arr, 8, axis=0), 8, axis=1)).save(out / "connector" / name)
    records.append({
        "item_id": f"img{k}", "kind": "photo", "media_url": name,
        "width_px": 512, "height_px": 384,
        "micropost_text": f"Riesenslalom Finale moment {k}!",
        "micropost_url": f"http://posts.example/{k}",
        "author": "fan", "published_at": 1200 + k,
        "signals": {"likes": 10 * k, "views": 100 * k},
    })
(out / "connector" / "riesenslalom-finale.json").write_text(
    json.dumps(records), encoding="utf-8")

# --- run ------------------------------------------------------------
cfg = PipelineConfig(
    monitor=MonitorConfig(),
    connectors=[FixtureConnector(out / "connector", name="demo-net")],
    resolver=FixtureLanglinkResolver.from_file(out / "langlinks.tsv"),
    archive_dir=out / "archive",
    publisher=StdoutPublisher(),
)
report = run_pipeline(cfg, ReplaySource(out / "stream.tsv"))

print("\nrun report:")
print(json.dumps(report.as_dict(), indent=2))
print("\narchive contents:")
for path in sorted((out / "archive").rglob("*")):
    if path.is_file():
        print(" ", path)
