"""The two gallery kinds and the three aesthetic principles.

A gallery is balanced when its outline is rectangular, hole-free when the
content has no interior gaps, and order-respecting when items appear in
insertion order. The equal-size kind keeps aspect ratios by justifying rows;
the varying-size kind crops to squares and mixes big squares with 2x2 blocks
packed into the shortest column.
"""
import random

from newsmosaic import (
    LOOSE_KIND,
    STRICT_KIND,
    LayoutSpec,
    MediaItem,
    SocialSignals,
    balance_gallery,
    check_aesthetics,
    classify_prominent,
    layout_loose,
    layout_strict,
)


def photo(item_id, w, h, likes=0):
    return MediaItem(item_id=item_id, network="demo", kind="photo",
                     media_url=f"http://demo.test/{item_id}.jpg", width_px=w, height_px=h,
                     micropost_text="x", micropost_url=f"http://demo.test/p/{item_id}",
                     author="a", published_at=0, signals=SocialSignals(likes=likes))


def show(gallery, label):
    report = check_aesthetics(gallery)
    print(f"\n{label}: {len(gallery.placed)} placed, {len(gallery.omitted)} omitted,"
          f" bounds {gallery.bounds_w:.0f}x{gallery.bounds_h:.0f}")
    print(f"  balanced={report.balanced} hole_free={report.hole_free}"
          f" order_respecting={report.order_respecting}")
    for p in gallery.placed[:6]:
        print(f"  {p.item.item_id}: ({p.x:.1f},{p.y:.1f}) {p.w:.1f}x{p.h:.1f}"
              f"{' BIG' if p.prominent else ''}")


rng = random.Random(4)
items = [photo(f"p{k}", rng.randint(200, 900), rng.randint(200, 900), likes=rng.randint(0, 50))
         for k in range(9)]

# Equal size: rows fill at the max height, then scale down to span the width.
spec = LayoutSpec(gallery_width_px=600, max_row_height_px=200, gutter_px=2)
show(layout_strict(items, spec), "strict order, equal size")

# Varying size: prominence decides which items become big squares.
loose_spec = LayoutSpec(gallery_width_px=604, max_row_height_px=200, columns=2, gutter_px=2)
flags = classify_prominent(items)
show(layout_loose(items, flags, loose_spec), "loose order, varying size")

# Balancing nudges the item count within ±5 (and the last prominence flag for
# the varying-size kind) until all three checks pass, or flags best-effort.
for kind, kind_spec in ((STRICT_KIND, spec), (LOOSE_KIND, loose_spec)):
    reserve = [photo(f"r{k}", 400, 300) for k in range(5)]
    balanced = balance_gallery(items, kind_spec, kind, reserve=reserve)
    show(balanced, f"balanced {kind} (best_effort={balanced.best_effort})")
