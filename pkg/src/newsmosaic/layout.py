"""Gallery geometry: justified rows, square-block columns, aesthetics checks.

Two gallery kinds are produced. The equal-size kind fills rows left to right
at a maximum row height and scales each full row down uniformly so it spans
the gallery width exactly, which keeps aspect ratios and insertion order
intact. The varying-size kind crops everything to squares, groups
non-prominent items into 2x2 blocks, promotes prominent items to big squares
(side = two smalls plus the gutter), and drops each finished unit into the
currently shortest column.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .dedup import signal_score
from .media import MediaItem, VIDEO

STRICT_KIND = "strict-order-equal-size"
LOOSE_KIND = "loose-order-varying-size"

MIN_SMALL_SQUARE_PX = 16


class InvalidSpecError(ValueError):
    """Layout spec that cannot produce usable geometry."""


@dataclass(frozen=True)
class LayoutSpec:
    gallery_width_px: int
    max_row_height_px: int = 240
    columns: int = 3
    gutter_px: int = 2

    def __post_init__(self) -> None:
        if self.gallery_width_px <= 0 or self.max_row_height_px <= 0:
            raise InvalidSpecError("dimensions must be positive")
        if self.columns < 1:
            raise InvalidSpecError("columns must be >= 1")
        if self.gutter_px < 0:
            raise InvalidSpecError("gutter must be non-negative")
        if self.gallery_width_px < self.max_row_height_px / 4:
            raise InvalidSpecError("gallery width implausibly small for row height")


@dataclass(frozen=True)
class PlacedItem:
    """One item at its gallery position; crop is a (sx, sy, side) source square."""

    item: MediaItem
    x: float
    y: float
    w: float
    h: float
    crop: tuple[int, int, int] | None = None
    prominent: bool = False
    unit: int = 0


@dataclass
class MediaGallery:
    kind: str
    spec: LayoutSpec
    placed: list[PlacedItem]
    bounds_w: float
    bounds_h: float
    omitted: list[MediaItem] = field(default_factory=list)
    best_effort: bool = False


@dataclass(frozen=True)
class AestheticsReport:
    balanced: bool
    hole_free: bool
    order_respecting: bool

    @property
    def all_pass(self) -> bool:
        return self.balanced and self.hole_free and self.order_respecting


def _centered_square(item: MediaItem) -> tuple[int, int, int]:
    side = min(item.width_px, item.height_px)
    return (item.width_px - side) // 2, (item.height_px - side) // 2, side


def small_square_side(spec: LayoutSpec) -> float:
    """Small square side for the varying-size kind, from width and columns."""
    g = spec.gutter_px
    side = ((spec.gallery_width_px - (spec.columns - 1) * g) / spec.columns - g) / 2
    if side < MIN_SMALL_SQUARE_PX:
        raise InvalidSpecError(
            f"{spec.columns} columns in {spec.gallery_width_px}px leave "
            f"{side:.1f}px squares; need >= {MIN_SMALL_SQUARE_PX}px"
        )
    return side


def layout_strict(items: list[MediaItem], spec: LayoutSpec) -> MediaGallery:
    """Justified-row layout: per-row uniform height, aspect-preserving widths.

    A row collects items at the maximum row height until its accumulated
    width (gutters included) reaches the gallery width, then the whole row is
    scaled down uniformly to span it exactly. A final underfull row stays at
    the maximum height, left-aligned and unjustified.
    """
    g = spec.gutter_px
    width = spec.gallery_width_px
    h_max = spec.max_row_height_px

    rows: list[tuple[list[tuple[MediaItem, float]], bool]] = []
    row: list[tuple[MediaItem, float]] = []
    natural_total = 0.0
    for item in items:
        natural_w = item.width_px / item.height_px * h_max
        row.append((item, natural_w))
        natural_total += natural_w
        if natural_total + g * (len(row) - 1) >= width:
            rows.append((row, True))
            row = []
            natural_total = 0.0
    if row:
        rows.append((row, False))

    placed: list[PlacedItem] = []
    y = 0.0
    for unit, (entries, justified) in enumerate(rows):
        if justified:
            available = width - g * (len(entries) - 1)
            factor = available / sum(natural for _, natural in entries)
        else:
            factor = 1.0
        row_h = h_max * factor
        x = 0.0
        for item, natural in entries:
            w = natural * factor
            placed.append(PlacedItem(item, x, y, w, row_h, unit=unit))
            x += w + g
        y += row_h + g

    bounds_w = max((p.x + p.w for p in placed), default=0.0)
    bounds_h = y - g if placed else 0.0
    return MediaGallery(STRICT_KIND, spec, placed, bounds_w, bounds_h)


def layout_loose(
    items: list[MediaItem], prominence_flags: list[bool], spec: LayoutSpec
) -> MediaGallery:
    """Square-crop layout mixing big squares with 2x2 small blocks.

    Prominent items become big units immediately; non-prominent items fill
    the pending 2x2 block row-major and emit when full. Each finished unit
    joins the currently shortest column (ties leftmost). At end of input a
    single pending item is promoted to a big unit; with two or three pending,
    the first is promoted and the rest are omitted — hole-freeness outranks
    completeness.
    """
    if len(items) != len(prominence_flags):
        raise ValueError("items and prominence flags must align")
    small = small_square_side(spec)
    g = spec.gutter_px
    big = 2 * small + g
    columns = spec.columns
    col_heights = [0.0] * columns

    cells: list[tuple[int, PlacedItem]] = []  # (input index, placement)
    omitted: list[MediaItem] = []
    pending: list[tuple[int, MediaItem]] = []
    unit = 0

    def place_unit(members: list[tuple[int, MediaItem, float, float, float, bool]]) -> None:
        nonlocal unit
        col = min(range(columns), key=lambda c: (col_heights[c], c))
        x0 = col * (big + g)
        y0 = col_heights[col] + (g if col_heights[col] > 0 else 0.0)
        for index, item, dx, dy, side, prominent in members:
            cells.append((index, PlacedItem(
                item, x0 + dx, y0 + dy, side, side,
                crop=_centered_square(item), prominent=prominent, unit=unit,
            )))
        col_heights[col] = y0 + big
        unit += 1

    def emit_big(index: int, item: MediaItem) -> None:
        place_unit([(index, item, 0.0, 0.0, big, True)])

    def emit_block(block: list[tuple[int, MediaItem]]) -> None:
        offsets = [(0.0, 0.0), (small + g, 0.0), (0.0, small + g), (small + g, small + g)]
        place_unit([(i, m, dx, dy, small, False)
                    for (i, m), (dx, dy) in zip(block, offsets)])

    for index, (item, prominent) in enumerate(zip(items, prominence_flags)):
        if prominent:
            emit_big(index, item)
        else:
            pending.append((index, item))
            if len(pending) == 4:
                emit_block(pending)
                pending = []

    if len(pending) == 1:
        emit_big(*pending[0])
    elif len(pending) >= 2:
        emit_big(*pending[0])
        omitted.extend(item for _, item in pending[1:])

    cells.sort(key=lambda pair: pair[0])  # placed list stays in input order
    placed = [placement for _, placement in cells]
    bounds_w = max((p.x + p.w for p in placed), default=0.0)
    bounds_h = max(col_heights) if placed else 0.0
    return MediaGallery(LOOSE_KIND, spec, placed, bounds_w, bounds_h, omitted)


# ----------------------------------------------------------------------
# Aesthetics predicates
# ----------------------------------------------------------------------


def _rows_of(gallery: MediaGallery) -> list[list[PlacedItem]]:
    rows: dict[int, list[PlacedItem]] = {}
    for p in gallery.placed:
        rows.setdefault(p.unit, []).append(p)
    return [rows[unit] for unit in sorted(rows)]


def _column_heights(gallery: MediaGallery) -> list[float]:
    small = small_square_side(gallery.spec)
    g = gallery.spec.gutter_px
    stride = 2 * small + g * 2  # big square plus one gutter
    heights = [0.0] * gallery.spec.columns
    for p in gallery.placed:
        col = int(p.x / stride + 1e-9)
        heights[col] = max(heights[col], p.y + p.h)
    return heights


def _balanced(gallery: MediaGallery, eps: float) -> bool:
    if not gallery.placed:
        return True
    if gallery.kind == STRICT_KIND:
        width = gallery.spec.gallery_width_px
        for row in _rows_of(gallery):
            span = max(p.x + p.w for p in row)
            if abs(span - width) > eps:
                return False
        return True
    heights = _column_heights(gallery)
    return max(heights) - min(heights) <= eps


def _hole_free(gallery: MediaGallery) -> bool:
    """No interior gaps: every uncovered grid cell must reach the boundary.

    Rects are expanded by half the gutter before rasterizing on a unit grid,
    so legitimate spacing never reads as a gap; uncovered regions are only
    holes when they are fully enclosed by media.
    """
    if not gallery.placed:
        return True
    g = gallery.spec.gutter_px
    half = g / 2
    width = math.ceil(gallery.bounds_w)
    height = math.ceil(gallery.bounds_h)
    if width <= 0 or height <= 0:
        return True
    covered = np.zeros((height, width), dtype=bool)
    for p in gallery.placed:
        x_lo = max(0, math.ceil(p.x - half - 0.5 - 1e-9))
        x_hi = min(width - 1, math.floor(p.x + p.w + half - 0.5 + 1e-9))
        y_lo = max(0, math.ceil(p.y - half - 0.5 - 1e-9))
        y_hi = min(height - 1, math.floor(p.y + p.h + half - 0.5 + 1e-9))
        if x_hi >= x_lo and y_hi >= y_lo:
            covered[y_lo : y_hi + 1, x_lo : x_hi + 1] = True
    uncovered = ~covered
    if not uncovered.any():
        return True
    labels, count = ndimage.label(uncovered)
    border = np.unique(
        np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]])
    )
    interior = set(range(1, count + 1)) - set(int(b) for b in border)
    return not interior


def _order_respecting(gallery: MediaGallery) -> bool:
    placed = gallery.placed
    if not placed:
        return True
    if gallery.kind == STRICT_KIND:
        indexed = sorted(range(len(placed)), key=lambda i: (placed[i].unit, placed[i].x))
        return indexed == list(range(len(placed)))
    # Loose: units must emit in first-member order, blocks filled row-major.
    units: dict[int, list[int]] = {}
    for i, p in enumerate(placed):
        units.setdefault(p.unit, []).append(i)
    first_members = [min(members) for _, members in sorted(units.items())]
    if first_members != sorted(first_members):
        return False
    for _, members in sorted(units.items()):
        if members != sorted(members):
            return False
        by_position = sorted(members, key=lambda i: (placed[i].y, placed[i].x))
        if by_position != members:
            return False
    return True


def check_aesthetics(gallery: MediaGallery, epsilon_px: float = 1.0) -> AestheticsReport:
    """Evaluate the three aesthetic principles on a finished gallery."""
    return AestheticsReport(
        balanced=_balanced(gallery, epsilon_px),
        hole_free=_hole_free(gallery),
        order_respecting=_order_respecting(gallery),
    )


# ----------------------------------------------------------------------
# Prominence and balancing
# ----------------------------------------------------------------------


def classify_prominent(items: list[MediaItem]) -> list[bool]:
    """Feature-worthiness heuristic: videos always; photos only when they
    rank in the top signal quartile and are at least 640px on the short side."""
    if not items:
        return []
    scores = [signal_score(item.signals) for item in items]
    top_k = max(1, math.ceil(len(items) / 4))
    threshold = sorted(scores, reverse=True)[top_k - 1]
    return [
        item.kind == VIDEO
        or (score >= threshold and min(item.width_px, item.height_px) >= 640)
        for item, score in zip(items, scores)
    ]


def _candidates(n: int, max_steps: int) -> list[int]:
    deltas = [0]
    for step in range(1, max_steps + 1):
        deltas.extend((step, -step))
    return deltas


def balance_gallery(
    items: list[MediaItem],
    spec: LayoutSpec,
    kind: str,
    reserve: list[MediaItem] | None = None,
    max_steps: int = 5,
) -> MediaGallery:
    """Search nearby item counts for a gallery passing every aesthetic check.

    Counts are tried in the order n, n+1, n-1, n+2, ... within ±max_steps;
    additions come from the ranked reserve. The varying-size kind also tries
    toggling the prominence of the final item, since its shape may need one
    more big or small unit. When nothing passes, the most balanced candidate
    closest to the requested count is returned flagged best-effort.
    """
    if kind not in (STRICT_KIND, LOOSE_KIND):
        raise ValueError(f"unknown gallery kind: {kind!r}")
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    reserve = list(reserve or [])
    base = list(items)
    n = len(base)

    def build(candidate: list[MediaItem]) -> list[MediaGallery]:
        if kind == STRICT_KIND:
            return [layout_strict(candidate, spec)]
        flags = classify_prominent(candidate)
        variants = [layout_loose(candidate, flags, spec)]
        if candidate:
            toggled = flags[:]
            toggled[-1] = not toggled[-1]
            if toggled != flags:
                variants.append(layout_loose(candidate, toggled, spec))
        return variants

    if n == 0:
        return build([])[0]

    best: MediaGallery | None = None
    best_rank: tuple | None = None
    for delta in _candidates(n, max_steps):
        count = n + delta
        if count < 1 or count > n + len(reserve):
            continue
        candidate = base + reserve[:delta] if delta > 0 else base[:count]
        for gallery in build(candidate):
            report = check_aesthetics(gallery)
            if report.all_pass:
                return gallery
            rank = (not report.balanced, abs(delta))
            if best_rank is None or rank < best_rank:
                best, best_rank = gallery, rank
    assert best is not None
    best.best_effort = True
    return best
