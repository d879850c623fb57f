"""Gallery output: HTML fragments, deterministic PNG dumps, archive naming."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from html import escape
from typing import Mapping

import numpy as np
from PIL import Image

from .glyphs import GLYPH_H, draw_text
from .layout import MediaGallery, PlacedItem
from .media import VIDEO
from .util import format_px, slugify

BORDER_COLOR = (136, 136, 136)
PNG_COMPRESS_LEVEL = 6  # pinned so identical inputs give identical bytes


class RenderError(RuntimeError):
    pass


@dataclass(frozen=True)
class RenderConfig:
    border_px: int = 1
    attribution_line_height_px: int = 14
    background_color: tuple[int, int, int] = (255, 255, 255)

    def __post_init__(self) -> None:
        if self.border_px <= 0 or self.attribution_line_height_px <= 0:
            raise ValueError("render config values must be positive")


def _media_element(placed: PlacedItem) -> str:
    inner_w = math.floor(placed.w)
    inner_h = math.floor(placed.h)
    style = f"width: {inner_w}px; height: {inner_h}px;"
    item = placed.item
    if item.kind == VIDEO:
        return (
            f'<video src="{escape(item.media_url, quote=True)}"'
            f' poster="{escape(item.poster_url or "", quote=True)}"'
            f' class="gallery" style="{style}"></video>'
        )
    return (
        f'<img src="{escape(item.media_url, quote=True)}"'
        f' class="gallery" style="{style}">'
    )


def emit_html(gallery: MediaGallery) -> str:
    """Serialize a gallery as a standalone HTML fragment.

    Items keep their input order and carry 1-based tabindexes; each one links
    back to its originating micropost. Inner media dimensions are the floor
    of the (possibly fractional) placed dimensions.
    """
    width = format_px(float(gallery.spec.gallery_width_px))
    if not gallery.placed:
        return f'<div id="mediaGallery" style="width: {width};"></div>'
    lines = [f'<div id="mediaGallery" style="width: {width};">']
    for index, placed in enumerate(gallery.placed, start=1):
        outer = f"width: {format_px(placed.w)}; height: {format_px(placed.h)};"
        lines.append(
            f'  <div class="mediaItem photoBorder" tabindex="{index}" style="{outer}">'
        )
        lines.append(
            f'    <a href="{escape(placed.item.micropost_url, quote=True)}">'
        )
        lines.append(f"      {_media_element(placed)}")
        lines.append("    </a>")
        lines.append("  </div>")
    lines.append("</div>")
    return "\n".join(lines)


def _paste_item(
    canvas: np.ndarray, placed: PlacedItem, raster: np.ndarray, border_px: int
) -> None:
    x = int(round(placed.x))
    y = int(round(placed.y))
    w = max(1, int(round(placed.w)))
    h = max(1, int(round(placed.h)))
    source = raster
    if placed.crop is not None:
        sx, sy, side = placed.crop
        src_h, src_w = raster.shape[:2]
        side = min(side, src_w - sx, src_h - sy)
        source = raster[sy : sy + side, sx : sx + side]
    scaled = np.asarray(
        Image.fromarray(source).resize((w, h), Image.BILINEAR), dtype=np.uint8
    )
    height, width = canvas.shape[:2]
    x_end = min(x + w, width)
    y_end = min(y + h, height)
    canvas[y:y_end, x:x_end] = scaled[: y_end - y, : x_end - x]
    b = border_px
    canvas[y : y + b, x:x_end] = BORDER_COLOR
    canvas[max(y, y_end - b) : y_end, x:x_end] = BORDER_COLOR
    canvas[y:y_end, x : x + b] = BORDER_COLOR
    canvas[y:y_end, max(x, x_end - b) : x_end] = BORDER_COLOR


def compose_png(
    gallery: MediaGallery,
    images: Mapping[str, np.ndarray],
    cfg: RenderConfig = RenderConfig(),
) -> tuple[np.ndarray, bytes]:
    """Rasterize a gallery plus one attribution line per item.

    Every placed item's micropost URL is drawn below the gallery with the
    bundled bitmap font, so the dump remains attributable when shared as a
    bare image. Output bytes are identical across runs for identical inputs.
    """
    if not gallery.placed:
        raise RenderError("cannot dump an empty gallery")
    gallery_h = math.ceil(gallery.bounds_h)
    width = math.ceil(gallery.bounds_w)
    height = gallery_h + cfg.attribution_line_height_px * len(gallery.placed)
    canvas = np.empty((height, width, 3), dtype=np.uint8)
    canvas[:, :] = cfg.background_color

    for placed in gallery.placed:
        raster = images.get(placed.item.item_id)
        if raster is None:
            raise RenderError(f"no decoded raster for item {placed.item.item_id}")
        if not isinstance(raster, np.ndarray):
            raster = np.asarray(raster.convert("RGB"), dtype=np.uint8)
        _paste_item(canvas, placed, raster, cfg.border_px)

    pad = max(0, (cfg.attribution_line_height_px - GLYPH_H) // 2)
    for index, placed in enumerate(gallery.placed):
        y = gallery_h + index * cfg.attribution_line_height_px + pad
        draw_text(canvas, placed.item.micropost_url, 2, y)

    buffer = io.BytesIO()
    Image.fromarray(canvas).save(buffer, format="PNG", compress_level=PNG_COMPRESS_LEVEL)
    return canvas, buffer.getvalue()


def archive_path(kind: str, terms: list[str], unix_ts: int) -> str:
    """File name for an archived dump: kind, first-term slug, timestamp."""
    if not terms:
        raise ValueError("terms must be non-empty")
    return f"{kind}_{slugify(terms[0])}_{unix_ts}.png"
