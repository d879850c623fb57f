"""Near-duplicate collapse via tile signatures and social-signal ranking."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .media import MediaItem, SocialSignals

DEFAULT_WEIGHTS: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)

TILE_PX = 10


class SignatureUnavailable(ValueError):
    """Image too small or undecodable; the item is treated as unique."""


@dataclass(frozen=True)
class DedupConfig:
    """Signature geometry and the near-duplicate decision thresholds."""

    grid: int = 10
    tolerance: float = 24.0
    agreement: float = 0.90

    def __post_init__(self) -> None:
        if self.grid < 1 or self.tolerance < 0 or not 0 < self.agreement <= 1:
            raise ValueError("bad dedup config")


DEFAULT_DEDUP = DedupConfig()


@dataclass(eq=False)
class TileSignature:
    """Per-tile mean color of an image resampled onto a fixed grid."""

    tiles: np.ndarray  # (grid, grid, 3) float64 channel means in 0..255
    source_dims: tuple[int, int]


def _as_rgb_array(image) -> np.ndarray:
    if isinstance(image, np.ndarray):
        arr = image
        if arr.ndim == 2:
            arr = np.stack([arr] * 3, axis=-1)
        if arr.ndim != 3 or arr.shape[2] < 3:
            raise SignatureUnavailable(f"not an RGB raster: shape {arr.shape}")
        return arr[:, :, :3].astype(np.uint8)
    try:
        return np.asarray(image.convert("RGB"), dtype=np.uint8)
    except Exception as exc:
        raise SignatureUnavailable(f"undecodable image: {exc}") from exc


def bilinear_resize(image: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Pointwise bilinear resample with edge clamping; returns float64.

    Sample positions map output pixel centers onto the source, so an exact
    2:1 downscale averages adjacent pixel pairs and a same-size call is the
    identity.
    """
    src = image.astype(np.float64)
    in_h, in_w = src.shape[:2]
    xs = (np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5
    ys = (np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5
    x_floor = np.floor(xs)
    y_floor = np.floor(ys)
    tx = (xs - x_floor)[None, :, None]
    ty = (ys - y_floor)[:, None, None]
    x0 = np.clip(x_floor.astype(np.int64), 0, in_w - 1)
    x1 = np.clip(x_floor.astype(np.int64) + 1, 0, in_w - 1)
    y0 = np.clip(y_floor.astype(np.int64), 0, in_h - 1)
    y1 = np.clip(y_floor.astype(np.int64) + 1, 0, in_h - 1)
    p00 = src[np.ix_(y0, x0)]
    p01 = src[np.ix_(y0, x1)]
    p10 = src[np.ix_(y1, x0)]
    p11 = src[np.ix_(y1, x1)]
    return (p00 * (1 - tx) * (1 - ty) + p01 * tx * (1 - ty)
            + p10 * (1 - tx) * ty + p11 * tx * ty)


def tile_signature(image, config: DedupConfig = DEFAULT_DEDUP) -> TileSignature:
    """Resample to a square grid of tiles and record each tile's mean color.

    Accepts a PIL image or an (H, W, 3) array; videos should pass their
    poster frame. Images smaller than one tile in either direction cannot
    be signed.
    """
    arr = _as_rgb_array(image)
    height, width = arr.shape[:2]
    if width < TILE_PX or height < TILE_PX:
        raise SignatureUnavailable(f"image {width}x{height} below {TILE_PX}x{TILE_PX}")
    side = config.grid * TILE_PX
    pixels = bilinear_resize(arr, side, side)
    tiles = pixels.reshape(config.grid, TILE_PX, config.grid, TILE_PX, 3).mean(axis=(1, 3))
    return TileSignature(tiles=tiles, source_dims=(width, height))


def is_near_duplicate(
    a: TileSignature, b: TileSignature, config: DedupConfig = DEFAULT_DEDUP
) -> bool:
    """True when enough tiles agree within the per-channel tolerance."""
    diff = np.abs(a.tiles - b.tiles).max(axis=2)
    agreeing = int((diff <= config.tolerance + 1e-9).sum())
    total = config.grid * config.grid
    return agreeing / total + 1e-12 >= config.agreement


def signal_score(
    signals: SocialSignals, weights: Sequence[float] = DEFAULT_WEIGHTS
) -> float:
    """Log-damped weighted signal sum; damping keeps one viral item from
    freezing the ranking forever."""
    values = (signals.likes, signals.shares, signals.comments, signals.views)
    return sum(w * math.log1p(v) for w, v in zip(weights, values))


@dataclass
class DuplicateCluster:
    """Items judged to depict the same content, collapsed to one survivor."""

    members: list[MediaItem]
    representative: MediaItem
    merged_signals: SocialSignals = field(default_factory=SocialSignals)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


RasterLoader = Callable[[MediaItem], "np.ndarray | Image.Image | None"]


def cluster_duplicates(
    items: list[MediaItem],
    raster_for: RasterLoader | None = None,
    config: DedupConfig = DEFAULT_DEDUP,
) -> list[DuplicateCluster]:
    """Group items into connected components of the near-duplicate relation.

    Exact media-url equality always merges; signature comparison applies
    when both rasters are available. The representative is the strongest
    member by signal score (ties: earliest published, then item id), and the
    merged signals are the field-wise sum over members.
    """
    signatures: list[TileSignature | None] = []
    for item in items:
        signature = None
        if raster_for is not None:
            raster = raster_for(item)
            if raster is not None:
                try:
                    signature = tile_signature(raster, config)
                except SignatureUnavailable:
                    signature = None
        signatures.append(signature)

    uf = _UnionFind(len(items))
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i].media_url and items[i].media_url == items[j].media_url:
                uf.union(i, j)
            elif signatures[i] is not None and signatures[j] is not None:
                if is_near_duplicate(signatures[i], signatures[j], config):
                    uf.union(i, j)

    components: dict[int, list[int]] = {}
    for i in range(len(items)):
        components.setdefault(uf.find(i), []).append(i)

    clusters = []
    for root in sorted(components):
        members = [items[i] for i in components[root]]
        representative = min(
            members,
            key=lambda m: (-signal_score(m.signals), m.published_at, m.item_id),
        )
        merged = SocialSignals()
        for member in members:
            merged = merged + member.signals
        clusters.append(DuplicateCluster(members, representative, merged))
    return clusters


def rank_items(
    clusters: list[DuplicateCluster],
    weights: Sequence[float] = DEFAULT_WEIGHTS,
) -> list[MediaItem]:
    """Order cluster representatives by merged social-signal score.

    Descending score; ties go to the newer publication, then ascending
    item id so the order is total.
    """
    if len(weights) != 4 or any(w < 0 for w in weights):
        raise ValueError("weights must be 4 non-negative reals")
    if not any(weights):
        raise ValueError("weights must not all be zero")
    ordered = sorted(
        clusters,
        key=lambda c: (
            -signal_score(c.merged_signals, weights),
            -c.representative.published_at,
            c.representative.item_id,
        ),
    )
    return [c.representative for c in ordered]
