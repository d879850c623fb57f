"""Shared fixtures: deterministic images, fixture connectors, item factories."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from newsmosaic.media import MediaItem, SocialSignals

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


def make_item(
    item_id: str,
    width: int = 300,
    height: int = 200,
    kind: str = "photo",
    network: str = "fixturenet",
    media_url: str | None = None,
    text: str = "fixture text",
    likes: int = 0,
    shares: int = 0,
    comments: int = 0,
    views: int = 0,
    published_at: int = 0,
    poster_url: str | None = None,
) -> MediaItem:
    if kind == "video" and poster_url is None:
        poster_url = f"poster-{item_id}"
    return MediaItem(
        item_id=item_id,
        network=network,
        kind=kind,
        media_url=media_url or f"http://example.test/{item_id}",
        width_px=width,
        height_px=height,
        micropost_text=text,
        micropost_url=f"http://example.test/post/{item_id}",
        author="author",
        published_at=published_at,
        signals=SocialSignals(likes=likes, shares=shares, comments=comments, views=views),
        poster_url=poster_url,
    )


@pytest.fixture
def item_factory():
    return make_item


def flat_image(width: int, height: int, rgb: tuple[int, int, int]) -> np.ndarray:
    arr = np.empty((height, width, 3), dtype=np.uint8)
    arr[:, :] = rgb
    return arr


def textured_image(width: int, height: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    base = rng.integers(20, 236, (height // 8 + 1, width // 8 + 1, 3), dtype=np.uint8)
    return np.repeat(np.repeat(base, 8, axis=0), 8, axis=1)[:height, :width]


def save_png(path: Path, arr: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr).save(path, format="PNG")


def _write_records(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(records, ensure_ascii=False, indent=1), encoding="utf-8")


@pytest.fixture(scope="session")
def media_root(tmp_path_factory) -> Path:
    """Fixture connector directory with per-term record files and local images."""
    root = tmp_path_factory.mktemp("connector")

    base1 = textured_image(640, 480, seed=11)
    noisy = base1.astype(np.int16) + np.random.default_rng(12).integers(
        -5, 6, base1.shape, dtype=np.int16
    )
    base1_noise = np.clip(noisy, 0, 255).astype(np.uint8)

    images = {
        "a1.png": base1,
        "a2.png": base1_noise,
        "a3.png": textured_image(480, 360, seed=13),
        "a4.png": textured_image(800, 600, seed=14),
        "a5-poster.png": textured_image(1280, 720, seed=15),
        "a6.png": textured_image(320, 240, seed=16),
        "a7.png": textured_image(1024, 768, seed=17),
        "a8.png": textured_image(640, 480, seed=18),
        "a10.png": textured_image(600, 400, seed=19),
        "b1.png": textured_image(640, 480, seed=21),
        "b2.png": textured_image(480, 320, seed=22),
        "b3.png": textured_image(800, 600, seed=23),
        "b4.png": textured_image(640, 640, seed=24),
        "b5-poster.png": textured_image(960, 540, seed=25),
        "n1.png": textured_image(300, 300, seed=26),
    }
    for name, arr in images.items():
        save_png(root / name, arr)

    def rec(item_id, media, w, h, text, kind="photo", poster=None, published=0, **signals):
        record = {
            "item_id": item_id,
            "kind": kind,
            "media_url": media,
            "micropost_text": text,
            "micropost_url": f"http://posts.test/{item_id}",
            "author": "someone",
            "published_at": published,
            "signals": signals,
        }
        if w:
            record["width_px"] = w
            record["height_px"] = h
        if poster:
            record["poster_url"] = poster
        return record

    _write_records(root / "riesenslalom-finale.json", [
        rec("a1", "a1.png", 640, 480, "Riesenslalom Finale – Gold! 🎿",
            published=1100, likes=50, shares=5, comments=2),
        rec("a2", "a2.png", 640, 480, "Riesenslalom Finale wow", published=1150, likes=30),
        rec("a3", "a3.png", 480, 360, "Das Riesenslalom Finale war irre",
            published=1120, likes=80),
        rec("a4", "a4.png", 800, 600, "Riesenslalom Finale heute",
            published=1130, likes=10, views=500),
        rec("a5", "http://video.test/a5.mp4", 1280, 720, "Video vom Riesenslalom Finale",
            kind="video", poster="a5-poster.png", published=1140, likes=200, views=5000),
        rec("a6", "a6.png", 320, 240, "Riesenslalom Finale Schnee", published=1160, likes=5),
        rec("a7", "a7.png", 0, 0, "Riesenslalom Finale Jubel",
            published=1170, likes=60, comments=12),
        rec("n1", "n1.png", 300, 300, "#2014 #nofilter party pics",
            published=1190, likes=999),
    ])
    _write_records(root / "giant-slalom-final.json", [
        rec("a8", "a8.png", 640, 480, "Giant Slalom Final victory lap!",
            published=1180, likes=40),
        rec("a9", "a8.png", 640, 480, "Giant Slalom Final encore", published=1185, likes=7),
    ])
    _write_records(root / "slalom-géant-finale.json", [
        rec("a10", "a10.png", 600, 400, "Slalom géant finale magnifique",
            published=1175, likes=15),
    ])
    _write_records(root / "medal-table.json", [
        rec("b1", "b1.png", 640, 480, "Medal Table update: gold rush",
            published=2100, likes=90),
        rec("b2", "b2.png", 480, 320, "New Medal Table leader!", published=2150, likes=20),
        rec("b3", "b3.png", 800, 600, "Medal Table frenzy",
            published=2120, likes=45, comments=3),
        rec("b4", "b4.png", 640, 640, "Look at the Medal Table now",
            published=2160, likes=33),
        rec("b5", "http://video.test/b5.mp4", 960, 540, "Medal Table video recap",
            kind="video", poster="b5-poster.png", published=2170, likes=150, views=9000),
    ])
    return root


@pytest.fixture(scope="session")
def nofilter_root(tmp_path_factory) -> Path:
    """Items whose text shares tokens but never the whole phrase."""
    root = tmp_path_factory.mktemp("nofilter")
    texts = [
        "#2014 #nofilter party pics",
        "Best of #2014 #nofilter moments",
        "my 2014 recap #nofilter",
        "#sochi2014 #2014 #nofilter fun times",
        "Winter vibes 2014 #nofilter",
    ]
    _write_records(root / "2014-winter-olympics.json", [
        {
            "item_id": f"nf{i}",
            "kind": "photo",
            "media_url": f"http://example.test/nf{i}.jpg",
            "width_px": 400,
            "height_px": 300,
            "micropost_text": text,
            "micropost_url": f"http://posts.test/nf{i}",
            "author": "x",
            "published_at": i,
            "signals": {"likes": 1000 + i},
        }
        for i, text in enumerate(texts)
    ])
    return root


@pytest.fixture(scope="session")
def matched_root(tmp_path_factory) -> Path:
    """Items whose text contains the full phrase, with varied casing."""
    root = tmp_path_factory.mktemp("matched")
    texts = [
        "go 2014 Winter Olympics go",
        "The 2014 winter olympics rock",
        "2014 Winter Olympics 🎿 gold",
        "Amazing: 2014 WINTER OLYMPICS!",
        "2014 Winter Olympics",
    ]
    _write_records(root / "2014-winter-olympics.json", [
        {
            "item_id": f"m{i}",
            "kind": "photo",
            "media_url": f"http://example.test/m{i}.jpg",
            "width_px": 400,
            "height_px": 300,
            "micropost_text": text,
            "micropost_url": f"http://posts.test/m{i}",
            "author": "x",
            "published_at": i,
            "signals": {"likes": 10 + i},
        }
        for i, text in enumerate(texts)
    ])
    return root
