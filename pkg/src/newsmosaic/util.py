"""Small shared helpers: slugs, pixel formatting, atomic file writes."""
from __future__ import annotations

import os
import tempfile
import unicodedata
from pathlib import Path


def slugify(text: str, max_len: int = 80) -> str:
    """Reduce arbitrary text to a lowercase hyphen-separated file-name slug.

    NFC-normalizes and case-folds, collapses every maximal run of
    non-alphanumeric characters to a single ``-``, strips leading/trailing
    hyphens, then truncates. Returns "untitled" when nothing survives.
    """
    folded = unicodedata.normalize("NFC", text).casefold()
    out: list[str] = []
    in_gap = False
    for ch in folded:
        if ch.isalnum():
            if in_gap and out:
                out.append("-")
            in_gap = False
            out.append(ch)
        else:
            in_gap = True
    slug = "".join(out)[:max_len]
    return slug or "untitled"


def format_px(value: float) -> str:
    """Format a pixel measure the way stylesheets expect: no trailing zeros."""
    rounded = round(value)
    if abs(value - rounded) < 1e-9:
        return f"{int(rounded)}px"
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return f"{text}px"


def atomic_write_bytes(path: Path | str, data: bytes) -> None:
    """Write a file via a temp sibling + rename so readers never see partials."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
