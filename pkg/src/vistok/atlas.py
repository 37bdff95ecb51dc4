"""Bitmap glyph atlas.

An atlas maps codepoints to pre-rasterized coverage bitmaps with integer
advances, so rendering never depends on a font engine at run time.

On-disk format (UTF-8 JSON)::

    {
      "format": "vistok-atlas",
      "version": 1,
      "name": "dejavu-sans-7px",
      "font_size_px": 7,
      "line_height_px": 14,
      "baseline_px": 10,
      "fallback": "FFFD",
      "glyphs": {
        "0061": {"advance": 4, "bearing": 0, "top": 6,
                 "rows": ["4cffdf27", "00003489", ...]},
        ...
      }
    }

Glyph keys are upper-case hex codepoints.  ``rows`` holds the cropped ink
box top to bottom, two hex digits (one coverage byte, 0-255) per pixel.
``top`` is the row of the first bitmap row inside the line box and
``bearing`` the column offset of the bitmap inside the advance cell.  A glyph
with no ink has an empty ``rows`` list.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import AtlasError, IoError

FORMAT_TAG = "vistok-atlas"
FORMAT_VERSION = 1
SPACE = 0x20


@dataclass(frozen=True)
class Glyph:
    bitmap: np.ndarray  # (rows, cols) uint8 coverage, read-only
    advance: int
    bearing: int = 0
    top: int = 0

    @property
    def height(self) -> int:
        return int(self.bitmap.shape[0])

    @property
    def width(self) -> int:
        return int(self.bitmap.shape[1])


class GlyphAtlas:
    """Read-only codepoint to :class:`Glyph` table.

    ``lookup`` is total: unmapped codepoints resolve to the fallback glyph.
    Whitespace handling is left to the renderer.
    """

    def __init__(
        self,
        glyphs: Mapping[int, Glyph],
        line_height_px: int,
        fallback: int,
        name: str = "atlas",
        baseline_px: int | None = None,
        font_size_px: int | None = None,
    ):
        self._glyphs = MappingProxyType(dict(glyphs))
        self.line_height_px = int(line_height_px)
        self.fallback = int(fallback)
        self.name = name
        self.baseline_px = baseline_px
        self.font_size_px = font_size_px
        self._resolved: dict[str, tuple[int, int]] = {}
        self._validate()

    def _validate(self) -> None:
        if self.line_height_px < 1:
            raise AtlasError("line_height_px must be positive")
        if self.fallback not in self._glyphs:
            raise AtlasError(f"fallback glyph U+{self.fallback:04X} missing from atlas")
        if self._glyphs[self.fallback].advance < 1:
            raise AtlasError("fallback glyph must have a positive advance")
        for cp, g in self._glyphs.items():
            if g.top < 0 or g.top + g.height > self.line_height_px:
                raise AtlasError(f"U+{cp:04X}: bitmap exceeds the line box")
            if g.advance < 0 or g.bearing < 0 or g.bearing + g.width > g.advance:
                raise AtlasError(f"U+{cp:04X}: ink outside the advance cell")
            if g.height and g.advance < 1:
                raise AtlasError(f"U+{cp:04X}: printable glyph with zero advance")

    @property
    def glyphs(self) -> Mapping[int, Glyph]:
        return self._glyphs

    def __contains__(self, cp: int) -> bool:
        return cp in self._glyphs

    def __len__(self) -> int:
        return len(self._glyphs)

    def lookup(self, cp: int) -> Glyph:
        g = self._glyphs.get(cp)
        return g if g is not None else self._glyphs[self.fallback]

    def _resolve_entry(self, ch: str) -> tuple[int, int]:
        hit = self._resolved.get(ch)
        if hit is None:
            cp = ord(ch)
            if ch.isspace() and SPACE in self._glyphs:
                cp = SPACE
            elif cp not in self._glyphs:
                cp = self.fallback
            hit = self._resolved[ch] = (cp, self._glyphs[cp].advance)
        return hit

    def resolve(self, ch: str) -> int:
        """Codepoint actually drawn for ``ch`` (whitespace folds to space)."""
        return self._resolve_entry(ch)[0]

    def advance(self, ch: str) -> int:
        return self._resolve_entry(ch)[1]

    def cell(self, cp: int) -> np.ndarray:
        """Full ``line_height x advance`` coverage cell for a mapped codepoint."""
        return _cell(self, cp)


def _cell(atlas: GlyphAtlas, cp: int) -> np.ndarray:
    g = atlas.lookup(cp)
    out = np.zeros((atlas.line_height_px, g.advance), dtype=np.uint8)
    out[g.top:g.top + g.height, g.bearing:g.bearing + g.width] = g.bitmap
    return out


def atlas_from_dict(data: dict) -> GlyphAtlas:
    try:
        if data.get("format") != FORMAT_TAG:
            raise AtlasError(f"not a {FORMAT_TAG} file")
        if int(data.get("version", -1)) != FORMAT_VERSION:
            raise AtlasError(f"unsupported atlas version {data.get('version')!r}")
        glyphs = {}
        for key, entry in data["glyphs"].items():
            rows = entry.get("rows", [])
            if rows:
                widths = {len(r) for r in rows}
                if len(widths) != 1 or widths.pop() % 2:
                    raise AtlasError(f"glyph {key}: ragged or odd-length hex rows")
                bitmap = np.array([list(bytes.fromhex(r)) for r in rows], dtype=np.uint8)
            else:
                bitmap = np.zeros((0, 0), dtype=np.uint8)
            bitmap.setflags(write=False)
            glyphs[int(key, 16)] = Glyph(
                bitmap=bitmap,
                advance=int(entry["advance"]),
                bearing=int(entry.get("bearing", 0)),
                top=int(entry.get("top", 0)),
            )
        return GlyphAtlas(
            glyphs,
            line_height_px=int(data["line_height_px"]),
            fallback=int(str(data["fallback"]), 16),
            name=str(data.get("name", "atlas")),
            baseline_px=data.get("baseline_px"),
            font_size_px=data.get("font_size_px"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise AtlasError(f"malformed atlas: {exc}") from exc


def atlas_to_dict(atlas: GlyphAtlas) -> dict:
    glyphs = {}
    for cp in sorted(atlas.glyphs):
        g = atlas.glyphs[cp]
        glyphs[f"{cp:04X}"] = {
            "advance": g.advance,
            "bearing": g.bearing,
            "top": g.top,
            "rows": [bytes(r.tolist()).hex() for r in g.bitmap],
        }
    return {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "name": atlas.name,
        "font_size_px": atlas.font_size_px,
        "line_height_px": atlas.line_height_px,
        "baseline_px": atlas.baseline_px,
        "fallback": f"{atlas.fallback:04X}",
        "glyphs": glyphs,
    }


def load_atlas(path: str | os.PathLike) -> GlyphAtlas:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read atlas {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise AtlasError(f"{path}: invalid JSON ({exc})") from exc
    return atlas_from_dict(data)


def save_atlas(atlas: GlyphAtlas, path: str | os.PathLike) -> None:
    try:
        Path(path).write_text(
            json.dumps(atlas_to_dict(atlas), separators=(",", ":")) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoError(f"cannot write atlas {path}: {exc}") from exc


@lru_cache(maxsize=None)
def default_atlas() -> GlyphAtlas:
    """The bundled 7 px atlas (DejaVu Sans metrics, see scripts/build_atlas.py)."""
    ref = resources.files("vistok") / "data" / "atlas_7px.json"
    with resources.as_file(ref) as p:
        return load_atlas(p)
