"""Bake the bundled 7 px glyph atlas from DejaVu Sans.

The runtime renderer never touches a font file.  This script rasterizes each
covered codepoint once with Pillow/FreeType, snaps the advance to whole pixels
and stores coverage rows as hex in ``src/vistok/data/atlas_7px.json``.

Coverage set: ASCII, Latin-1, Latin Extended A/B and Additional, Greek,
Cyrillic, Georgian, general punctuation, and the CJK characters used by the
bundled Chinese fixture.  DejaVu has no CJK glyphs, so those are synthesized
as seeded stroke patterns inside a full-width 7 px cell.  They are distinct
per codepoint, which is all the token-count and embedding code needs.

Usage: python3 scripts/build_atlas.py [--font PATH]
"""

from __future__ import annotations

import argparse
import json
import math
import unicodedata
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "vistok" / "data"
DEFAULT_FONT = "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf"

FONT_SIZE = 7
LINE_HEIGHT = 14
BASELINE = 10
PAD = 4  # left margin of the scratch canvas, absorbs negative side bearings

FONT_RANGES = [
    (0x20, 0x7F),
    (0xA0, 0x100),
    (0x100, 0x250),
    (0x370, 0x400),
    (0x400, 0x500),
    (0x10A0, 0x1100),
    (0x1E00, 0x1F00),
    (0x2000, 0x2070),
    (0x20AC, 0x20AD),
    (0x2122, 0x2123),
    (0x25A1, 0x25A2),
]
ZERO_WIDTH = {0x200B, 0x200C, 0x200D, 0x2060, 0xFEFF}
CJK_PUNCT = "，。、：；？！“”‘’《》「」（）…\u2014"
FALLBACK = 0xFFFD


def _cjk_chars() -> list[str]:
    text = (DATA / "corpora" / "zh.txt").read_text(encoding="utf-8")
    text += (DATA / "corpora" / "zh_dict.txt").read_text(encoding="utf-8")
    text += "世界知识中文字"
    chars = {c for c in text if unicodedata.category(c) == "Lo" and ord(c) >= 0x3400}
    return sorted(chars)


def _raster_font_glyph(font, ch: str) -> tuple[int, np.ndarray]:
    raw = font.getlength(ch)
    advance = int(math.floor(raw + 0.5))
    canvas = Image.new("L", (PAD + 16, LINE_HEIGHT), 0)
    ImageDraw.Draw(canvas).text((PAD, BASELINE), ch, font=font, fill=255, anchor="ls")
    cell = np.asarray(canvas, dtype=np.uint8)[:, PAD:PAD + max(advance, 0)]
    return advance, cell


def _cjk_cell(cp: int) -> np.ndarray:
    # 7 wide, ink rows 3..10: a seeded 6x7 stroke lattice, so every ideograph
    # gets its own shape but a similar overall ink density.
    rng = np.random.default_rng(cp)
    cell = np.zeros((LINE_HEIGHT, 7), dtype=np.uint8)
    lattice = rng.random((7, 6)) < 0.45
    lattice[rng.integers(0, 7), :] = True  # one horizontal stroke
    lattice[:, rng.integers(0, 6)] = True  # one vertical stroke
    cell[3:10, 0:6] = np.where(lattice, 255, 0)
    return cell


def _cjk_punct_cell(ch: str) -> np.ndarray:
    cell = np.zeros((LINE_HEIGHT, 7), dtype=np.uint8)
    rng = np.random.default_rng(ord(ch))
    if ch in "，、。":
        cell[8:10, 1:3] = 255
        if ch == "，":
            cell[10, 1] = 255
    elif ch in "：；":
        cell[5, 3] = cell[8, 3] = 255
        if ch == "；":
            cell[9, 2] = 255
    else:
        rows = rng.integers(3, 10, size=3)
        cols = rng.integers(1, 6, size=3)
        cell[rows, cols] = 255
        cell[4:9, 3] = 255 if ch in "？！（）《》「」" else 0
    return cell


def _tofu(advance: int = 5) -> np.ndarray:
    cell = np.zeros((LINE_HEIGHT, advance), dtype=np.uint8)
    cell[3, 0:advance - 1] = 255
    cell[10, 0:advance - 1] = 255
    cell[3:11, 0] = 255
    cell[3:11, advance - 2] = 255
    return cell


def _encode(cell: np.ndarray, advance: int) -> dict:
    ink_rows = np.flatnonzero(cell.any(axis=1))
    ink_cols = np.flatnonzero(cell.any(axis=0))
    if ink_rows.size == 0:
        return {"advance": advance, "bearing": 0, "top": 0, "rows": []}
    top, bottom = int(ink_rows[0]), int(ink_rows[-1]) + 1
    left, right = int(ink_cols[0]), int(ink_cols[-1]) + 1
    crop = cell[top:bottom, left:right]
    return {
        "advance": advance,
        "bearing": left,
        "top": top,
        "rows": [bytes(row.tolist()).hex() for row in crop],
    }


def build(font_path: str) -> dict:
    font = ImageFont.truetype(font_path, FONT_SIZE)
    glyphs: dict[str, dict] = {}
    for lo, hi in FONT_RANGES:
        for cp in range(lo, hi):
            ch = chr(cp)
            if cp in ZERO_WIDTH:
                glyphs[f"{cp:04X}"] = {"advance": 0, "bearing": 0, "top": 0, "rows": []}
                continue
            if unicodedata.category(ch) in ("Cc", "Cn", "Co", "Cs", "Mn", "Cf"):
                continue
            if not _has_glyph(font_path, cp):
                continue
            advance, cell = _raster_font_glyph(font, ch)
            if ch.isspace():
                cell = np.zeros((LINE_HEIGHT, advance), dtype=np.uint8)
            advance = max(advance, 1)
            glyphs[f"{cp:04X}"] = _encode(cell, advance)
    for ch in _cjk_chars():
        glyphs[f"{ord(ch):04X}"] = _encode(_cjk_cell(ord(ch)), 7)
    for ch in CJK_PUNCT:
        if ch in "“”‘’…\u2014":
            continue  # DejaVu covers these through general punctuation
        glyphs[f"{ord(ch):04X}"] = _encode(_cjk_punct_cell(ch), 7)
    glyphs[f"{FALLBACK:04X}"] = _encode(_tofu(), 5)
    return {
        "format": "vistok-atlas",
        "version": 1,
        "name": "dejavu-sans-7px",
        "font_size_px": FONT_SIZE,
        "line_height_px": LINE_HEIGHT,
        "baseline_px": BASELINE,
        "fallback": f"{FALLBACK:04X}",
        "glyphs": dict(sorted(glyphs.items(), key=lambda kv: int(kv[0], 16))),
    }


_CMAP_CACHE: dict[str, set[int]] = {}


def _has_glyph(font_path: str, cp: int) -> bool:
    if font_path not in _CMAP_CACHE:
        from fontTools.ttLib import TTFont

        _CMAP_CACHE[font_path] = set(TTFont(font_path).getBestCmap())
    return cp in _CMAP_CACHE[font_path]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--font", default=DEFAULT_FONT, help="TrueType font to rasterize")
    ap.add_argument("--out", default=str(DATA / "atlas_7px.json"), help="output atlas path")
    args = ap.parse_args()
    atlas = build(args.font)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(atlas, fh, indent=0, separators=(",", ":"))
        fh.write("\n")
    print(f"wrote {len(atlas['glyphs'])} glyphs to {args.out}")


if __name__ == "__main__":
    main()
