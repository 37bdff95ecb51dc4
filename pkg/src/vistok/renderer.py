"""Text to pixel strips, and strips to square images.

A strip is one line of text, ``H`` pixels tall and as wide as the text
(rounded up to whole patches).  Folding cuts the strip into segments of
``fold_side_px`` and stacks them top to bottom, so a 14 x 3584 strip becomes
exactly one 224 x 224 image.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from PIL import Image

from .atlas import GlyphAtlas
from .errors import ConfigError, GlyphOverflow

RGB = tuple[int, int, int]


@dataclass(frozen=True)
class RenderConfig:
    font_size_px: int = 7
    strip_height_px: int = 14
    strip_width_px: int = 3584
    channels: int = 3
    fold_side_px: int | None = 224
    patch_px: int = 14
    foreground: RGB = (0, 0, 0)
    background: RGB = (255, 255, 255)
    letter_spacing_px: int = 0
    # "dynamic" emits as many images as the text needs; an integer M pins the
    # count (blank padding or truncation with a warning).
    image_count_policy: str | int = "dynamic"

    def __post_init__(self):
        H, W, P = self.strip_height_px, self.strip_width_px, self.patch_px
        if min(H, W, P, self.font_size_px) < 1:
            raise ConfigError("sizes must be positive")
        if H != P:
            raise ConfigError(f"strip height {H} must equal patch size {P}")
        if W % P:
            raise ConfigError(f"strip width {W} is not a multiple of patch size {P}")
        if self.channels not in (1, 3):
            raise ConfigError("channels must be 1 or 3")
        if self.letter_spacing_px < 0:
            raise ConfigError("letter spacing must be non-negative")
        for name in ("foreground", "background"):
            rgb = getattr(self, name)
            if len(rgb) != 3 or any(not 0 <= int(v) <= 255 for v in rgb):
                raise ConfigError(f"{name} must be three 8-bit values")
        if self.fold_side_px is not None:
            S = self.fold_side_px
            if S % P:
                raise ConfigError(f"fold side {S} is not a multiple of patch size {P}")
            if H * W != S * S:
                raise ConfigError(f"H*W = {H * W} does not equal fold side squared {S * S}")
        pol = self.image_count_policy
        if not (pol == "dynamic" or (isinstance(pol, int) and not isinstance(pol, bool) and pol >= 1)):
            raise ConfigError(f"image_count_policy must be 'dynamic' or a positive int, got {pol!r}")

    @property
    def P(self) -> int:
        return self.patch_px

    @property
    def H(self) -> int:
        return self.strip_height_px

    @classmethod
    def square_384(cls, **kw) -> "RenderConfig":
        """The 384 x 384 single-image layout (H = 16, W = 9216, patch 16)."""
        base = dict(strip_height_px=16, strip_width_px=9216, fold_side_px=384,
                    patch_px=16, image_count_policy=1)
        base.update(kw)
        return cls(**base)


@dataclass
class RenderedText:
    strips: list[np.ndarray]
    char_extents: list[tuple[int, int]]
    total_width_px: int
    source_text: str
    raw_width_px: int = 0
    background: RGB = field(default=(255, 255, 255))

    @property
    def strip(self) -> np.ndarray:
        return self.strips[0]


def _advance_list(text: str, config: RenderConfig, atlas: GlyphAtlas) -> list[int]:
    sp = config.letter_spacing_px
    adv = atlas.advance
    if not sp:
        return [adv(ch) for ch in text]
    return [a + sp if a else 0 for a in map(adv, text)]


def raw_advance(text: str, config: RenderConfig, atlas: GlyphAtlas) -> int:
    """Sum of advances plus letter spacing, before padding."""
    return sum(_advance_list(text, config, atlas))


def measure(text: str, config: RenderConfig, atlas: GlyphAtlas) -> int:
    """Padded strip width in pixels (0 for empty text)."""
    raw = raw_advance(text, config, atlas)
    P = config.patch_px
    return -(-raw // P) * P


_TILE_CACHE: dict = {}


def _tile(atlas: GlyphAtlas, cp: int, config: RenderConfig) -> np.ndarray:
    key = (id(atlas), cp, config.foreground, config.background, config.channels)
    t = _TILE_CACHE.get(key)
    if t is None:
        cov = atlas.cell(cp).astype(np.int32)[:, :, None]
        fg = np.asarray(config.foreground, dtype=np.int32)
        bg = np.asarray(config.background, dtype=np.int32)
        if config.channels == 1:
            fg, bg = fg[:1], bg[:1]
        t = ((bg * (255 - cov) + fg * cov + 127) // 255).astype(np.uint8)
        t.setflags(write=False)
        if len(_TILE_CACHE) > 65536:
            _TILE_CACHE.clear()
        _TILE_CACHE[key] = t
    return t


def render_strip(text: str, config: RenderConfig, atlas: GlyphAtlas) -> RenderedText:
    H = config.strip_height_px
    if atlas.line_height_px > H:
        raise GlyphOverflow(f"atlas line height {atlas.line_height_px} exceeds strip height {H}")
    advances = _advance_list(text, config, atlas)
    raw = sum(advances)
    width = -(-raw // config.patch_px) * config.patch_px
    C = config.channels
    bg = np.asarray(config.background[:C], dtype=np.uint8)
    strip = np.empty((H, width, C), dtype=np.uint8)
    strip[:] = bg
    y0 = (H - atlas.line_height_px) // 2
    y1 = y0 + atlas.line_height_px
    extents = []
    x = 0
    for ch, adv in zip(text, advances):
        extents.append((x, x + adv))
        if adv:
            tile = _tile(atlas, atlas.resolve(ch), config)
            strip[y0:y1, x:x + tile.shape[1]] = tile
        x += adv
    return RenderedText(
        strips=[strip], char_extents=extents, total_width_px=width,
        source_text=text, raw_width_px=raw, background=tuple(config.background),
    )


def image_count(width_px: int, config: RenderConfig) -> int:
    S = config.fold_side_px
    per_image = S * S // config.strip_height_px
    return -(-width_px // per_image)


def fold(rt: RenderedText, config: RenderConfig) -> list[np.ndarray]:
    """Cut the strip into ``fold_side_px`` segments and stack them into squares."""
    if config.fold_side_px is None:
        raise ConfigError("folding is disabled in this config")
    S, H = config.fold_side_px, config.strip_height_px
    rows = S // H
    strip = rt.strips[0] if rt.strips else np.zeros((H, 0, config.channels), np.uint8)
    width = strip.shape[1]
    n = image_count(width, config)
    C = strip.shape[2]
    bg = np.asarray(config.background[:C], dtype=np.uint8)
    images = []
    for m in range(n):
        img = np.empty((S, S, C), dtype=np.uint8)
        img[:] = bg
        for r in range(rows):
            x0 = (m * rows + r) * S
            if x0 >= width:
                break
            seg = strip[:, x0:min(x0 + S, width)]
            img[r * H:(r + 1) * H, :seg.shape[1]] = seg
        images.append(img)
    pol = config.image_count_policy
    if isinstance(pol, int):
        if n > pol:
            warnings.warn(f"text needs {n} images, truncating to {pol}", stacklevel=2)
            images = images[:pol]
        while len(images) < pol:
            blank = np.empty((S, S, C), dtype=np.uint8)
            blank[:] = bg
            images.append(blank)
    return images


def render(text: str, config: RenderConfig, atlas: GlyphAtlas) -> list[np.ndarray]:
    return fold(render_strip(text, config, atlas), config)


def fold_provenance(width_px: int, config: RenderConfig, n_images: int) -> np.ndarray:
    """Strip patch index for every patch of the folded images, -1 for padding.

    Returned shape is ``(n_images, S/P, S/P)``; this is what lets the merger
    rebuild reading order after folding.
    """
    S, P, H = config.fold_side_px, config.patch_px, config.strip_height_px
    side = S // P
    rows = S // H
    m, r, c = np.meshgrid(np.arange(n_images), np.arange(side), np.arange(side), indexing="ij")
    seg = m * rows + r
    idx = seg * side + c
    n_strip = width_px // P
    return np.where(idx < n_strip, idx, -1)


def ink_pixel_count(img: np.ndarray, background: Sequence[int]) -> int:
    bg = np.asarray(background[: img.shape[-1]], dtype=np.uint8)
    return int(np.any(img != bg, axis=-1).sum())


def encode_png(img: np.ndarray) -> bytes:
    """8-bit PNG bytes for an (h, w, 1|3) uint8 image.

    Pillow writes no timestamp or text chunks unless asked, so the bytes are a
    pure function of the pixels.
    """
    if img.dtype != np.uint8 or img.ndim != 3 or img.shape[2] not in (1, 3):
        raise ValueError("expected an (h, w, 1|3) uint8 array")
    buf = io.BytesIO()
    Image.fromarray(img if img.shape[2] == 3 else img[:, :, 0]).save(
        buf, format="PNG", compress_level=9
    )
    return buf.getvalue()
