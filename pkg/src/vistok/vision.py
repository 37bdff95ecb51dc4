"""Patch grids, 4-to-1 merging and a fixed toy patch embedder.

The embedder stands in for a pretrained vision encoder.  It is untrained and
fully deterministic: a hand-built descriptor of ink layout, lifted into ``D``
dimensions by a seeded matrix with orthonormal columns (an isometry, so
cosines between descriptors survive the lift unchanged).

Descriptor layout for a block of pixels (one patch, or a merged group laid
side by side)::

    [ 16  mean ink on a 4x4 grid              ]  unit-normalized
    [ 2k  row and column ink profiles (k = P/2) ]  unit-normalized
    [ 16  histogram of ink levels, 16 bins     ]  unit-normalized
    [  1  bias                                 ]

then the whole vector is L2-normalized.  Ink is the largest per-channel
distance from the background colour.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .atlas import GlyphAtlas
from .errors import DimensionMismatch
from .renderer import RenderConfig, fold_provenance, measure, render_strip

HIST_BINS = 16
POOL = 4
EMBED_SEED = 0x5EE70C


@dataclass
class PatchGrid:
    """Row-major patches of one image (or of several, concatenated).

    ``patches`` has shape ``(rows*cols, P, P, C)``.  ``strip_index`` gives,
    for each patch, its position in the original unfolded strip, or -1 for
    fold padding; ``None`` means the grid order already is reading order.
    """

    patches: np.ndarray
    rows: int
    cols: int
    P: int
    strip_index: np.ndarray | None = None
    n_images: int = 1

    def __len__(self) -> int:
        return int(self.patches.shape[0])

    def reassemble(self) -> np.ndarray:
        """Inverse of :func:`patchify` (a stack of images for multi-image grids)."""
        P, C = self.P, self.patches.shape[-1]
        g = self.patches.reshape(self.n_images, self.rows, self.cols, P, P, C)
        imgs = g.transpose(0, 1, 3, 2, 4, 5).reshape(self.n_images, self.rows * P, self.cols * P, C)
        return imgs[0] if self.n_images == 1 else imgs


def patchify(image: np.ndarray, P: int) -> PatchGrid:
    if image.ndim == 2:
        image = image[:, :, None]
    h, w, C = image.shape
    if h % P or w % P:
        raise DimensionMismatch(f"image {h}x{w} is not tiled by {P}x{P} patches")
    rows, cols = h // P, w // P
    patches = image.reshape(rows, P, cols, P, C).transpose(0, 2, 1, 3, 4).reshape(rows * cols, P, P, C)
    return PatchGrid(patches=patches, rows=rows, cols=cols, P=P)


def patchify_folded(images: Sequence[np.ndarray], config: RenderConfig, strip_width_px: int) -> PatchGrid:
    """Patchify folded images and attach strip provenance for reading order."""
    P = config.patch_px
    if not images:
        C = config.channels
        return PatchGrid(np.zeros((0, P, P, C), np.uint8), 0, 0, P, np.zeros(0, np.int64), 0)
    grids = [patchify(img, P) for img in images]
    prov = fold_provenance(strip_width_px, config, len(images)).reshape(-1)
    return PatchGrid(
        patches=np.concatenate([g.patches for g in grids]),
        rows=grids[0].rows, cols=grids[0].cols, P=P,
        strip_index=prov, n_images=len(images),
    )


# ----------------------------------------------------------------------------
# descriptor


def _edges(n: int, k: int) -> np.ndarray:
    return np.linspace(0, n, k + 1).round().astype(np.int64)


def _bin_means(x: np.ndarray, axis: int, k: int) -> np.ndarray:
    n = x.shape[axis]
    e = _edges(n, k)
    sums = np.add.reduceat(x, e[:-1], axis=axis)
    shape = [1] * x.ndim
    shape[axis] = k
    return sums / np.diff(e).reshape(shape)


def _unit_rows(v: np.ndarray) -> np.ndarray:
    n = np.sqrt((v * v).sum(axis=-1, keepdims=True))
    return np.divide(v, n, out=np.zeros_like(v), where=n > 0)


def ink_map(pixels: np.ndarray, background: Sequence[int] = (255, 255, 255)) -> np.ndarray:
    """Per-pixel ink level 0-255 (max channel distance from background)."""
    C = pixels.shape[-1]
    bg = np.asarray(background[:C], dtype=np.int16)
    return np.abs(pixels.astype(np.int16) - bg).max(axis=-1).astype(np.uint8)


def describe(ink: np.ndarray, profile_bins: int) -> np.ndarray:
    """Raw descriptors for a batch of ink blocks of shape ``(B, h, w)``."""
    x = ink.astype(np.float64) / 255.0
    B = x.shape[0]
    pooled = _bin_means(_bin_means(x, 1, POOL), 2, POOL).reshape(B, -1)
    row_prof = _bin_means(x.mean(axis=2), 1, profile_bins)
    col_prof = _bin_means(x.mean(axis=1), 1, profile_bins)
    levels = (ink >> 4).reshape(B, -1).astype(np.int64)
    hist = np.zeros((B, HIST_BINS))
    np.add.at(hist, (np.repeat(np.arange(B), levels.shape[1]), levels.ravel()), 1.0)
    parts = [
        _unit_rows(pooled),
        _unit_rows(np.concatenate([row_prof, col_prof], axis=1)),
        _unit_rows(hist),
        np.ones((B, 1)),
    ]
    return _unit_rows(np.concatenate(parts, axis=1))


def descriptor_length(P: int) -> int:
    return POOL * POOL + 2 * max(P // 2, 1) + HIST_BINS + 1


@lru_cache(maxsize=32)
def _lift(n_in: int, dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng([seed, n_in, dim])
    if dim >= n_in:
        q, _ = np.linalg.qr(rng.standard_normal((dim, n_in)))
        lift = q.T  # (n_in, dim) with orthonormal rows: isometric embedding
    else:
        q, _ = np.linalg.qr(rng.standard_normal((n_in, dim)))
        lift = q  # orthogonal projection onto a seeded subspace
    lift = np.ascontiguousarray(lift)
    lift.setflags(write=False)
    return lift


@dataclass(frozen=True)
class PatchEmbedder:
    """Deterministic stand-in for the vision encoder.

    ``variant="full"`` is the descriptor described in the module docstring.
    ``variant="glyph_bag"`` keeps only the ink-level histogram, pooled over
    the whole text, which makes it blind to character order.
    """

    dim: int = 64
    seed: int = EMBED_SEED
    P: int = 14
    background: tuple[int, int, int] = (255, 255, 255)
    variant: str = "full"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.variant not in ("full", "glyph_bag"):
            raise ValueError(f"unknown embedder variant {self.variant!r}")

    @property
    def name(self) -> str:
        return f"toy-patch-embedder/{self.variant}/D{self.dim}/seed{self.seed}"

    def _project(self, desc: np.ndarray) -> np.ndarray:
        out = desc @ _lift(desc.shape[1], self.dim, self.seed)
        return _unit_rows(out)

    def embed_blocks(self, blocks: np.ndarray) -> np.ndarray:
        """Embed a batch ``(B, h, w, C)`` of equally sized pixel blocks."""
        ink = ink_map(blocks, self.background)
        return self._project(describe(ink, max(self.P // 2, 1)))

    def embed_patch(self, patch: np.ndarray) -> np.ndarray:
        return self.embed_blocks(patch[None])[0]

    def glyph_bag(self, pixels: np.ndarray) -> np.ndarray:
        """Histogram-only vector over every pixel of ``pixels``."""
        ink = ink_map(pixels, self.background)
        hist = np.bincount((ink >> 4).ravel(), minlength=HIST_BINS).astype(np.float64)
        return self._project(_unit_rows(hist[None]))[0]


def embed_patch(patch: np.ndarray, embedder: PatchEmbedder | None = None) -> np.ndarray:
    return (embedder or PatchEmbedder(P=patch.shape[0])).embed_patch(patch)


@dataclass
class VisualTokenSequence:
    token_count: int
    features: np.ndarray
    provenance: list[tuple[int, ...]]
    group_size: int = 4
    patch_count: int = 0
    embedder: str = ""


def _group_features(patches: np.ndarray, groups: list[tuple[int, ...]], embedder: PatchEmbedder) -> np.ndarray:
    if not groups:
        return np.zeros((0, embedder.dim))
    feats = np.empty((len(groups), embedder.dim))
    by_size: dict[int, list[int]] = {}
    for i, g in enumerate(groups):
        by_size.setdefault(len(g), []).append(i)
    for size, idx in by_size.items():
        sel = np.array([groups[i] for i in idx])  # (n, size)
        blocks = patches[sel]  # (n, size, P, P, C)
        n, _, P, _, C = blocks.shape
        blocks = blocks.transpose(0, 2, 1, 3, 4).reshape(n, P, size * P, C)
        feats[idx] = embedder.embed_blocks(blocks)
    return feats


def _is_blank(patches: np.ndarray, group: tuple[int, ...], background) -> bool:
    C = patches.shape[-1]
    return bool(np.all(patches[list(group)] == np.asarray(background[:C], dtype=np.uint8)))


def merge(
    grid: PatchGrid,
    group_size: int = 4,
    reading_order: str = "strip_sequential",
    embedder: PatchEmbedder | None = None,
    drop_blank_tokens: bool = False,
) -> VisualTokenSequence:
    """Group patches into visual tokens.

    ``strip_sequential`` takes consecutive patches in reading order (restored
    from fold provenance when present; fold padding is skipped).
    ``spatial_2x2`` groups 2x2 neighbourhoods of each folded image instead.
    """
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    embedder = embedder or PatchEmbedder(P=grid.P)
    n = len(grid)
    if grid.strip_index is None:
        live = np.arange(n)
        order = live
    else:
        live = np.flatnonzero(grid.strip_index >= 0)
        order = live[np.argsort(grid.strip_index[live], kind="stable")]
    if reading_order == "strip_sequential":
        groups = [tuple(int(i) for i in order[k:k + group_size]) for k in range(0, len(order), group_size)]
    elif reading_order == "spatial_2x2":
        if group_size != 4:
            raise ValueError("spatial_2x2 merging needs group_size 4")
        alive = np.zeros(n, bool)
        alive[live] = True
        groups = []
        per = grid.rows * grid.cols
        for m in range(grid.n_images):
            for r in range(0, grid.rows, 2):
                for c in range(0, grid.cols, 2):
                    cand = [m * per + rr * grid.cols + cc
                            for rr in (r, r + 1) for cc in (c, c + 1)
                            if rr < grid.rows and cc < grid.cols]
                    g = tuple(i for i in cand if alive[i])
                    if g:
                        groups.append(g)
    else:
        raise ValueError(f"unknown reading order {reading_order!r}")
    if drop_blank_tokens:
        groups = [g for g in groups if not _is_blank(grid.patches, g, embedder.background)]
    feats = _group_features(grid.patches, groups, embedder)
    return VisualTokenSequence(
        token_count=len(groups), features=feats, provenance=groups,
        group_size=group_size, patch_count=int(len(live)), embedder=embedder.name,
    )


def count_patches(text: str, config: RenderConfig, atlas: GlyphAtlas) -> int:
    return measure(text, config, atlas) // config.patch_px


def count_visual_tokens(text: str, config: RenderConfig, atlas: GlyphAtlas, group_size: int = 4) -> int:
    """Visual token count from arithmetic alone: ceil(ceil(width / P) / 4)."""
    return -(-count_patches(text, config, atlas) // group_size)


def strip_grid(text: str, config: RenderConfig, atlas: GlyphAtlas) -> PatchGrid:
    return patchify(render_strip(text, config, atlas).strip, config.patch_px)


def embed_text_visual(
    text: str,
    config: RenderConfig,
    atlas: GlyphAtlas,
    embedder: PatchEmbedder | None = None,
    group_size: int = 4,
    drop_blank_tokens: bool = False,
) -> np.ndarray:
    """Token feature matrix ``(token_count, D)`` for ``text``.

    Works on the unfolded strip, whose patch order is already reading order;
    the result equals merging the folded images with provenance.
    """
    embedder = embedder or PatchEmbedder(P=config.patch_px, background=tuple(config.background))
    grid = strip_grid(text, config, atlas)
    return merge(grid, group_size, embedder=embedder, drop_blank_tokens=drop_blank_tokens).features


def mean_pooled(features: np.ndarray) -> np.ndarray:
    if features.shape[0] == 0:
        raise ValueError("cannot pool an empty token sequence")
    v = features.mean(axis=0)
    return v / np.linalg.norm(v)


def pooled_visual(text: str, config: RenderConfig, atlas: GlyphAtlas, embedder: PatchEmbedder) -> np.ndarray:
    """One vector per text: mean of token features, or the glyph bag."""
    if embedder.variant == "glyph_bag":
        return embedder.glyph_bag(render_strip(text, config, atlas).strip)
    return mean_pooled(embed_text_visual(text, config, atlas, embedder))
