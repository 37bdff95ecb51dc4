"""Compositionality probe: does a word's embedding resemble its parts?

Two string embedders share one interface (``embed(text) -> unit vector``):

* :class:`TextEmbedder` mean-pools rows of a fixed, seeded table indexed by
  subword id;
* :class:`VisualEmbedder` mean-pools the toy visual-token features of the
  rendered text.

Neither is trained, so probe numbers describe these embedders only.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from ..atlas import GlyphAtlas, default_atlas
from ..bpe import BpeVocab, default_tokenizer, tokenize
from ..errors import IoError, LexiconError, ZeroVector
from ..renderer import RenderConfig, measure
from ..vision import PatchEmbedder, pooled_visual

TEXT_EMBED_SEED = 0x7E47


def cosine_angle(a, b) -> tuple[float, float]:
    """Cosine similarity and the angle between ``a`` and ``b`` in degrees."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"vector lengths differ: {a.size} vs {b.size}")
    aa, bb = float(a @ a), float(b @ b)
    if aa == 0.0 or bb == 0.0:
        raise ZeroVector("cosine is undefined for a zero vector")
    cos = float(a @ b) / math.sqrt(aa * bb)
    cos = min(1.0, max(-1.0, cos))
    return cos, math.degrees(math.acos(cos))


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ZeroVector("cannot normalise a zero vector")
    return v / n


@dataclass(frozen=True)
class TextEmbedder:
    vocab: BpeVocab
    dim: int = 64
    seed: int = TEXT_EMBED_SEED

    @cached_property
    def table(self) -> np.ndarray:
        rng = np.random.default_rng([self.seed, self.dim])
        t = rng.standard_normal((len(self.vocab), self.dim))
        t /= np.linalg.norm(t, axis=1, keepdims=True)
        t.setflags(write=False)
        return t

    @property
    def name(self) -> str:
        return f"seeded-subword-table/D{self.dim}/seed{self.seed}"

    def token_rows(self, text: str) -> np.ndarray:
        return self.table[tokenize(text, self.vocab).ids]

    def embed(self, text: str) -> np.ndarray:
        rows = self.token_rows(text)
        if rows.shape[0] == 0:
            raise ZeroVector("empty text has no subword tokens")
        return _unit(rows.mean(axis=0))


@dataclass(frozen=True)
class VisualEmbedder:
    config: RenderConfig = field(default_factory=RenderConfig)
    atlas: GlyphAtlas = field(default_factory=default_atlas)
    patch_embedder: PatchEmbedder | None = None

    @cached_property
    def _pe(self) -> PatchEmbedder:
        return self.patch_embedder or PatchEmbedder(P=self.config.patch_px,
                                                   background=tuple(self.config.background))

    @property
    def name(self) -> str:
        return self._pe.name

    def embed(self, text: str) -> np.ndarray:
        if measure(text, self.config, self.atlas) == 0:
            raise ZeroVector("text renders to an empty strip")
        return pooled_visual(text, self.config, self.atlas, self._pe)


def compose_sum(parts: Sequence[np.ndarray]) -> np.ndarray:
    if len(parts) == 0:
        raise LexiconError("nothing to compose")
    return _unit(np.sum(np.asarray(parts, dtype=np.float64), axis=0))


def compose_space(parts: Sequence[str], embedder, joiner: str = " ") -> np.ndarray:
    return embedder.embed(joiner.join(parts))


@dataclass(frozen=True)
class ProbeEntry:
    word: str
    parts: tuple[str, ...]
    cos_sum: float
    angle_sum: float
    cos_space: float
    angle_space: float

    def as_dict(self) -> dict:
        return {"word": self.word, "parts": list(self.parts), "cos_sum": self.cos_sum,
                "angle_sum": self.angle_sum, "cos_space": self.cos_space,
                "angle_space": self.angle_space}


@dataclass(frozen=True)
class ProbeReport:
    mode: str
    embedder: str
    entries: tuple[ProbeEntry, ...]

    def _mean(self, key: str) -> float:
        return float(np.mean([getattr(e, key) for e in self.entries]))

    @property
    def means(self) -> dict:
        return {k: self._mean(k) for k in ("cos_sum", "angle_sum", "cos_space", "angle_space")}

    def as_dict(self) -> dict:
        return {"mode": self.mode, "embedder": self.embedder, "n": len(self.entries),
                "means": self.means, "entries": [e.as_dict() for e in self.entries]}


def _embedder_for(mode: str, *, tokenizer=None, config=None, atlas=None, patch_embedder=None, dim=64):
    if mode == "text":
        return TextEmbedder(tokenizer or default_tokenizer(), dim=dim)
    if mode == "vision":
        return VisualEmbedder(config or RenderConfig(), atlas or default_atlas(), patch_embedder)
    raise ValueError(f"mode must be 'text' or 'vision', got {mode!r}")


def compositionality_probe(
    lexicon: Sequence[tuple[str, Sequence[str]]],
    mode: str = "vision",
    *,
    embedder=None,
    joiner: str = " ",
    tokenizer: BpeVocab | None = None,
    config: RenderConfig | None = None,
    atlas: GlyphAtlas | None = None,
) -> ProbeReport:
    """Compare each full word against the sum of its parts and the spaced form."""
    if not lexicon:
        raise LexiconError("empty lexicon")
    for word, parts in lexicon:
        if len(parts) < 2:
            raise LexiconError(f"entry {word!r} needs at least two parts, got {list(parts)}")
    emb = embedder or _embedder_for(mode, tokenizer=tokenizer, config=config, atlas=atlas)
    entries = []
    for word, parts in lexicon:
        full = emb.embed(word)
        cs, as_ = cosine_angle(full, compose_sum([emb.embed(p) for p in parts]))
        cp, ap = cosine_angle(full, compose_space(parts, emb, joiner))
        entries.append(ProbeEntry(word, tuple(parts), cs, as_, cp, ap))
    return ProbeReport(mode, emb.name, tuple(entries))


def load_lexicon(path: str | os.PathLike | None = None) -> list[tuple[str, tuple[str, ...]]]:
    """Read ``word<TAB>part part ...`` lines; ``#`` starts a comment."""
    if path is None:
        from importlib.resources import files

        text = files("vistok").joinpath("data/probe_lexicon.tsv").read_text("utf-8")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise IoError(f"cannot read lexicon {path}: {exc}") from exc
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise LexiconError(f"line {n}: expected word<TAB>parts")
        parts = tuple(cols[1].split())
        if len(parts) < 2:
            raise LexiconError(f"line {n}: {cols[0]!r} has fewer than two parts")
        out.append((cols[0].strip(), parts))
    return out
