"""Fertility and compression ratio."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..atlas import GlyphAtlas
from ..bpe import BpeVocab, count_tokens
from ..errors import EmptyCorpus
from ..renderer import RenderConfig
from ..segment import Dictionary, segment_words
from ..vision import count_patches, count_visual_tokens


@dataclass
class FertilityReport:
    lang: str
    mode: str
    mean: float
    word_count: int
    token_count: int
    corpus_id: str = ""
    aggregate: str = "ratio_of_totals"
    segmentation: str = "whitespace"

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _counter(mode: str, tokenizer, atlas):
    if mode == "text":
        if not isinstance(tokenizer, BpeVocab):
            raise TypeError("text mode needs a BpeVocab")
        return lambda s: count_tokens(s, tokenizer)
    if mode == "vision":
        if not isinstance(tokenizer, RenderConfig) or atlas is None:
            raise TypeError("vision mode needs a RenderConfig and an atlas")
        return lambda s: count_visual_tokens(s, tokenizer, atlas)
    raise ValueError(f"mode must be 'text' or 'vision', got {mode!r}")


def fertility(
    corpus: Sequence[str],
    lang: str,
    mode: str,
    tokenizer: BpeVocab | RenderConfig,
    *,
    atlas: GlyphAtlas | None = None,
    dictionary: Dictionary | None = None,
    corpus_id: str = "",
    aggregate: str = "ratio_of_totals",
) -> FertilityReport:
    """Tokens per word over a corpus.

    The default aggregate divides total tokens by total words;
    ``aggregate="mean_of_ratios"`` averages per-sample ratios instead
    (samples without words are skipped there).
    """
    count = _counter(mode, tokenizer, atlas)
    words = tokens = 0
    ratios = []
    method = "whitespace"
    for sample in corpus:
        seg = segment_words(sample, lang, dictionary)
        method = seg.method
        w, t = len(seg.words), count(sample)
        words += w
        tokens += t
        if w:
            ratios.append(t / w)
    if words == 0:
        raise EmptyCorpus("corpus contains no words")
    if aggregate == "ratio_of_totals":
        mean = tokens / words
    elif aggregate == "mean_of_ratios":
        mean = sum(ratios) / len(ratios)
    else:
        raise ValueError(f"unknown aggregate {aggregate!r}")
    return FertilityReport(lang, mode, mean, words, tokens, corpus_id, aggregate, method)


@dataclass
class CompressionReport:
    mean_text_tokens: float
    mean_visual_tokens: float
    delta: float
    n_samples: int
    skipped_empty: int = 0
    pairs: list[tuple[int, int]] = field(default_factory=list, repr=False)
    mean_patches: float = 0.0

    @property
    def tokens_per_patch(self) -> float:
        return self.mean_text_tokens / self.mean_patches

    def as_dict(self, with_pairs: bool = False) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "pairs"}
        d["tokens_per_patch"] = self.tokens_per_patch
        if with_pairs:
            d["pairs"] = [list(p) for p in self.pairs]
        return d


def compression_ratio(
    corpus: Sequence[str], tokenizer: BpeVocab, config: RenderConfig, atlas: GlyphAtlas
) -> CompressionReport:
    """Mean text tokens over mean visual tokens (empty samples are skipped)."""
    pairs, patches, skipped = [], 0, 0
    for sample in corpus:
        if not sample:
            skipped += 1
            continue
        n_patch = count_patches(sample, config, atlas)
        patches += n_patch
        pairs.append((count_tokens(sample, tokenizer), count_visual_tokens(sample, config, atlas)))
    if not pairs:
        raise EmptyCorpus("no non-empty samples")
    n = len(pairs)
    mt = sum(t for t, _ in pairs) / n
    mv = sum(v for _, v in pairs) / n
    return CompressionReport(mt, mv, mt / mv, n, skipped, pairs, patches / n)
