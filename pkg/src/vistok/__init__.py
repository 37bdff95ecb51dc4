"""Vision-centric text tokenization toolkit.

Text is rasterised into 14-pixel strips with a bitmap glyph atlas, folded
into square images, cut into patches and merged four at a time into visual
tokens.  The same texts can be run through a byte-level BPE tokenizer, so
the two schemes can be compared on token counts, FLOPs, robustness to
perturbations, compositionality and embedding alignment.
"""

__version__ = "0.1.0"

from .atlas import Glyph, GlyphAtlas, default_atlas, load_atlas, save_atlas
from .bpe import BpeVocab, SubwordSequence, default_tokenizer, detokenize, load_tokenizer, tokenize
from .errors import VistokError
from .perturb import PerturbationSpec, measured_rate, perturb
from .renderer import RenderConfig, RenderedText, fold, measure, render, render_strip
from .segment import WordSegmentation, segment_words
from .vision import (
    PatchEmbedder,
    PatchGrid,
    VisualTokenSequence,
    count_visual_tokens,
    embed_patch,
    embed_text_visual,
    merge,
    patchify,
)

__all__ = [
    "BpeVocab", "Glyph", "GlyphAtlas", "PatchEmbedder", "PatchGrid", "PerturbationSpec",
    "RenderConfig", "RenderedText", "SubwordSequence", "VisualTokenSequence", "VistokError",
    "WordSegmentation", "__version__", "count_visual_tokens", "default_atlas", "default_tokenizer",
    "detokenize", "embed_patch", "embed_text_visual", "fold", "load_atlas", "load_tokenizer",
    "measure", "measured_rate", "merge", "patchify", "perturb", "render", "render_strip",
    "save_atlas", "segment_words", "tokenize",
]
