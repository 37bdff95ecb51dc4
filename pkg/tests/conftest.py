from __future__ import annotations

import json
from importlib.resources import files

import numpy as np
import pytest

from vistok.atlas import Glyph, GlyphAtlas, default_atlas
from vistok.bpe import byte_alphabet, default_tokenizer, vocab_from_dict
from vistok.renderer import RenderConfig


def make_atlas(chars: str = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ.,", advance: int = 4,
               line_height: int = 14, zero_width: str = "\u200d") -> GlyphAtlas:
    """Small synthetic atlas: every glyph gets a distinct bit pattern of ink."""
    glyphs = {}
    for ch in chars:
        cp = ord(ch)
        h, w = line_height - 4, max(advance - 1, 1)
        bits = np.array([(cp >> (k % 8)) & 1 for k in range(h * w)], dtype=np.uint8).reshape(h, w)
        bits[0, 0] = 1  # never blank
        glyphs[cp] = Glyph(bits * 255, advance, 0, 2)
    glyphs[0x20] = Glyph(np.zeros((0, 0), np.uint8), advance)
    for ch in zero_width:
        glyphs[ord(ch)] = Glyph(np.zeros((0, 0), np.uint8), 0)
    glyphs[0xFFFD] = Glyph(np.full((line_height - 4, advance - 1), 128, np.uint8), advance, 0, 2)
    return GlyphAtlas(glyphs, line_height, 0xFFFD, name=f"toy-{advance}px")


@pytest.fixture(scope="session")
def atlas():
    return default_atlas()


@pytest.fixture(scope="session")
def vocab():
    return default_tokenizer()


@pytest.fixture
def config():
    return RenderConfig()


@pytest.fixture(scope="session")
def geometry_lines():
    return json.loads(files("vistok").joinpath("data/geometry_lines.json").read_text("utf-8"))


def toy_vocab(extra: list[str], merges: list[list[str]], pretokenizer: str = "whitespace_runs"):
    """Byte alphabet plus ``extra`` pieces and the given merges."""
    pieces = byte_alphabet() + [p for p in extra if p not in byte_alphabet()]
    return vocab_from_dict({"vocab": {p: i for i, p in enumerate(pieces)}, "merges": merges,
                            "pretokenizer": pretokenizer})


# One line per acceptance criterion, filled by test_acceptance.py and printed
# after the run so the verdicts show up even without ``-s``.
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
