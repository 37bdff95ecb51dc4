"""Seeded text corruptions.

Five families: within-word n-gram shuffling, character edits, visual
(lookalike glyph) attacks, word-level noise and typoglycemia.

Randomness is drawn per unit from ``default_rng([seed, kind_key, index])``
where ``index`` is the position of the word (or letter, for visual attacks)
in the text.  A unit's outcome therefore never depends on how many draws
other units consumed, which keeps results stable when a corpus is split
across workers.

Each unit makes a selection draw first, then (if selected) the draws that
pick the corruption.  Selected units are always changed: when a random
rearrangement could reproduce the original, the generators sample among the
arrangements that differ from it.  Units that cannot be changed at all (a
three-letter word under typoglycemia, a word shorter than two n-grams) are
ineligible and never counted.  This makes the realized corruption rate an
unbiased estimate of ``p`` over eligible units.
"""

from __future__ import annotations

import itertools
import json
import os
import string
import warnings
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

import numpy as np
import regex

from .errors import IoError, ParseError, VistokError
from .segment import Dictionary, segment_words

KINDS = ("ngram_shuffle", "char_edit", "visual_attack", "word_noise", "typoglycemia")
KIND_KEY = {k: i + 1 for i, k in enumerate(KINDS)}
STANDARD_N = frozenset({2, 3, 5})
EDIT_POOL = string.ascii_letters + " " + string.punctuation
# at or below this many movable pieces, sample uniformly from an explicit
# enumeration of the distinct non-identity orders; above it, reject-sample
ENUMERATION_LIMIT = 6

_LETTER_RUN = regex.compile(r"[\p{L}\p{M}]+")
_AFFIX = regex.compile(r"^([^\p{L}\p{N}]*)(.*?)([^\p{L}\p{N}]*)$", regex.S)


@dataclass(frozen=True)
class PerturbationSpec:
    kind: str
    p: float
    n: int | None = None
    seed: int = 0
    aux: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise VistokError(f"unknown perturbation kind {self.kind!r}")
        if not 0.0 <= float(self.p) <= 1.0:
            raise VistokError(f"p must lie in [0, 1], got {self.p}")
        if not 0 <= int(self.seed) < 2**64:
            raise VistokError("seed must be an unsigned 64-bit integer")
        if self.kind == "ngram_shuffle":
            if self.n is None or int(self.n) < 1:
                raise VistokError("ngram_shuffle needs n >= 1")
            if int(self.n) not in STANDARD_N:
                warnings.warn(f"n={self.n} is outside the standard sizes {sorted(STANDARD_N)}", stacklevel=3)

    def rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng([int(self.seed), KIND_KEY[self.kind], int(index)])


# ----------------------------------------------------------------------------
# resources


@dataclass(frozen=True)
class GlyphSubstitutionMap:
    entries: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        for src, targets in self.entries.items():
            if len(src) != 1 or src not in string.ascii_letters:
                raise VistokError(f"glyph map source {src!r} is not a single Latin letter")
            if not targets:
                raise VistokError(f"glyph map entry {src!r} has no targets")
            if src in targets:
                raise VistokError(f"glyph map entry {src!r} maps to itself")

    @property
    def complete(self) -> bool:
        return set(string.ascii_letters) <= set(self.entries)


@dataclass(frozen=True)
class SynonymTable:
    entries: Mapping[str, Mapping[str, tuple[str, ...]]]

    def __post_init__(self):
        for lang, table in self.entries.items():
            for word, subs in table.items():
                if word in subs:
                    raise VistokError(f"synonym table [{lang}] maps {word!r} to itself")

    def lookup(self, word: str, lang: str) -> tuple[str, ...]:
        table = self.entries.get(lang, {})
        return tuple(table.get(word) or table.get(word.lower()) or ())


def load_glyph_map(path: str | os.PathLike) -> GlyphSubstitutionMap:
    entries: dict[str, tuple[str, ...]] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                if "\t" not in line:
                    raise ParseError("expected source<TAB>targets", lineno)
                src, targets = line.split("\t", 1)
                entries[src] = tuple(t for t in targets.split(",") if t)
    except OSError as exc:
        raise IoError(f"cannot read glyph map {path}: {exc}") from exc
    return GlyphSubstitutionMap(entries)


def load_synonyms(path: str | os.PathLike) -> SynonymTable:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read synonym table {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})", exc.lineno) from exc
    return SynonymTable({lang: {w: tuple(s) for w, s in t.items()} for lang, t in data.items()})


def _data_path(name: str):
    return resources.as_file(resources.files("vistok") / "data" / name)


@lru_cache(maxsize=None)
def default_glyph_map() -> GlyphSubstitutionMap:
    with _data_path("glyph_map.tsv") as p:
        return load_glyph_map(p)


@lru_cache(maxsize=None)
def default_synonyms() -> SynonymTable:
    with _data_path("synonyms.json") as p:
        return load_synonyms(p)


# ----------------------------------------------------------------------------
# helpers


def _rearrange(pieces: list[str], rng: np.random.Generator) -> list[str] | None:
    """A uniformly drawn order of ``pieces`` whose concatenation differs.

    Returns None when every order reproduces the original string.
    """
    original = "".join(pieces)
    k = len(pieces)
    if k < 2 or len(set(pieces)) == 1:
        return None
    if k <= ENUMERATION_LIMIT:
        options = [perm for perm in itertools.permutations(range(k))
                   if "".join(pieces[i] for i in perm) != original]
        if not options:
            return None
        perm = options[int(rng.integers(len(options)))]
        return [pieces[i] for i in perm]
    for _ in range(256):
        perm = rng.permutation(k)
        out = [pieces[i] for i in perm]
        if "".join(out) != original:
            return out
    return None  # pragma: no cover - needs astronomically bad luck


def ngram_blocks(word: str, n: int) -> list[str]:
    return [word[i:i + n] for i in range(0, len(word), n)]


@dataclass
class PerturbResult:
    text: str
    changed: int
    eligible: int


def _map_letter_runs(text: str, spec: PerturbationSpec, fn) -> PerturbResult:
    out, pos, changed, eligible = [], 0, 0, 0
    for idx, m in enumerate(_LETTER_RUN.finditer(text)):
        out.append(text[pos:m.start()])
        new, was_eligible = fn(m.group(), spec.rng(idx))
        eligible += was_eligible
        changed += new != m.group()
        out.append(new)
        pos = m.end()
    out.append(text[pos:])
    return PerturbResult("".join(out), changed, eligible)


# ----------------------------------------------------------------------------
# families


def ngram_shuffle_result(text: str, spec: PerturbationSpec) -> PerturbResult:
    n = int(spec.n)

    def one(word, rng):
        blocks = ngram_blocks(word, n)
        eligible = len(blocks) >= 2 and len(set(blocks)) > 1
        if not eligible or rng.random() >= spec.p:
            return word, eligible
        new = _rearrange(blocks, rng)
        return ("".join(new) if new else word), eligible

    return _map_letter_runs(text, spec, one)


def typoglycemia_result(text: str, spec: PerturbationSpec) -> PerturbResult:
    def one(word, rng):
        interior = list(word[1:-1])
        eligible = len(word) >= 4 and len(set(interior)) > 1
        if not eligible or rng.random() >= spec.p:
            return word, eligible
        new = _rearrange(interior, rng)
        return (word[0] + "".join(new) + word[-1] if new else word), eligible

    return _map_letter_runs(text, spec, one)


def visual_attack_result(text: str, spec: PerturbationSpec, glyph_map: GlyphSubstitutionMap) -> PerturbResult:
    out, changed, eligible, idx = [], 0, 0, 0
    for ch in text:
        targets = glyph_map.entries.get(ch)
        if targets is None:
            out.append(ch)
            continue
        rng = spec.rng(idx)
        idx += 1
        eligible += 1
        if rng.random() < spec.p:
            out.append(targets[int(rng.integers(len(targets)))])
            changed += 1
        else:
            out.append(ch)
    return PerturbResult("".join(out), changed, eligible)


_SPLIT_WS = regex.compile(r"(\s+)")


def char_edit_result(text: str, spec: PerturbationSpec) -> PerturbResult:
    parts = _SPLIT_WS.split(text)
    changed = eligible = 0
    for k in range(0, len(parts), 2):  # even slots are words, odd are whitespace
        word = parts[k]
        if not word:
            continue
        idx = k // 2
        rng = spec.rng(idx)
        eligible += 1
        if rng.random() >= spec.p:
            continue
        op = int(rng.integers(3))
        if op == 0:  # insert
            at = int(rng.integers(len(word) + 1))
            new = word[:at] + EDIT_POOL[int(rng.integers(len(EDIT_POOL)))] + word[at:]
        elif op == 1:  # delete
            at = int(rng.integers(len(word)))
            new = word[:at] + word[at + 1:]
        else:  # replace with a different character
            at = int(rng.integers(len(word)))
            pool = EDIT_POOL.replace(word[at], "") if word[at] in EDIT_POOL else EDIT_POOL
            new = word[:at] + pool[int(rng.integers(len(pool)))] + word[at + 1:]
        parts[k] = new
        changed += 1
    return PerturbResult("".join(parts), changed, eligible)


def _match_case(template: str, word: str) -> str:
    if template[:1].isupper() and not template.isupper():
        return word[:1].upper() + word[1:]
    if len(template) > 1 and template.isupper():
        return word.upper()
    return word


def word_noise_result(
    text: str,
    spec: PerturbationSpec,
    table: SynonymTable,
    lang: str = "en",
    dictionary: Dictionary | None = None,
) -> PerturbResult:
    """Synonym swap, deletion, or swap with the following word.

    Actions are drawn for every word first.  Synonyms and deletions act on
    the word itself; a swap then exchanges the word's slot with the next
    surviving slot.  Every drawn action is counted as a change; a swap can
    only be invisible when both neighbours are the same string.
    """
    seg = segment_words(text, lang, dictionary)
    words = seg.words
    n = len(words)
    tokens: list[str | None] = list(words)
    swaps = []
    changed = 0
    for i, w in enumerate(words):
        rng = spec.rng(i)
        if rng.random() >= spec.p:
            continue
        pre, core, post = _AFFIX.match(w).groups()
        subs = table.lookup(core, lang) if core else ()
        actions = (["synonym"] if subs else []) + ["delete"] + (["swap"] if i < n - 1 else [])
        action = actions[int(rng.integers(len(actions)))]
        changed += 1
        if action == "synonym":
            tokens[i] = pre + _match_case(core, subs[int(rng.integers(len(subs)))]) + post
        elif action == "delete":
            tokens[i] = None
        else:
            swaps.append(i)
    slots = list(range(n))
    for i in swaps:
        here = slots.index(i) if i in slots else None
        if here is None:
            continue
        nxt = next((j for j in range(here + 1, n) if tokens[slots[j]] is not None), None)
        if nxt is not None:
            slots[here], slots[nxt] = slots[nxt], slots[here]
    out = [tokens[s] for s in slots if tokens[s] is not None]
    return PerturbResult(seg.separator.join(out), changed, n)


# ----------------------------------------------------------------------------
# public entry points


def ngram_shuffle(text: str, spec: PerturbationSpec) -> str:
    return ngram_shuffle_result(text, spec).text


def typoglycemia(text: str, spec: PerturbationSpec) -> str:
    return typoglycemia_result(text, spec).text


def visual_attack(text: str, spec: PerturbationSpec, glyph_map: GlyphSubstitutionMap | None = None) -> str:
    return visual_attack_result(text, spec, glyph_map or default_glyph_map()).text


def char_edit(text: str, spec: PerturbationSpec) -> str:
    return char_edit_result(text, spec).text


def word_noise(text: str, spec: PerturbationSpec, table: SynonymTable | None = None,
               lang: str = "en", dictionary: Dictionary | None = None) -> str:
    return word_noise_result(text, spec, table or default_synonyms(), lang, dictionary).text


def perturb_result(text: str, spec: PerturbationSpec, *, glyph_map=None, synonyms=None,
                   lang: str = "en", dictionary=None) -> PerturbResult:
    if spec.kind == "ngram_shuffle":
        return ngram_shuffle_result(text, spec)
    if spec.kind == "typoglycemia":
        return typoglycemia_result(text, spec)
    if spec.kind == "visual_attack":
        return visual_attack_result(text, spec, glyph_map or default_glyph_map())
    if spec.kind == "char_edit":
        return char_edit_result(text, spec)
    return word_noise_result(text, spec, synonyms or default_synonyms(), lang, dictionary)


def perturb(text: str, spec: PerturbationSpec, **resources) -> str:
    return perturb_result(text, spec, **resources).text


def record_spec(spec: PerturbationSpec, record_index: int) -> PerturbationSpec:
    """Spec for the ``record_index``-th record of a corpus (distinct stream)."""
    seed = int(np.random.SeedSequence([int(spec.seed), int(record_index)]).generate_state(1, np.uint64)[0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return PerturbationSpec(spec.kind, spec.p, spec.n, seed, spec.aux)


def corruption_counts(corpus: Iterable[str], spec: PerturbationSpec, **resources) -> tuple[int, int]:
    changed = eligible = 0
    for i, text in enumerate(corpus):
        r = perturb_result(text, record_spec(spec, i), **resources)
        changed += r.changed
        eligible += r.eligible
    return changed, eligible


def measured_rate(corpus: Iterable[str], spec: PerturbationSpec, **resources) -> float:
    """Fraction of eligible units (words; letters for visual attacks) changed."""
    changed, eligible = corruption_counts(corpus, spec, **resources)
    if eligible == 0:
        raise VistokError("corpus has no units eligible for this perturbation")
    return changed / eligible
