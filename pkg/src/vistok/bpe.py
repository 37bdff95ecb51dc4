"""Byte-level BPE.

Tokenizer file schema (UTF-8 JSON)::

    {
      "version": 1,                          # optional
      "pretokenizer": "gpt2_regex_like",     # or "whitespace_runs" (default)
      "specials": ["<|endoftext|>"],         # optional, must be in vocab
      "vocab": {"!": 0, "\"": 1, ...},       # piece -> id
      "merges": [["Ġ", "t"], ["h", "e"], ...]  # rank = list position
    }

Pieces are written in the usual printable byte alphabet (byte 0x20 is "Ġ",
0x0A is "Ċ", and so on), so every byte has a one-character symbol.  Merges
may also be given as ``"left right"`` strings, the form found in
``merges.txt`` files; a vocab.json + merges.txt pair converts by loading both
and writing the two keys into one object.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import regex

from .errors import IoError, MergeConsistencyError, SchemaError

PRETOKENIZER_PATTERNS = {
    # a run of whitespace sticks to the word that follows it, so " cat" keeps
    # its leading-space marker; trailing whitespace forms its own chunk
    "whitespace_runs": r"\s*\S+|\s+",
    "gpt2_regex_like": (
        r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""
    ),
}
DEFAULT_PRETOKENIZER = "whitespace_runs"


@lru_cache(maxsize=None)
def bytes_to_unicode() -> dict[int, str]:
    """The standard reversible byte -> printable character table."""
    keep = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("¡"), ord("¬") + 1))
        + list(range(ord("®"), ord("ÿ") + 1))
    )
    cs = keep[:]
    n = 0
    for b in range(256):
        if b not in keep:
            keep.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(keep, map(chr, cs)))


@lru_cache(maxsize=None)
def unicode_to_bytes() -> dict[str, int]:
    return {v: k for k, v in bytes_to_unicode().items()}


def byte_alphabet() -> list[str]:
    table = bytes_to_unicode()
    return [table[b] for b in range(256)]


@lru_cache(maxsize=None)
def _compiled(rule: str):
    return regex.compile(PRETOKENIZER_PATTERNS[rule])


def pretokenize(text: str, rule: str = DEFAULT_PRETOKENIZER) -> list[str]:
    return _compiled(rule).findall(text)


@dataclass(frozen=True)
class BpeVocab:
    token_to_id: dict[str, int]
    merges: tuple[tuple[str, str], ...]
    specials: tuple[str, ...] = ()
    pretokenizer: str = DEFAULT_PRETOKENIZER
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "id_to_token", {i: t for t, i in self.token_to_id.items()})
        object.__setattr__(self, "ranks", {pair: r for r, pair in enumerate(self.merges)})

    @property
    def byte_fallback_alphabet(self) -> list[str]:
        return byte_alphabet()

    def __len__(self) -> int:
        return len(self.token_to_id)

    def without_last_merge(self) -> "BpeVocab":
        return BpeVocab(dict(self.token_to_id), self.merges[:-1], self.specials, self.pretokenizer)


@dataclass
class SubwordSequence:
    ids: list[int]
    pieces: list[str]
    byte_offsets: list[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.ids)


def _validate(vocab: dict, merges: list, specials: list, pretokenizer: str) -> BpeVocab:
    if not isinstance(vocab, dict) or not vocab:
        raise SchemaError("'vocab' must be a non-empty object")
    for k, v in vocab.items():
        if not isinstance(k, str) or not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise SchemaError(f"vocab entry {k!r}: {v!r} is not string -> non-negative int")
    if len(set(vocab.values())) != len(vocab):
        raise SchemaError("vocab ids are not unique")
    missing = [s for s in byte_alphabet() if s not in vocab]
    if missing:
        raise SchemaError(f"{len(missing)} byte symbols have no id (e.g. {missing[0]!r})")
    if not isinstance(merges, list):
        raise SchemaError("'merges' must be a list")
    pairs: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for rank, m in enumerate(merges):
        if isinstance(m, str):
            parts = m.split(" ")
        elif isinstance(m, list):
            parts = m
        else:
            raise SchemaError(f"merge {rank}: expected [left, right] or 'left right'")
        if len(parts) != 2 or not all(isinstance(p, str) and p for p in parts):
            raise SchemaError(f"merge {rank}: expected exactly two non-empty pieces, got {m!r}")
        left, right = parts
        for piece in (left, right, left + right):
            if piece not in vocab:
                raise MergeConsistencyError(f"merge {rank} ({left!r}, {right!r}): {piece!r} not in vocab")
        if (left, right) in seen:
            raise MergeConsistencyError(f"merge ({left!r}, {right!r}) appears at more than one rank")
        seen.add((left, right))
        pairs.append((left, right))
    if not isinstance(specials, list) or not all(isinstance(s, str) for s in specials):
        raise SchemaError("'specials' must be a list of strings")
    for s in specials:
        if s not in vocab:
            raise SchemaError(f"special token {s!r} has no id")
    if pretokenizer not in PRETOKENIZER_PATTERNS:
        raise SchemaError(f"unknown pretokenizer {pretokenizer!r}")
    return BpeVocab(dict(vocab), tuple(pairs), tuple(specials), pretokenizer)


def vocab_from_dict(data) -> BpeVocab:
    if not isinstance(data, dict):
        raise SchemaError("tokenizer file must hold a JSON object")
    for key in ("vocab", "merges"):
        if key not in data:
            raise SchemaError(f"missing required key {key!r}")
    return _validate(
        data["vocab"], data["merges"], data.get("specials", []),
        data.get("pretokenizer", DEFAULT_PRETOKENIZER),
    )


def vocab_to_dict(vocab: BpeVocab) -> dict:
    return {
        "version": 1,
        "pretokenizer": vocab.pretokenizer,
        "specials": list(vocab.specials),
        "vocab": dict(sorted(vocab.token_to_id.items(), key=lambda kv: kv[1])),
        "merges": [list(p) for p in vocab.merges],
    }


def load_tokenizer(path: str | os.PathLike) -> BpeVocab:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read tokenizer {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    return vocab_from_dict(data)


def save_tokenizer(vocab: BpeVocab, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(vocab_to_dict(vocab), fh, ensure_ascii=False, separators=(",", ":"))
        fh.write("\n")


@lru_cache(maxsize=None)
def default_tokenizer() -> BpeVocab:
    """The bundled fixture tokenizer (see scripts/train_fixture_tokenizer.py)."""
    ref = resources.files("vistok") / "data" / "tokenizer_fixture.json"
    with resources.as_file(ref) as p:
        return load_tokenizer(p)


def _bpe(symbols: list[str], ranks: dict) -> list[str]:
    word = symbols
    while len(word) > 1:
        best_rank, best = None, None
        for pair in zip(word, word[1:]):
            r = ranks.get(pair)
            if r is not None and (best_rank is None or r < best_rank):
                best_rank, best = r, pair
        if best is None:
            break
        left, right = best
        merged, i, n = [], 0, len(word)
        while i < n:
            if i < n - 1 and word[i] == left and word[i + 1] == right:
                merged.append(left + right)
                i += 2
            else:
                merged.append(word[i])
                i += 1
        word = merged
    return word


_CACHE_LIMIT = 200_000


def _encode_chunk(chunk: str, vocab: BpeVocab) -> list[str]:
    hit = vocab._cache.get(chunk)
    if hit is None:
        table = bytes_to_unicode()
        hit = _bpe([table[b] for b in chunk.encode("utf-8")], vocab.ranks)
        if len(vocab._cache) >= _CACHE_LIMIT:
            vocab._cache.clear()
        vocab._cache[chunk] = hit
    return hit


def tokenize(text: str, vocab: BpeVocab) -> SubwordSequence:
    pieces: list[str] = []
    for chunk in pretokenize(text, vocab.pretokenizer):
        pieces.extend(_encode_chunk(chunk, vocab))
    ids = [vocab.token_to_id[p] for p in pieces]
    offsets, pos = [], 0
    for p in pieces:
        offsets.append((pos, pos + len(p)))  # one symbol per byte
        pos += len(p)
    return SubwordSequence(ids=ids, pieces=pieces, byte_offsets=offsets)


def count_tokens(text: str, vocab: BpeVocab) -> int:
    return sum(len(_encode_chunk(c, vocab)) for c in pretokenize(text, vocab.pretokenizer))


def piece_bytes(piece: str) -> bytes:
    inv = unicode_to_bytes()
    return bytes(inv[c] for c in piece)


def detokenize(seq: SubwordSequence | list[int], vocab: BpeVocab) -> str:
    ids = seq.ids if isinstance(seq, SubwordSequence) else seq
    inv = unicode_to_bytes()
    out = bytearray()
    specials = set(vocab.specials)
    for i in ids:
        piece = vocab.id_to_token[i]
        if piece in specials:
            out += piece.encode("utf-8")
        else:
            out += bytes(inv[c] for c in piece)
    return out.decode("utf-8", errors="strict")
