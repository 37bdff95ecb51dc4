"""Word segmentation for fertility counts.

Whitespace splitting for space-delimited languages; greedy forward
longest-match against a word list for Chinese.  The greedy matcher is a
deliberately small stand-in for a full statistical segmenter: fertility only
needs a word count.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import IoError, MissingDictionary

DICTIONARY_LANGS = frozenset({"zh"})


@dataclass(frozen=True)
class Dictionary:
    words: frozenset[str]
    max_len: int

    @classmethod
    def from_words(cls, words) -> "Dictionary":
        ws = frozenset(w for w in (x.strip() for x in words) if w)
        return cls(ws, max((len(w) for w in ws), default=1))

    def __contains__(self, w: str) -> bool:
        return w in self.words


@dataclass
class WordSegmentation:
    words: list[str]
    method: str

    @property
    def separator(self) -> str:
        return " " if self.method == "whitespace" else ""

    def joined(self) -> str:
        return self.separator.join(self.words)


def load_dictionary(path: str | os.PathLike) -> Dictionary:
    try:
        with open(path, encoding="utf-8") as fh:
            return Dictionary.from_words(fh)
    except OSError as exc:
        raise IoError(f"cannot read dictionary {path}: {exc}") from exc


@lru_cache(maxsize=None)
def bundled_zh_dictionary() -> Dictionary:
    ref = resources.files("vistok") / "data" / "corpora" / "zh_dict.txt"
    with resources.as_file(ref) as p:
        return load_dictionary(p)


def _base_lang(lang: str) -> str:
    return lang.lower().replace("_", "-").split("-")[0]


def greedy_longest_match(chunk: str, dictionary: Dictionary) -> list[str]:
    out, i, n = [], 0, len(chunk)
    while i < n:
        for j in range(min(n, i + dictionary.max_len), i, -1):
            if j - i == 1 or chunk[i:j] in dictionary:
                out.append(chunk[i:j])
                i = j
                break
    return out


def segment_words(text: str, lang: str, dictionary: Dictionary | None = None) -> WordSegmentation:
    if _base_lang(lang) in DICTIONARY_LANGS:
        if dictionary is None:
            raise MissingDictionary(f"segmentation for {lang!r} needs a dictionary")
        words = []
        for chunk in text.split():
            words.extend(greedy_longest_match(chunk, dictionary))
        return WordSegmentation(words, "greedy_dictionary")
    return WordSegmentation(text.split(), "whitespace")
