"""Train the bundled byte-level BPE fixture tokenizer.

Training uses the Hugging Face ``tokenizers`` trainer (a build-time tool
only; the package encodes with its own BPE).  Its byte-level pretokenizer
with regex splitting is the same rule as the package's ``gpt2_regex_like``
pretokenizer, so the exported merges behave identically.

Training text:

* ``en``: the license texts shipped with the OS and the prose help topics
  bundled with the Python standard library;
* ``en_qa``: the passage/question/answer source rows behind the English QA
  fixture;
* ``de``, ``cs``, ``is``, ``ru``, ``zh``: the bundled fixture corpora.

The fixtures are part of the training text on purpose.  A production
tokenizer with a vocabulary of ~150k has seen text like the fixtures many
times over; a desk-scale vocabulary only reaches a comparable coverage of
the fixture words if it sees them.  The consequence (measured fertilities
are in-sample) is recorded in the decisions notes.

Each source is repeated by a weight factor.  The weights and vocab size are
the only knobs; they are recorded in the output file's ``training`` block.

Usage: python3 scripts/train_fixture_tokenizer.py [--vocab-size N]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from tokenizers import Tokenizer, models, pre_tokenizers, trainers

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "vistok" / "data"
LICENSES = Path("/usr/share/common-licenses")
LICENSE_FILES = ["GPL-3", "GPL-2", "LGPL-3", "LGPL-2.1", "Apache-2.0", "Artistic", "MPL-2.0",
                 "GFDL-1.3", "CC0-1.0", "BSD"]

DEFAULT_WEIGHTS = {"en": 4, "en_qa": 2, "de": 2, "cs": 2, "is": 2, "ru": 2, "zh": 1}
DEFAULT_VOCAB = 12000
SPECIALS = ["<|endoftext|>"]


def english_lines() -> list[str]:
    lines = []
    for name in LICENSE_FILES:
        p = LICENSES / name
        if p.exists():
            text = p.read_text(encoding="utf-8", errors="replace")
            # reflow hard-wrapped paragraphs into running text
            for para in text.split("\n\n"):
                para = " ".join(para.split())
                if para:
                    lines.append(para)
    from pydoc_data.topics import topics

    for key in sorted(topics):
        for para in topics[key].split("\n\n"):
            para = " ".join(para.split())
            if para and not para.startswith((">>>", "...")):
                lines.append(para)
    return lines


def corpus_lines(lang: str) -> list[str]:
    if lang == "en":
        return english_lines()
    if lang == "en_qa":
        src = Path(__file__).resolve().parent / "sources" / "en_passages.tsv"
        rows = [ln.split("\t") for ln in src.read_text(encoding="utf-8").splitlines() if ln.strip()]
        return [" ".join(r) for r in rows]
    path = DATA / "corpora" / f"{lang}.txt"
    return [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]


def train(vocab_size: int, weights: dict[str, int]) -> dict:
    tok = Tokenizer(models.BPE())
    tok.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False, use_regex=True)
    trainer = trainers.BpeTrainer(
        vocab_size=vocab_size,
        min_frequency=2,
        special_tokens=SPECIALS,
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
        show_progress=False,
    )

    def stream():
        for lang, w in weights.items():
            lines = corpus_lines(lang)
            for _ in range(w):
                yield from lines

    tok.train_from_iterator(stream(), trainer=trainer)
    model = json.loads(tok.to_str())["model"]
    merges = [m.split(" ") if isinstance(m, str) else list(m) for m in model["merges"]]
    return {
        "version": 1,
        "pretokenizer": "gpt2_regex_like",
        "specials": SPECIALS,
        "training": {"vocab_size": vocab_size, "weights": weights,
                     "english_source": "OS license texts + pydoc_data topics"},
        "vocab": dict(sorted(model["vocab"].items(), key=lambda kv: kv[1])),
        "merges": merges,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description="train the fixture BPE tokenizer")
    ap.add_argument("--vocab-size", type=int, default=DEFAULT_VOCAB, help="target vocabulary size")
    ap.add_argument("--weights", default=json.dumps(DEFAULT_WEIGHTS),
                    help="JSON object of per-language repetition factors")
    ap.add_argument("--out", default=str(DATA / "tokenizer_fixture.json"), help="output path")
    args = ap.parse_args()
    data = train(args.vocab_size, json.loads(args.weights))
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(data, fh, ensure_ascii=False, separators=(",", ":"))
        fh.write("\n")
    print(f"wrote {len(data['vocab'])} tokens, {len(data['merges'])} merges to {args.out}")


if __name__ == "__main__":
    main()
