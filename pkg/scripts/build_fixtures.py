"""Derive the bundled text fixtures from the hand-written sources.

Outputs (all under src/vistok/data/):

* corpora/zh.txt        Chinese sentences with the word spaces removed
* corpora/zh_dict.txt   one word per line, every word of the segmented corpus
* en_qa.jsonl           500 reading-comprehension style instruction records
* glyph_map.tsv         lookalike targets for all 52 Latin letters
* geometry_lines.json   English lines whose raw width is exactly 3570 / 3584 px

The last two depend on the glyph atlas, so run scripts/build_atlas.py first.

The QA records pair each question with its gold passage and two distractor
passages drawn with a fixed seed, so the file is reproducible byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "vistok" / "data"
SOURCES = Path(__file__).resolve().parent / "sources"

N_RECORDS = 500
N_DISTRACTORS = 2
SEED = 20240917


def build_zh() -> None:
    seg = (DATA / "corpora" / "zh_segmented.txt").read_text(encoding="utf-8").splitlines()
    seg = [line.strip() for line in seg if line.strip()]
    joined = ["".join(line.split()) for line in seg]
    (DATA / "corpora" / "zh.txt").write_text("\n".join(joined) + "\n", encoding="utf-8")
    words = sorted({w for line in seg for w in line.split()})
    (DATA / "corpora" / "zh_dict.txt").write_text("\n".join(words) + "\n", encoding="utf-8")
    print(f"zh: {len(joined)} sentences, {len(words)} dictionary words")


def build_en_qa() -> None:
    rows = []
    for line in (SOURCES / "en_passages.tsv").read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        passage, question, answer = line.split("\t")
        rows.append((passage, question, answer))
    rng = np.random.default_rng(SEED)
    out = []
    for i in range(N_RECORDS):
        gold = i % len(rows)
        others = [k for k in range(len(rows)) if k != gold]
        picks = list(rng.choice(others, size=N_DISTRACTORS, replace=False))
        order = [gold] + [int(k) for k in picks]
        rng.shuffle(order)
        passages = "\n".join(f"Passage {j + 1}: {rows[k][0]}" for j, k in enumerate(order))
        instruction = (
            "Read the passages below and answer the question.\n"
            f"{passages}\nQuestion: {rows[gold][1]}"
        )
        out.append({
            "id": f"qa-{i:04d}",
            "instruction": instruction,
            "response": rows[gold][2],
            "lang": "en",
        })
    with open(DATA / "en_qa.jsonl", "w", encoding="utf-8") as fh:
        for rec in out:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    print(f"en_qa: {len(out)} records from {len(rows)} passages")


# Letters pinned to a single target; everything else gets up to three
# precomposed diacritic variants that the atlas can draw.
PINNED = {"a": "â", "b": "ḃ", "c": "ĉ", "H": "Ĥ"}
NO_DECOMPOSITION = {"q": "ɋ", "Q": "Ɋ"}


def build_glyph_map() -> None:
    import string
    import unicodedata

    atlas = json.loads((DATA / "atlas_7px.json").read_text(encoding="utf-8"))["glyphs"]
    cps = sorted(int(k, 16) for k in atlas)
    lines = ["# source<TAB>comma-separated lookalike targets"]
    for letter in string.ascii_lowercase + string.ascii_uppercase:
        if letter in PINNED:
            targets = [PINNED[letter]]
        elif letter in NO_DECOMPOSITION:
            targets = [NO_DECOMPOSITION[letter]]
        else:
            targets = []
            for cp in cps:
                d = unicodedata.normalize("NFD", chr(cp))
                if cp > 0x7F and len(d) == 2 and d[0] == letter:
                    targets.append(chr(cp))
            targets = targets[:3]
        for t in targets:
            assert f"{ord(t):04X}" in atlas, (letter, t)
        lines.append(f"{letter}\t{','.join(targets)}")
    (DATA / "glyph_map.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"glyph_map: {len(lines) - 1} letters")


def build_geometry_lines() -> None:
    import sys

    sys.path.insert(0, str(ROOT / "src"))
    from vistok.atlas import load_atlas
    from vistok.renderer import RenderConfig, raw_advance

    atlas = load_atlas(DATA / "atlas_7px.json")
    cfg = RenderConfig()
    words = (SOURCES / "en_passages.tsv").read_text(encoding="utf-8").split()
    out = {}
    for target in (3570, 3584):
        text = ""
        for w in words:
            cand = (text + " " + w) if text else w
            if raw_advance(cand, cfg, atlas) > target - 8:
                break
            text = cand
        # top up one pixel at a time with characters of advance 2 and 1
        filler = {raw_advance(c, cfg, atlas): c for c in "i ."}
        while raw_advance(text, cfg, atlas) < target:
            gap = target - raw_advance(text, cfg, atlas)
            step = 2 if gap >= 2 and 2 in filler else min(filler)
            text += filler[step]
        assert raw_advance(text, cfg, atlas) == target
        out[str(target)] = text
    (DATA / "geometry_lines.json").write_text(
        json.dumps(out, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print("geometry_lines:", {k: len(v) for k, v in out.items()})


if __name__ == "__main__":
    build_zh()
    build_en_qa()
    if (DATA / "atlas_7px.json").exists():
        build_glyph_map()
        build_geometry_lines()
