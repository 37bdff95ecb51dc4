"""Instruction datasets in, rendered images plus a JSONL manifest out.

Only the instruction is rendered by default; the response travels through
the manifest as text (``render_responses=True`` renders it as well).

Manifest line schema (keys in this order)::

    {"id", "lang", "images": [relative png paths], "sha256": [hex per image],
     "width_px", "visual_token_count", "text_token_count",
     "response_token_count", "response",
     # only with render_responses:
     "response_images", "response_sha256", "response_width_px",
     "response_visual_token_count"}

``text_token_count`` is the subword count of the instruction alone, so it
pairs with ``visual_token_count``.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence
from urllib.parse import quote

from .atlas import GlyphAtlas
from .bpe import BpeVocab, count_tokens
from .errors import DuplicateId, IoError, ParseError
from .parallel import ordered_map
from .renderer import RenderConfig, encode_png, measure, render
from .vision import count_visual_tokens

MANIFEST_NAME = "manifest.jsonl"


@dataclass(frozen=True)
class InstructionRecord:
    id: str
    instruction: str
    response: str = ""
    lang: str = "en"


def parse_records(lines: Iterable[str]) -> list[InstructionRecord]:
    out: list[InstructionRecord] = []
    seen: dict[str, int] = {}
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", n) from None
        if not isinstance(obj, dict):
            raise ParseError("expected a JSON object", n)
        rid, ins = obj.get("id"), obj.get("instruction")
        if not isinstance(rid, str) or not rid:
            raise ParseError("'id' must be a non-empty string", n)
        if not isinstance(ins, str) or not ins:
            raise ParseError("'instruction' must be a non-empty string", n)
        resp = obj.get("response", "")
        lang = obj.get("lang", "en")
        if not isinstance(resp, str) or not isinstance(lang, str):
            raise ParseError("'response' and 'lang' must be strings", n)
        if rid in seen:
            raise DuplicateId(f"line {n}: id {rid!r} already used on line {seen[rid]}")
        seen[rid] = n
        out.append(InstructionRecord(rid, ins, resp, lang))
    return out


def ingest_jsonl(path: str | os.PathLike) -> list[InstructionRecord]:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_records(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def filter_long(records: Sequence[InstructionRecord], max_text_tokens: int,
                tokenizer: BpeVocab) -> tuple[list[InstructionRecord], int]:
    """Drop records whose instruction plus response exceed ``max_text_tokens``."""
    if max_text_tokens < 0:
        raise ValueError("max_text_tokens must be non-negative")
    kept = [r for r in records
            if count_tokens(r.instruction, tokenizer) + count_tokens(r.response, tokenizer)
            <= max_text_tokens]
    return kept, len(records) - len(kept)


def file_stem(record_id: str) -> str:
    # percent-encoding keeps ids with '/' or other oddities inside images/;
    # every stem gets a "_<k>.png" suffix, so "." and ".." stay ordinary names
    return quote(record_id, safe="-_.")


def atomic_write(path: Path, data: bytes) -> None:
    """Write ``data`` next to ``path`` and rename it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _render_side(text: str, stem: str, config: RenderConfig, atlas: GlyphAtlas, outdir: Path) -> dict:
    paths, digests = [], []
    for k, img in enumerate(render(text, config, atlas)):
        rel = f"images/{stem}_{k}.png"
        data = encode_png(img)
        atomic_write(outdir / rel, data)
        paths.append(rel)
        digests.append(hashlib.sha256(data).hexdigest())
    return {"images": paths, "sha256": digests, "width_px": measure(text, config, atlas),
            "visual_token_count": count_visual_tokens(text, config, atlas)}


def _emit_one(rec, config, atlas, tokenizer, outdir, render_responses) -> dict:
    stem = file_stem(rec.id)
    side = _render_side(rec.instruction, stem, config, atlas, outdir)
    row = {"id": rec.id, "lang": rec.lang, **side,
           "text_token_count": count_tokens(rec.instruction, tokenizer),
           "response_token_count": count_tokens(rec.response, tokenizer),
           "response": rec.response}
    if render_responses:
        r = _render_side(rec.response, stem + "_response", config, atlas, outdir)
        row.update({"response_" + k: v for k, v in r.items()})
    return row


def emit(records: Sequence[InstructionRecord], config: RenderConfig, atlas: GlyphAtlas,
         outdir: str | os.PathLike, tokenizer: BpeVocab, *, render_responses: bool = False,
         jobs: int = 1) -> list[dict]:
    """Render every record and write ``images/`` plus ``manifest.jsonl`` under ``outdir``.

    Rows come back in input order whatever ``jobs`` is, so the manifest is
    byte-identical across runs and worker counts.
    """
    outdir = Path(outdir)
    seen = set()
    for r in records:
        if r.id in seen:
            raise DuplicateId(f"id {r.id!r} appears twice")
        seen.add(r.id)
    try:
        (outdir / "images").mkdir(parents=True, exist_ok=True)
        shared = (config, atlas, tokenizer, outdir, render_responses)
        rows = ordered_map(_emit_one, records, jobs, shared)
        body = "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in rows)
        atomic_write(outdir / MANIFEST_NAME, body.encode("utf-8"))
    except OSError as exc:
        raise IoError(f"cannot write under {outdir}: {exc}") from exc
    return rows


def bundled_corpus(lang: str) -> list[str]:
    """The bundled 200-sentence fertility corpus for ``lang`` (de, cs, is, ru, zh)."""
    from importlib.resources import files

    res = files("vistok").joinpath(f"data/corpora/{lang}.txt")
    if not res.is_file():
        raise IoError(f"no bundled corpus for language {lang!r}")
    return [line for line in res.read_text("utf-8").splitlines() if line.strip()]


def bundled_qa() -> list[InstructionRecord]:
    """The bundled 500-record English QA fixture."""
    from importlib.resources import files

    return parse_records(files("vistok").joinpath("data/en_qa.jsonl").read_text("utf-8").splitlines())


def read_manifest(outdir: str | os.PathLike) -> list[dict]:
    path = Path(outdir) / MANIFEST_NAME
    try:
        with open(path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def verify_manifest(outdir: str | os.PathLike) -> list[str]:
    """Problems found when re-checking files and hashes; empty means consistent."""
    outdir = Path(outdir)
    problems = []
    for row in read_manifest(outdir):
        for rel, digest in zip(row["images"], row["sha256"]):
            p = outdir / rel
            if not p.is_file():
                problems.append(f"{row['id']}: missing {rel}")
            elif hashlib.sha256(p.read_bytes()).hexdigest() != digest:
                problems.append(f"{row['id']}: hash mismatch for {rel}")
    return problems
