"""``vistok`` command line.

Every subcommand is deterministic given its flags.  Output format follows the
extension of ``--out`` (``.json``, ``.jsonl`` or ``.csv``); without ``--out``
rows go to standard output as JSON lines.  Diagnostics go to standard error.

Exit codes: 0 success, 1 validation or usage error, 2 filesystem error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .analysis import (
    QWEN25_VL_3B,
    ModelShape,
    compositionality_probe,
    compression_ratio,
    estimate_flops,
    fertility,
    flops_reduction,
    layerwise_procrustes,
    load_lexicon,
    table2_scenario,
)
from .analysis.embedding import TextEmbedder, VisualEmbedder
from .analysis.similarity import similarity_under_perturbation
from .atlas import GlyphAtlas, default_atlas, load_atlas
from .bpe import BpeVocab, default_tokenizer, load_tokenizer, tokenize
from .corpus import atomic_write, bundled_corpus, bundled_qa, emit, file_stem, filter_long, ingest_jsonl
from .errors import IoError, ParseError, VistokError
from .matrix_io import read_matrix, write_matrix
from .parallel import ordered_map
from .perturb import (
    KINDS,
    PerturbationSpec,
    load_glyph_map,
    load_synonyms,
    perturb,
    record_spec,
)
from .renderer import RenderConfig, encode_png, measure, render, render_strip
from .segment import bundled_zh_dictionary, load_dictionary
from .vision import PatchEmbedder, count_patches, count_visual_tokens, merge, strip_grid

DEFAULT_SEED = 0
ATLAS_ENV = "VISTOK_ATLAS"
FERTILITY_LANGS = ("de", "cs", "is", "ru", "zh")
# published tokens-per-word values used as the comparison column of reports
REFERENCE_FET = {
    ("de", "vision"): 0.42, ("cs", "vision"): 0.38, ("is", "vision"): 0.37, ("ru", "vision"): 0.49,
    ("de", "text"): 1.89, ("cs", "text"): 2.81, ("is", "text"): 2.71, ("ru", "text"): 2.53,
}
PRESETS = {"qwen2.5-vl-3b": QWEN25_VL_3B}


class UsageError(VistokError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# resources and I/O


def _atlas(path: str | None) -> GlyphAtlas:
    path = path or os.environ.get(ATLAS_ENV) or None
    return load_atlas(path) if path else default_atlas()


def _tokenizer(path: str | None) -> BpeVocab:
    return load_tokenizer(path) if path else default_tokenizer()


def _config(layout: str) -> RenderConfig:
    return RenderConfig.square_384() if layout == "384" else RenderConfig()


def _read_lines(path: str) -> list[str]:
    try:
        if path == "-":
            return sys.stdin.read().splitlines()
        with open(path, encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def read_texts(path: str) -> list[tuple[str, str]]:
    """``(text_id, text)`` pairs from JSONL or from a plain one-text-per-line file.

    JSONL rows may use ``text_id``/``text`` or the instruction-record fields
    ``id``/``instruction``.
    """
    lines = _read_lines(path)
    if not path.endswith(".jsonl"):
        return [(f"line-{i}", s) for i, s in enumerate(lines, 1) if s.strip()]
    out, seen = [], set()
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", n) from None
        if not isinstance(obj, dict):
            raise ParseError("expected a JSON object", n)
        tid = obj.get("text_id", obj.get("id"))
        text = obj.get("text", obj.get("instruction"))
        if not isinstance(tid, str) or not isinstance(text, str):
            raise ParseError("rows need string 'text_id' and 'text' fields", n)
        if tid in seen:
            raise ParseError(f"duplicate text_id {tid!r}", n)
        seen.add(tid)
        out.append((tid, text))
    return out


def _cell(v):
    if isinstance(v, (list, dict, tuple)):
        return json.dumps(v, ensure_ascii=False)
    return v


def format_rows(rows: list[dict] | dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, ensure_ascii=False, indent=2) + "\n"
    if isinstance(rows, dict):
        rows = [rows]
    if fmt == "jsonl":
        return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)
    if fmt == "csv":
        buf = io.StringIO()
        fields: list[str] = []
        for r in rows:
            fields.extend(k for k in r if k not in fields)
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(v) for k, v in r.items()})
        return buf.getvalue()
    raise UsageError(f"unsupported output format {fmt!r}")


def output_format(path: str | None) -> str:
    if path is None or path == "-":
        return "jsonl"
    ext = Path(path).suffix.lower().lstrip(".")
    if ext not in ("json", "jsonl", "csv"):
        raise UsageError(f"--out must end in .json, .jsonl or .csv, got {path!r}")
    return ext


def write_output(path: str | None, rows) -> None:
    text = format_rows(rows, output_format(path))
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        atomic_write(Path(path), text.encode("utf-8"))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _write_png(path: Path, img: np.ndarray) -> str:
    data = encode_png(img)
    try:
        atomic_write(path, data)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------------------
# subcommands


def cmd_render(args) -> int:
    atlas, config = _atlas(args.atlas), _config(args.layout)
    items = [("text", args.text)] if args.text is not None else read_texts(args.input)
    outdir = Path(args.out_dir)
    rows = []
    for tid, text in items:
        stem = file_stem(tid)
        images, digests = [], []
        for k, img in enumerate(render(text, config, atlas)):
            name = f"{stem}_{k}.png"
            digests.append(_write_png(outdir / name, img))
            images.append(name)
        row = {"text_id": tid, "width_px": measure(text, config, atlas), "images": images,
               "sha256": digests}
        if args.strip:
            strip = render_strip(text, config, atlas).strip
            if strip.shape[1]:
                row["strip"] = f"{stem}_strip.png"
                _write_png(outdir / row["strip"], strip)
        rows.append(row)
    write_output(args.out, rows)
    return 0


def _tok_vision(item, config, atlas, drop_blank):
    tid, text = item
    if drop_blank:
        seq = merge(strip_grid(text, config, atlas), drop_blank_tokens=True,
                    embedder=PatchEmbedder(P=config.patch_px, background=tuple(config.background)))
        n_tok = seq.token_count
    else:
        n_tok = count_visual_tokens(text, config, atlas)
    return {"text_id": tid, "patch_count": count_patches(text, config, atlas),
            "visual_token_count": n_tok, "width_px": measure(text, config, atlas)}


def _tok_text(item, vocab, with_ids):
    tid, text = item
    seq = tokenize(text, vocab)
    row = {"text_id": tid, "token_count": len(seq)}
    if with_ids:
        row["ids"] = list(seq.ids)
    return row


def cmd_tokenize(args) -> int:
    items = [("text", args.text)] if args.text is not None else read_texts(args.input)
    if args.mode == "vision":
        rows = ordered_map(_tok_vision, items, args.jobs,
                           (_config(args.layout), _atlas(args.atlas), args.drop_blank_tokens))
    else:
        rows = ordered_map(_tok_text, items, args.jobs, (_tokenizer(args.tokenizer), args.ids))
    write_output(args.out, rows)
    return 0


def cmd_fertility(args) -> int:
    langs = args.lang or list(FERTILITY_LANGS)
    if args.input and len(langs) != 1:
        raise UsageError("--in needs exactly one --lang")
    modes = ["text", "vision"] if args.mode == "both" else [args.mode]
    dictionary = load_dictionary(args.dictionary) if args.dictionary else None
    vocab, atlas, config = _tokenizer(args.tokenizer), _atlas(args.atlas), _config(args.layout)
    rows = []
    for lang in langs:
        if args.input:
            corpus, cid = [t for _, t in read_texts(args.input)], args.input
        else:
            corpus, cid = bundled_corpus(lang), f"bundled:{lang}"
        for mode in modes:
            tok = vocab if mode == "text" else config
            rep = fertility(corpus, lang, mode, tok, atlas=atlas,
                            dictionary=_dictionary_for(lang, dictionary),
                            corpus_id=cid, aggregate=args.aggregate)
            row = rep.as_dict()
            row["reference"] = REFERENCE_FET.get((lang, mode))
            rows.append(row)
    write_output(args.out, rows)
    return 0


def _dictionary_for(lang: str, given):
    if given is None and lang.split("-")[0].lower() == "zh":
        return bundled_zh_dictionary()
    return given


def _compress_corpus(path: str | None) -> list[str]:
    if path is None:
        return [r.instruction for r in bundled_qa()]
    return [t for _, t in read_texts(path)]


def cmd_compress(args) -> int:
    rep = compression_ratio(_compress_corpus(args.input), _tokenizer(args.tokenizer),
                            _config(args.layout), _atlas(args.atlas))
    write_output(args.out, rep.as_dict(with_pairs=args.pairs))
    return 0


def _shape(name: str) -> ModelShape:
    if name in PRESETS:
        return PRESETS[name]
    try:
        with open(name, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read shape file {name}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"shape file is not JSON: {exc.msg}") from None
    try:
        return ModelShape(**data)
    except TypeError as exc:
        raise UsageError(f"bad shape file {name}: {exc}") from None


def cmd_flops(args) -> int:
    shape = _shape(args.shape)
    if args.prefill_tokens is None:
        sc = table2_scenario(shape, delta=args.delta, text_tflops=args.text_tflops,
                             gen_tokens=args.gen_tokens)
        write_output(args.out, sc.as_dict())
        return 0
    est = estimate_flops(shape, args.prefill_tokens, args.gen_tokens, args.vision_patches)
    row = est.as_dict()
    if args.compare_prefill_tokens is not None:
        other = estimate_flops(shape, args.compare_prefill_tokens, args.gen_tokens, 0)
        row["reference_total"] = other.total
        row["reduction_vs_reference"] = flops_reduction(other, est)
    write_output(args.out, row)
    return 0


def _perturb_resources(args) -> dict:
    res = {"lang": args.lang}
    if args.glyph_map:
        res["glyph_map"] = load_glyph_map(args.glyph_map)
    if args.synonyms:
        res["synonyms"] = load_synonyms(args.synonyms)
    if args.dictionary:
        res["dictionary"] = load_dictionary(args.dictionary)
    return res


def _perturb_one(item, spec, resources):
    i, (tid, text) = item
    return {"text_id": tid, "text": perturb(text, record_spec(spec, i), **resources)}


def _spec(kind: str, p: float, n: int, seed: int) -> PerturbationSpec:
    with warnings.catch_warnings():
        if kind != "ngram_shuffle":
            warnings.simplefilter("ignore")
        return PerturbationSpec(kind=kind, p=p, n=n, seed=seed)


def cmd_perturb(args) -> int:
    items = [("text", args.text)] if args.text is not None else read_texts(args.input)
    spec = _spec(args.kind, args.p, args.n, args.seed)
    rows = ordered_map(_perturb_one, list(enumerate(items)), args.jobs,
                       (spec, _perturb_resources(args)))
    write_output(args.out, rows)
    return 0


def cmd_probe(args) -> int:
    lex = load_lexicon(args.lexicon)
    modes = ["vision", "text"] if args.mode == "both" else [args.mode]
    rows = []
    for mode in modes:
        rep = compositionality_probe(lex, mode, joiner=args.joiner, tokenizer=_tokenizer(args.tokenizer),
                                     config=_config(args.layout), atlas=_atlas(args.atlas))
        if args.summary:
            rows.append({"mode": mode, "embedder": rep.embedder, "n": len(rep.entries), **rep.means})
        else:
            rows.extend({"mode": mode, **e.as_dict()} for e in rep.entries)
    write_output(args.out, rows)
    return 0


def _sim_one(item, specs, te, ve, resources):
    i, (tid, text) = item
    clean_t, clean_v = _CachedEmbedder(te), _CachedEmbedder(ve)
    out = []
    for spec in specs:
        st, sv = similarity_under_perturbation(text, record_spec(spec, i), text_embedder=clean_t,
                                               visual_embedder=clean_v, **resources)
        out.append({"text_id": tid, "kind": spec.kind, "p": spec.p, "sim_text": st, "sim_vision": sv})
    return out


class _CachedEmbedder:
    """Remembers embeddings within one record (the clean text recurs per spec)."""

    def __init__(self, inner):
        self.inner, self.name, self._memo = inner, inner.name, {}

    def embed(self, text):
        v = self._memo.get(text)
        if v is None:
            v = self._memo[text] = self.inner.embed(text)
        return v


def similarity_rows(items, kinds, ps, *, seed, n, te, ve, resources, jobs=1, per_sample=False):
    specs = [_spec(k, p, n, seed) for k in kinds for p in ps]
    per = ordered_map(_sim_one, list(enumerate(items)), jobs, (specs, te, ve, resources))
    if per_sample:
        return [row for rows in per for row in rows]
    summary = []
    for j, spec in enumerate(specs):
        st = np.array([rows[j]["sim_text"] for rows in per])
        sv = np.array([rows[j]["sim_vision"] for rows in per])
        ok = ~(np.isnan(st) | np.isnan(sv))
        summary.append({
            "kind": spec.kind, "p": spec.p, "n_samples": len(per), "n_undefined": int((~ok).sum()),
            "mean_sim_text": float(st[ok].mean()) if ok.any() else None,
            "mean_sim_vision": float(sv[ok].mean()) if ok.any() else None,
            "text_embedder": te.name, "vision_embedder": ve.name,
        })
    return summary


def _embedders(args):
    config, atlas = _config(args.layout), _atlas(args.atlas)
    pe = PatchEmbedder(P=config.patch_px, background=tuple(config.background), variant=args.variant)
    return TextEmbedder(_tokenizer(args.tokenizer)), VisualEmbedder(config, atlas, pe)


def cmd_similarity(args) -> int:
    if args.input:
        items = read_texts(args.input)
    else:
        items = [(r.id, r.instruction) for r in bundled_qa()]
    if args.limit is not None:
        items = items[:args.limit]
    te, ve = _embedders(args)
    rows = similarity_rows(items, args.kinds, args.p, seed=args.seed, n=args.n, te=te, ve=ve,
                           resources=_perturb_resources(args), jobs=args.jobs,
                           per_sample=args.per_sample)
    write_output(args.out, rows)
    return 0


def cmd_procrustes(args) -> int:
    if len(args.x) != len(args.y):
        raise UsageError("--x and --y need the same number of files")
    pairs = [(read_matrix(a), read_matrix(b)) for a, b in zip(args.x, args.y)]
    results = layerwise_procrustes(pairs)
    if args.save_r:
        if len(results) != 1:
            raise UsageError("--save-r works with a single matrix pair")
        write_matrix(args.save_r, results[0].R)
    rows = [{**r.as_dict(), "rows": int(x.shape[0]), "x": a, "y": b}
            for r, (x, _), a, b in zip(results, pairs, args.x, args.y)]
    write_output(args.out, rows)
    return 0


def cmd_corpus_emit(args) -> int:
    records = ingest_jsonl(args.input)
    vocab = _tokenizer(args.tokenizer)
    kept, dropped = filter_long(records, args.max_text_tokens, vocab)
    print(f"kept {len(kept)} of {len(records)} records ({dropped} over the cap)", file=sys.stderr)
    rows = emit(kept, _config(args.layout), _atlas(args.atlas), args.out_dir, vocab,
                render_responses=args.render_responses, jobs=args.jobs)
    write_output(args.out, {"records": len(records), "kept": len(kept), "dropped": dropped,
                            "images": sum(len(r["images"]) for r in rows),
                            "manifest": str(Path(args.out_dir) / "manifest.jsonl")})
    return 0


def build_report(outdir: Path, *, seed: int, limit: int, ps: Sequence[float], jobs: int,
                 vocab: BpeVocab, atlas: GlyphAtlas, config: RenderConfig) -> dict:
    """Write the figure-style CSV tables and a JSON summary into ``outdir``."""
    tables: dict[str, list[dict]] = {}

    fet = []
    for lang in FERTILITY_LANGS:
        corpus = bundled_corpus(lang)
        for mode, tok in (("text", vocab), ("vision", config)):
            rep = fertility(corpus, lang, mode, tok, atlas=atlas,
                            dictionary=_dictionary_for(lang, None), corpus_id=f"bundled:{lang}")
            fet.append({"lang": lang, "mode": mode, "fet": rep.mean, "words": rep.word_count,
                        "tokens": rep.token_count, "reference": REFERENCE_FET.get((lang, mode))})
    tables["fertility"] = fet

    qa = bundled_qa()
    comp = compression_ratio([r.instruction for r in qa], vocab, config, atlas)
    tables["compression"] = [comp.as_dict()]

    sc = table2_scenario()
    tables["flops"] = [
        {"mode": m, "prefill_tokens": e.prefill_tokens, "gen_tokens": e.gen_tokens,
         "vision_patches": e.vision_patches, "prefill_tflops": e.prefill_flops / 1e12,
         "decode_tflops": e.decode_flops / 1e12, "encoder_tflops": e.encoder_flops / 1e12,
         "total_tflops": e.total / 1e12}
        for m, e in (("text", sc.text), ("vision", sc.vision))
    ]

    items = [(r.id, r.instruction) for r in qa[:limit]]
    pe = PatchEmbedder(P=config.patch_px, background=tuple(config.background))
    te, ve = TextEmbedder(vocab), VisualEmbedder(config, atlas, pe)
    tables["similarity"] = similarity_rows(items, KINDS, ps, seed=seed, n=3, te=te, ve=ve,
                                           resources={}, jobs=jobs)

    lex = load_lexicon()
    probe = []
    for mode in ("vision", "text"):
        rep = compositionality_probe(lex, mode, tokenizer=vocab, config=config, atlas=atlas)
        probe.append({"mode": mode, "n": len(rep.entries), **rep.means})
    tables["probe"] = probe

    outdir.mkdir(parents=True, exist_ok=True)
    for name, rows in tables.items():
        atomic_write(outdir / f"{name}.csv", format_rows(rows, "csv").encode("utf-8"))
    summary = {
        "version": __version__, "seed": seed, "similarity_samples": len(items),
        "delta": comp.delta, "tokens_per_patch": comp.tokens_per_patch,
        "flops_reduction": sc.reduction, "flops_reduction_decoder_only": sc.reduction_decoder_only,
        "tables": sorted(f"{n}.csv" for n in tables),
    }
    atomic_write(outdir / "summary.json", format_rows(summary, "json").encode("utf-8"))
    return summary


def cmd_report(args) -> int:
    try:
        summary = build_report(Path(args.out_dir), seed=args.seed, limit=args.limit, ps=args.p,
                               jobs=args.jobs, vocab=_tokenizer(args.tokenizer),
                               atlas=_atlas(args.atlas), config=_config(args.layout))
    except OSError as exc:
        raise IoError(f"cannot write report: {exc}") from exc
    write_output(args.out, summary)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_out(p):
    p.add_argument("--out", metavar="PATH",
                   help="output file; format from extension (.json, .jsonl, .csv); default JSONL on stdout")


def _add_atlas(p):
    p.add_argument("--atlas", metavar="PATH",
                   help=f"glyph atlas JSON (default: ${ATLAS_ENV}, else the bundled 7 px atlas)")
    p.add_argument("--layout", choices=("224", "384"), default="224",
                   help="render layout: 224 (14 px strips, 224 px images) or 384 (16 px, one 384 px image)")


def _add_tokenizer(p):
    p.add_argument("--tokenizer", metavar="PATH", help="byte-BPE tokenizer JSON (default: bundled fixture)")


def _add_jobs(p):
    p.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="worker processes; output does not depend on N (default 1)")


def _add_input(p, required=False):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--in", dest="input", metavar="PATH",
                   help="JSONL rows {text_id, text} (or {id, instruction}); other extensions: one text per line")
    g.add_argument("--text", help="a single literal text (text_id 'text')")


def _add_perturb_resources(p):
    p.add_argument("--lang", default="en", help="language tag for word segmentation (default en)")
    p.add_argument("--glyph-map", metavar="PATH", help="glyph substitution TSV for visual_attack")
    p.add_argument("--synonyms", metavar="PATH", help="synonym table JSON for word_noise")
    p.add_argument("--dictionary", metavar="PATH", help="word list for dictionary segmentation (zh)")


def _add_seed(p):
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"root seed; per-record streams derive from it (default {DEFAULT_SEED})")


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _prob(s: str) -> float:
    v = float(s)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vistok", description="Render text to images, count visual and subword "
                     "tokens, perturb text and compare the two tokenizations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("render", help="render texts to folded PNG images")
    _add_input(p, required=True)
    p.add_argument("--out-dir", required=True, metavar="DIR", help="directory for <text_id>_<k>.png files")
    p.add_argument("--strip", action="store_true", help="also write the unfolded strip as <text_id>_strip.png")
    _add_atlas(p)
    _add_out(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("tokenize", help="count subword or visual tokens per text")
    p.add_argument("--mode", choices=("text", "vision"), required=True, help="tokenizer to apply")
    _add_input(p, required=True)
    p.add_argument("--ids", action="store_true", help="text mode: include token ids")
    p.add_argument("--drop-blank-tokens", action="store_true",
                   help="vision mode: do not count tokens whose patches are all background")
    _add_atlas(p)
    _add_tokenizer(p)
    _add_jobs(p)
    _add_out(p)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("fertility", help="tokens per word for text and vision tokenization")
    p.add_argument("--lang", action="append", metavar="LANG",
                   help=f"language (repeatable; default {' '.join(FERTILITY_LANGS)})")
    p.add_argument("--in", dest="input", metavar="PATH", help="corpus to use instead of the bundled one (one --lang)")
    p.add_argument("--mode", choices=("text", "vision", "both"), default="both", help="default both")
    p.add_argument("--aggregate", choices=("ratio_of_totals", "mean_of_ratios"), default="ratio_of_totals",
                   help="corpus aggregate (default ratio_of_totals)")
    p.add_argument("--dictionary", metavar="PATH", help="word list for zh segmentation (default bundled)")
    _add_atlas(p)
    _add_tokenizer(p)
    _add_out(p)
    p.set_defaults(func=cmd_fertility)

    p = sub.add_parser("compress", help="compression ratio of subword vs visual tokens")
    p.add_argument("--in", dest="input", metavar="PATH", help="texts (default: bundled English QA instructions)")
    p.add_argument("--pairs", action="store_true", help="include per-sample (text, visual) token pairs")
    _add_atlas(p)
    _add_tokenizer(p)
    _add_out(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("flops", help="analytical inference FLOPs")
    p.add_argument("--shape", default="qwen2.5-vl-3b", metavar="NAME|PATH",
                   help="preset name or JSON file of ModelShape fields (default qwen2.5-vl-3b)")
    p.add_argument("--prefill-tokens", type=int, metavar="N",
                   help="prefill length; omit to run the calibrated text-vs-vision scenario")
    p.add_argument("--gen-tokens", type=int, default=64, metavar="N", help="generated tokens (default 64)")
    p.add_argument("--vision-patches", type=int, default=0, metavar="N", help="encoder patches (default 0)")
    p.add_argument("--compare-prefill-tokens", type=int, metavar="N",
                   help="text-mode prefill to report the reduction against")
    p.add_argument("--delta", type=float, default=4.43, help="scenario: token-length ratio (default 4.43)")
    p.add_argument("--text-tflops", type=float, default=3.12,
                   help="scenario: text-mode total the prefill length is calibrated to (default 3.12)")
    _add_out(p)
    p.set_defaults(func=cmd_flops)

    p = sub.add_parser("perturb", help="apply a seeded perturbation to every text")
    p.add_argument("--kind", choices=KINDS, required=True, help="perturbation family")
    p.add_argument("--p", type=_prob, default=0.3, help="per-unit probability (default 0.3)")
    p.add_argument("--n", type=_positive_int, default=3, help="ngram_shuffle block size (default 3)")
    _add_seed(p)
    _add_input(p, required=True)
    _add_perturb_resources(p)
    _add_jobs(p)
    _add_out(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("probe", help="compositionality probe over a compound lexicon")
    p.add_argument("--lexicon", metavar="PATH", help="word<TAB>parts TSV (default bundled)")
    p.add_argument("--mode", choices=("text", "vision", "both"), default="both", help="default both")
    p.add_argument("--joiner", default=" ", help="string placed between parts for the spaced form (default ' ')")
    p.add_argument("--summary", action="store_true", help="emit per-mode means only")
    _add_atlas(p)
    _add_tokenizer(p)
    _add_out(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("similarity", help="clean-vs-perturbed similarity for both embedders")
    p.add_argument("--in", dest="input", metavar="PATH", help="texts (default: bundled English QA instructions)")
    p.add_argument("--kinds", nargs="+", choices=KINDS, default=["visual_attack", "typoglycemia"],
                   metavar="KIND", help=f"perturbation kinds (choices: {', '.join(KINDS)})")
    p.add_argument("--p", nargs="+", type=_prob, default=[0.4], help="probabilities (default 0.4)")
    p.add_argument("--n", type=_positive_int, default=3, help="ngram_shuffle block size (default 3)")
    p.add_argument("--limit", type=int, metavar="N", help="use the first N texts only")
    p.add_argument("--variant", choices=("full", "glyph_bag"), default="full",
                   help="toy visual embedder variant (default full)")
    p.add_argument("--per-sample", action="store_true", help="emit one row per text instead of means")
    _add_seed(p)
    _add_perturb_resources(p)
    _add_atlas(p)
    _add_tokenizer(p)
    _add_jobs(p)
    _add_out(p)
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("procrustes", help="orthogonal alignment residuals between matrix files")
    p.add_argument("--x", nargs="+", required=True, metavar="PATH", help="source matrices (.mat binary or .csv)")
    p.add_argument("--y", nargs="+", required=True, metavar="PATH", help="target matrices, paired with --x")
    p.add_argument("--save-r", metavar="PATH", help="write the rotation for a single pair")
    _add_out(p)
    p.set_defaults(func=cmd_procrustes)

    p = sub.add_parser("corpus-emit", help="filter, render and write an image manifest")
    p.add_argument("--in", dest="input", required=True, metavar="PATH",
                   help="JSONL records {id, instruction, response, lang}")
    p.add_argument("--out-dir", required=True, metavar="DIR", help="destination for images/ and manifest.jsonl")
    p.add_argument("--max-text-tokens", type=int, required=True, metavar="N",
                   help="drop records whose instruction+response exceed N subword tokens (no default)")
    p.add_argument("--render-responses", action="store_true", help="render responses too")
    _add_atlas(p)
    _add_tokenizer(p)
    _add_jobs(p)
    _add_out(p)
    p.set_defaults(func=cmd_corpus_emit)

    p = sub.add_parser("report", help="write figure-style CSV tables for every analysis")
    p.add_argument("--out-dir", required=True, metavar="DIR", help="directory for the CSV tables")
    p.add_argument("--limit", type=int, default=100, metavar="N", help="texts in the similarity sweep (default 100)")
    p.add_argument("--p", nargs="+", type=_prob, default=[0.1, 0.2, 0.3, 0.4, 0.5],
                   help="similarity sweep probabilities (default 0.1 0.2 0.3 0.4 0.5)")
    _add_seed(p)
    _add_atlas(p)
    _add_tokenizer(p)
    _add_jobs(p)
    _add_out(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "jobs", 1) < 1:
        print("vistok: error: argument --jobs: must be >= 1", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except VistokError as exc:
        print(f"vistok: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"vistok: I/O error: {exc}", file=sys.stderr)
        return 2


run = main

if __name__ == "__main__":
    sys.exit(main())
