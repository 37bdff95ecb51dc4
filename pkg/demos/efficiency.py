"""Tokens per word across languages, and what shorter inputs save in FLOPs.

    python demos/efficiency.py

Fertility is measured on the bundled 200-sentence corpora.  The FLOPs part
uses a decoder with 3B-class dimensions: the text prompt is sized so that a
run with 64 generated tokens costs 3.12 TFLOPs, and the vision prompt is that
length divided by the compression ratio.
"""

from vistok import RenderConfig, default_atlas, default_tokenizer
from vistok.analysis import compression_ratio, fertility, table2_scenario
from vistok.corpus import bundled_corpus, bundled_qa
from vistok.segment import bundled_zh_dictionary


def main():
    atlas, config, vocab = default_atlas(), RenderConfig(), default_tokenizer()

    print("lang  text FET  vision FET  (tokens per word)")
    for lang in ("de", "cs", "is", "ru", "zh"):
        corpus = bundled_corpus(lang)
        d = bundled_zh_dictionary() if lang == "zh" else None
        t = fertility(corpus, lang, "text", vocab, dictionary=d).mean
        v = fertility(corpus, lang, "vision", config, atlas=atlas, dictionary=d).mean
        print(f"{lang:>4}  {t:8.3f}  {v:10.3f}")

    rep = compression_ratio([r.instruction for r in bundled_qa()], vocab, config, atlas)
    print(f"\nEnglish QA fixture: {rep.mean_text_tokens:.1f} subword vs {rep.mean_visual_tokens:.1f} "
          f"visual tokens per sample, delta = {rep.delta:.2f}")

    sc = table2_scenario(delta=rep.delta)
    for label, est in (("text", sc.text), ("vision", sc.vision)):
        print(f"{label:>6}: prefill {est.prefill_tokens:4d} tokens, {est.vision_patches:4d} encoder patches, "
              f"{est.total / 1e12:.2f} TFLOPs")
    print(f"reduction: {100 * sc.reduction:.1f}% overall, {100 * sc.reduction_decoder_only:.1f}% "
          "counting the decoder alone (the encoder pass eats the rest)")


if __name__ == "__main__":
    main()
