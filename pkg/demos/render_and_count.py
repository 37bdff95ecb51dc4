"""Render a sentence, look at the pixels, and count tokens both ways.

    python demos/render_and_count.py [--out-dir DIR]

Writes the unfolded strip and the folded square image as PNGs so you can
open them, then prints how many subword tokens and how many visual tokens
the same sentence costs.
"""

import argparse
import tempfile
from pathlib import Path

from vistok import RenderConfig, default_atlas, default_tokenizer, render, render_strip
from vistok.bpe import count_tokens
from vistok.renderer import encode_png
from vistok.vision import count_patches, count_visual_tokens

SENTENCE = ("Rendering text as pixels lets a vision encoder read it: every 14 by 14 patch "
            "covers a few characters, and four patches merge into one visual token.")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default=tempfile.mkdtemp(prefix="vistok-demo-"))
    out = Path(ap.parse_args().out_dir)
    out.mkdir(parents=True, exist_ok=True)

    atlas, config, vocab = default_atlas(), RenderConfig(), default_tokenizer()

    strip = render_strip(SENTENCE, config, atlas)
    print(f"strip: {strip.raw_width_px} px of glyph advances, padded to {strip.total_width_px} px "
          f"({strip.total_width_px // config.patch_px} patches of {config.patch_px} px)")
    (out / "strip.png").write_bytes(encode_png(strip.strip))

    images = render(SENTENCE, config, atlas)
    for k, img in enumerate(images):
        (out / f"folded_{k}.png").write_bytes(encode_png(img))
    print(f"folded into {len(images)} image(s) of {images[0].shape[1]}x{images[0].shape[0]}; "
          "the strip fills the top rows and the rest stays background")

    n_text = count_tokens(SENTENCE, vocab)
    n_vis = count_visual_tokens(SENTENCE, config, atlas)
    print(f"subword tokens: {n_text}")
    print(f"visual tokens : {n_vis} ({count_patches(SENTENCE, config, atlas)} patches / 4, rounded up)")
    print(f"ratio         : {n_text / n_vis:.2f}x fewer tokens on the vision side")
    print(f"PNG files in {out}")


if __name__ == "__main__":
    main()
