"""Analytical inference FLOPs for a decoder LM with an optional vision encoder.

Conventions (all counts are FLOPs, one multiply-add = 2 FLOPs):

* decoder, per token at context length c:   2 * N + 4 * L * d * c
  where N is the non-embedding parameter count (attention + MLP weights;
  norms, biases and the output head are ignored) and the second term is the
  QK^T and AV products, 2 * L * 2 * d * c;
* prefill of n tokens sums that over c = 1..n, decoding g tokens continues
  with c = n+1..n+g;
* encoder: 2 * N_enc per vision patch (the encoder attention term and the
  patch merger are not modelled);
* embedding lookups cost nothing.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import VistokError


@dataclass(frozen=True)
class ModelShape:
    layers: int
    d_model: int
    n_heads: int
    ffn_dim: int
    vocab_size: int
    encoder_layers: int = 0
    encoder_d_model: int = 0
    # patches the encoder sees per square input image; converts image
    # counts into patch counts (see patches_for_images)
    encoder_patch_count_basis: int = 256
    n_kv_heads: int | None = None
    gated_ffn: bool = True
    encoder_ffn_dim: int | None = None
    encoder_gated_ffn: bool = False
    name: str = "custom"

    def __post_init__(self):
        ints = [self.layers, self.d_model, self.n_heads, self.ffn_dim, self.vocab_size,
                self.encoder_patch_count_basis]
        if any(int(v) < 1 for v in ints):
            raise VistokError("model shape fields must be positive integers")
        if self.encoder_layers < 0 or self.encoder_d_model < 0:
            raise VistokError("encoder sizes must be non-negative")
        if self.d_model % self.n_heads:
            raise VistokError("d_model must be divisible by n_heads")
        kv = self.kv_heads
        if kv < 1 or self.n_heads % kv:
            raise VistokError("n_kv_heads must divide n_heads")

    @property
    def kv_heads(self) -> int:
        return self.n_kv_heads if self.n_kv_heads is not None else self.n_heads

    @property
    def non_embedding_params(self) -> int:
        d = self.d_model
        kv_dim = d * self.kv_heads // self.n_heads
        attn = 2 * d * d + 2 * d * kv_dim
        mlp = (3 if self.gated_ffn else 2) * d * self.ffn_dim
        return self.layers * (attn + mlp)

    @property
    def encoder_params(self) -> int:
        de = self.encoder_d_model
        if not self.encoder_layers or not de:
            return 0
        ffn = self.encoder_ffn_dim if self.encoder_ffn_dim is not None else 4 * de
        mlp = (3 if self.encoder_gated_ffn else 2) * de * ffn
        return self.encoder_layers * (4 * de * de + mlp)

    def patches_for_images(self, n_images: int) -> int:
        return n_images * self.encoder_patch_count_basis


# Qwen2.5-3B language model with the Qwen2.5-VL vision transformer
# (32 layers, width 1280, SwiGLU MLP of 3420).
QWEN25_VL_3B = ModelShape(
    layers=36, d_model=2048, n_heads=16, n_kv_heads=2, ffn_dim=11008, vocab_size=151936,
    encoder_layers=32, encoder_d_model=1280, encoder_ffn_dim=3420, encoder_gated_ffn=True,
    encoder_patch_count_basis=256, name="qwen2.5-vl-3b-like",
)


@dataclass(frozen=True)
class FlopsEstimate:
    prefill_flops: int
    decode_flops: int
    encoder_flops: int
    prefill_tokens: int
    gen_tokens: int
    vision_patches: int
    shape: str = ""

    @property
    def decoder_flops(self) -> int:
        return self.prefill_flops + self.decode_flops

    @property
    def total(self) -> int:
        return self.prefill_flops + self.decode_flops + self.encoder_flops

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(decoder_flops=self.decoder_flops, total=self.total,
                 formula="decoder/token = 2*N + 4*L*d*ctx; encoder = 2*N_enc*patches")
        return d


def estimate_flops(shape: ModelShape, prefill_tokens: int, gen_tokens: int = 0,
                   vision_patches: int = 0) -> FlopsEstimate:
    n, g, v = int(prefill_tokens), int(gen_tokens), int(vision_patches)
    if min(n, g, v) < 0:
        raise VistokError("token and patch counts must be non-negative")
    N = shape.non_embedding_params
    attn = 4 * shape.layers * shape.d_model
    prefill = 2 * N * n + attn * n * (n + 1) // 2
    decode = 2 * N * g + attn * (g * n + g * (g + 1) // 2)
    encoder = 2 * shape.encoder_params * v
    return FlopsEstimate(prefill, decode, encoder, n, g, v, shape.name)


def flops_reduction(text: FlopsEstimate, vision: FlopsEstimate, decoder_only: bool = False) -> float:
    if decoder_only:
        return 1.0 - vision.decoder_flops / text.decoder_flops
    return 1.0 - vision.total / text.total


def solve_prefill(shape: ModelShape, target_flops: float, gen_tokens: int) -> int:
    """Smallest prefill length whose text-mode total reaches ``target_flops``."""
    lo, hi = 0, 1
    while estimate_flops(shape, hi, gen_tokens).total < target_flops:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if estimate_flops(shape, mid, gen_tokens).total < target_flops:
            lo = mid + 1
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class Table2Scenario:
    text: FlopsEstimate
    vision: FlopsEstimate
    delta: float
    reduction: float
    reduction_decoder_only: float

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "text": self.text.as_dict(),
            "vision": self.vision.as_dict(),
            "reduction": self.reduction,
            "reduction_decoder_only": self.reduction_decoder_only,
        }


def table2_scenario(shape: ModelShape = QWEN25_VL_3B, delta: float = 4.43,
                    text_tflops: float = 3.12, gen_tokens: int = 64,
                    group_size: int = 4) -> Table2Scenario:
    """Text vs vision FLOPs at QA-benchmark lengths.

    The text prefill length is the one at which the text-mode total equals
    ``text_tflops``; the vision prefill is that length over ``delta`` and
    each visual token costs ``group_size`` encoder patches.  Both sides
    decode ``gen_tokens`` tokens.
    """
    n_text = solve_prefill(shape, text_tflops * 1e12, gen_tokens)
    n_vis = round(n_text / delta)
    text = estimate_flops(shape, n_text, gen_tokens, 0)
    vision = estimate_flops(shape, n_vis, gen_tokens, group_size * n_vis)
    return Table2Scenario(text, vision, delta, flops_reduction(text, vision),
                          flops_reduction(text, vision, decoder_only=True))
