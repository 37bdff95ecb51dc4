import pytest

from vistok.analysis import QWEN25_VL_3B, ModelShape, estimate_flops, flops_reduction, table2_scenario
from vistok.analysis.flops import solve_prefill
from vistok.errors import VistokError

TOY = ModelShape(layers=1, d_model=4, n_heads=1, ffn_dim=8, vocab_size=16, gated_ffn=False)


def test_toy_shape_by_hand():
    # weights: q,k,v,o 4x4 each = 64, mlp up+down 4x8 each = 64  -> N = 128
    assert TOY.non_embedding_params == 128
    e = estimate_flops(TOY, prefill_tokens=2, gen_tokens=1)
    # per token 2N = 256 FLOPs of weight MACs; attention 4*L*d*ctx = 16*ctx
    # prefill ctx 1, 2: 2*256 + 16*(1+2) = 560 ; decode ctx 3: 256 + 48 = 304
    assert (e.prefill_flops, e.decode_flops, e.encoder_flops) == (560, 304, 0)
    assert e.total == 864


def test_zero_everywhere():
    assert estimate_flops(QWEN25_VL_3B, 0, 0, 0).total == 0


def test_encoder_term():
    e = estimate_flops(QWEN25_VL_3B, 0, 0, 10)
    assert e.encoder_flops == 2 * QWEN25_VL_3B.encoder_params * 10


def test_shape_validation():
    with pytest.raises(VistokError):
        ModelShape(layers=0, d_model=4, n_heads=1, ffn_dim=8, vocab_size=16)
    with pytest.raises(VistokError):
        ModelShape(layers=1, d_model=6, n_heads=4, ffn_dim=8, vocab_size=16)
    with pytest.raises(VistokError):
        ModelShape(layers=1, d_model=8, n_heads=4, n_kv_heads=3, ffn_dim=8, vocab_size=16)
    with pytest.raises(VistokError):
        estimate_flops(TOY, -1)


def test_preset_sizes():
    assert QWEN25_VL_3B.non_embedding_params == 2_774_532_096
    assert QWEN25_VL_3B.encoder_params == 629_964_800
    assert QWEN25_VL_3B.patches_for_images(1) == 256


def test_monotone_in_every_input():
    base = estimate_flops(QWEN25_VL_3B, 100, 10, 40).total
    assert estimate_flops(QWEN25_VL_3B, 101, 10, 40).total > base
    assert estimate_flops(QWEN25_VL_3B, 100, 11, 40).total > base
    assert estimate_flops(QWEN25_VL_3B, 100, 10, 41).total > base


def test_solve_prefill_is_the_smallest():
    n = solve_prefill(QWEN25_VL_3B, 3.12e12, 64)
    assert estimate_flops(QWEN25_VL_3B, n, 64).total >= 3.12e12
    assert estimate_flops(QWEN25_VL_3B, n - 1, 64).total < 3.12e12


def test_scenario_numbers():
    sc = table2_scenario()
    assert sc.text.prefill_tokens == 491 and sc.vision.prefill_tokens == 111
    assert sc.vision.vision_patches == 444
    assert sc.reduction == pytest.approx(1 - sc.vision.total / sc.text.total)
    assert sc.reduction == pytest.approx(0.50882, abs=1e-5)
    assert sc.reduction_decoder_only == pytest.approx(0.68782, abs=1e-5)
    assert flops_reduction(sc.text, sc.text) == 0.0
