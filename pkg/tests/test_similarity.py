import numpy as np
import pytest

from vistok.analysis import similarity_sweep, similarity_under_perturbation
from vistok.analysis.embedding import TextEmbedder, VisualEmbedder
from vistok.perturb import PerturbationSpec
from vistok.vision import PatchEmbedder

TEXT = "Human mind does not read every letter by itself, but the word as a whole"


def test_zero_probability_gives_one():
    st, sv = similarity_under_perturbation(TEXT, PerturbationSpec("typoglycemia", 0.0))
    assert st == pytest.approx(1.0) and sv == pytest.approx(1.0)


def test_glyph_bag_is_blind_to_typoglycemia(atlas):
    ve = VisualEmbedder(patch_embedder=PatchEmbedder(variant="glyph_bag"))
    for seed in range(5):
        _, sv = similarity_under_perturbation(TEXT, PerturbationSpec("typoglycemia", 1.0, seed=seed),
                                              visual_embedder=ve)
        assert sv == 1.0


def test_values_in_range():
    for kind in ("char_edit", "visual_attack", "word_noise", "ngram_shuffle", "typoglycemia"):
        st, sv = similarity_under_perturbation(TEXT, PerturbationSpec(kind, 0.6, n=3, seed=1))
        assert -1 <= st <= 1 and -1 <= sv <= 1


def test_deleted_everything_is_undefined(vocab):
    te = TextEmbedder(vocab)
    st, sv = similarity_under_perturbation("hello", PerturbationSpec("word_noise", 1.0), text_embedder=te)
    assert np.isnan(st) and np.isnan(sv)


def test_sweep_shape():
    rows = similarity_sweep([TEXT, "Another short line of text."], ["typoglycemia", "char_edit"], [0.0, 0.5])
    assert [(r.kind, r.p) for r in rows] == [("typoglycemia", 0.0), ("typoglycemia", 0.5),
                                            ("char_edit", 0.0), ("char_edit", 0.5)]
    assert rows[0].mean_sim_text == pytest.approx(1.0)
    assert rows[1].mean_sim_text < 1.0
