import itertools
import string
from collections import Counter

import numpy as np
import pytest
import regex
from hypothesis import given, settings
from hypothesis import strategies as st

from vistok.errors import ParseError, VistokError
from vistok.perturb import (
    KIND_KEY,
    KINDS,
    GlyphSubstitutionMap,
    PerturbationSpec,
    SynonymTable,
    char_edit,
    corruption_counts,
    default_glyph_map,
    default_synonyms,
    load_glyph_map,
    measured_rate,
    ngram_blocks,
    ngram_shuffle,
    perturb,
    perturb_result,
    record_spec,
    typoglycemia,
    visual_attack,
    word_noise,
)
from vistok.segment import Dictionary, greedy_longest_match

WORD = regex.compile(r"[\p{L}\p{M}]+")
SENTENCE = "Human mind does not read every letter by itself, but the word as a whole"
TEXTS = st.text(alphabet=string.ascii_letters + "äöüß  ,.!-'", max_size=80)


def spec(kind, p=1.0, n=3, seed=7):
    return PerturbationSpec(kind=kind, p=p, n=n, seed=seed)


@pytest.mark.parametrize("kind", KINDS)
def test_zero_probability_is_identity(kind):
    assert perturb(SENTENCE, spec(kind, p=0.0)) == SENTENCE


def test_spec_validation():
    with pytest.raises(VistokError):
        PerturbationSpec("melt", 0.1)
    with pytest.raises(VistokError):
        PerturbationSpec("char_edit", 1.5)
    with pytest.raises(VistokError):
        PerturbationSpec("ngram_shuffle", 0.5, n=None)
    with pytest.warns(UserWarning):
        PerturbationSpec("ngram_shuffle", 0.5, n=4)


def test_ngram_abcd():
    assert ngram_blocks("abcd", 2) == ["ab", "cd"]
    for seed in range(20):
        assert ngram_shuffle("abcd", spec("ngram_shuffle", n=2, seed=seed)) == "cdab"


def test_ngram_morning_against_enumeration():
    for seed in (0, 1, 7, 123):
        blocks = ngram_blocks("morning", 2)
        assert blocks == ["mo", "rn", "in", "g"]
        rng = np.random.default_rng([seed, KIND_KEY["ngram_shuffle"], 0])
        rng.random()  # selection draw
        orders = [p for p in itertools.permutations(range(4))
                  if "".join(blocks[i] for i in p) != "morning"]
        expected = "".join(blocks[i] for i in orders[int(rng.integers(len(orders)))])
        assert ngram_shuffle("morning", spec("ngram_shuffle", n=2, seed=seed)) == expected


def test_ngram_short_final_block_moves():
    seen = {ngram_shuffle("abcde", spec("ngram_shuffle", n=2, seed=s)) for s in range(60)}
    assert seen == {"".join(p) for p in itertools.permutations(["ab", "cd", "e"])} - {"abcde"}


def test_visual_attack_table_rows():
    gm = default_glyph_map()
    assert visual_attack("Hac", spec("visual_attack"), gm) == "Ĥâĉ"
    assert gm.entries["a"] == ("â",) and gm.entries["b"] == ("ḃ",)
    assert gm.complete


def test_visual_attack_leaves_non_latin():
    out = visual_attack("Привет 123 \u2014 ok", spec("visual_attack"))
    assert out.startswith("Привет 123 \u2014 ") and out[-2:] != "ok"


def test_glyph_map_validation(tmp_path):
    with pytest.raises(VistokError):
        GlyphSubstitutionMap({"a": ("a",)})
    with pytest.raises(VistokError):
        GlyphSubstitutionMap({"ä": ("a",)})
    p = tmp_path / "m.tsv"
    p.write_text("a\tâ\nb ḃ\n", encoding="utf-8")
    with pytest.raises(ParseError) as e:
        load_glyph_map(p)
    assert e.value.line == 2


def test_typoglycemia_examples():
    assert typoglycemia("mind", spec("typoglycemia")) == "mnid"
    assert typoglycemia("cat", spec("typoglycemia")) == "cat"
    out = typoglycemia(SENTENCE, spec("typoglycemia"))
    for a, b in zip(WORD.findall(SENTENCE), WORD.findall(out)):
        assert Counter(a) == Counter(b)
        if len(a) >= 4:
            assert (a[0], a[-1]) == (b[0], b[-1])
            if len(set(a[1:-1])) > 1:
                assert a != b
    assert out.split(" ")[0] != "Human" and out.startswith("H")


def test_typoglycemia_ineligible_words_not_counted():
    r = perturb_result("cat seen book", spec("typoglycemia"))
    # "seen" has interior "ee" (one distinct letter), "book" has "oo"
    assert r.eligible == 0 and r.changed == 0


def test_char_edit_changes_selected_words():
    r = perturb_result("alpha beta gamma delta", spec("char_edit"))
    assert r.eligible == 4 and r.changed == 4
    assert r.text != "alpha beta gamma delta"


def test_word_noise_actions():
    table = SynonymTable({"en": {"big": ("large",)}})
    out = {word_noise("The big dog", spec("word_noise", seed=s), table) for s in range(40)}
    assert any("large" in o for o in out)
    assert any(len(o.split()) < 3 for o in out)
    for o in out:
        assert "  " not in o
    assert word_noise("Big", spec("word_noise", seed=3), table) in {"Large", ""}


def test_word_noise_zh_uses_segments():
    d = Dictionary.from_words(["世界", "知识", "你好"])
    for seed in range(10):
        out = word_noise("你好世界知识", spec("word_noise", seed=seed), SynonymTable({}), lang="zh", dictionary=d)
        assert " " not in out and len(out) < 6  # p=1: at least one word deleted or moved
        assert greedy_longest_match(out, d) == [out[i:i + 2] for i in range(0, len(out), 2)]


def test_synonym_table_rejects_self_map():
    with pytest.raises(VistokError):
        SynonymTable({"en": {"big": ("big",)}})
    table = default_synonyms()
    for lang, t in table.entries.items():
        for w, subs in t.items():
            assert w not in subs


def test_record_specs_are_distinct_and_stable():
    base = spec("char_edit", p=0.5)
    a, b = record_spec(base, 0), record_spec(base, 1)
    assert a.seed != b.seed
    assert record_spec(base, 0) == a


@settings(max_examples=150, deadline=None)
@given(text=TEXTS, kind=st.sampled_from(KINDS), p=st.floats(0, 1), seed=st.integers(0, 2**32))
def test_deterministic(text, kind, p, seed):
    s = spec(kind, p=p, seed=seed)
    assert perturb(text, s) == perturb(text, s)


@settings(max_examples=150, deadline=None)
@given(text=TEXTS, kind=st.sampled_from(["ngram_shuffle", "typoglycemia", "visual_attack"]),
       n=st.sampled_from([2, 3, 5]), seed=st.integers(0, 2**32))
def test_boundaries_preserved(text, kind, n, seed):
    out = perturb(text, spec(kind, p=0.7, n=n, seed=seed))
    assert [m.span() for m in regex.finditer(r"\s+", out)] == [m.span() for m in regex.finditer(r"\s+", text)]
    if kind != "visual_attack":
        assert [Counter(w) for w in WORD.findall(out)] == [Counter(w) for w in WORD.findall(text)]


def test_rate_is_calibrated_on_small_corpus():
    from vistok.corpus import bundled_qa

    corpus = [r.instruction for r in bundled_qa()[:40]]
    for kind in KINDS:
        rate = measured_rate(corpus, spec(kind, p=0.4, seed=11))
        changed, eligible = corruption_counts(corpus, spec(kind, p=0.4, seed=11))
        assert eligible > 1500
        # 4 sigma for a binomial at this size
        assert abs(rate - 0.4) < 4 * np.sqrt(0.24 / eligible), kind
