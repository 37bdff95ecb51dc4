import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vistok.bpe import (
    PRETOKENIZER_PATTERNS,
    byte_alphabet,
    bytes_to_unicode,
    count_tokens,
    detokenize,
    load_tokenizer,
    piece_bytes,
    pretokenize,
    save_tokenizer,
    tokenize,
    vocab_from_dict,
    vocab_to_dict,
)
from vistok.errors import IoError, MergeConsistencyError, SchemaError

from conftest import toy_vocab

UNICODE = st.text(alphabet=st.characters(codec="utf-8", exclude_categories=["Cs"]), max_size=60)


@pytest.fixture(scope="module")
def abc():
    return toy_vocab(["ab", "abc"], [["a", "b"], ["ab", "c"]])


def test_hand_traced_merges(abc):
    seq = tokenize("abc", abc)
    assert seq.pieces == ["abc"] and len(seq) == 1
    assert tokenize("cba", abc).pieces == ["c", "b", "a"]
    empty = tokenize("", abc)
    assert empty.ids == [] and empty.pieces == []


def test_byte_alphabet():
    alpha = byte_alphabet()
    assert len(alpha) == 256 == len(set(alpha))
    assert bytes_to_unicode()[0x20] == "Ġ" and bytes_to_unicode()[0x0A] == "Ċ"
    assert piece_bytes("Ġthe") == b" the"


def test_pretokenizers():
    assert pretokenize("the  cat sat ", "whitespace_runs") == ["the", "  cat", " sat", " "]
    assert pretokenize("don't stop 42!", "gpt2_regex_like") == ["don", "'t", " stop", " 42", "!"]
    assert set(PRETOKENIZER_PATTERNS) == {"whitespace_runs", "gpt2_regex_like"}


def test_unknown_bytes_fall_back(abc):
    seq = tokenize("é€", abc)
    assert len(seq) == len("é€".encode())
    assert detokenize(seq, abc) == "é€"


def test_offsets_cover_the_bytes(vocab):
    s = "Grüße aus Köln, 你好!"
    seq = tokenize(s, vocab)
    ends = 0
    for a, b in seq.byte_offsets:
        assert a == ends and b > a
        ends = b
    assert ends == len(s.encode())
    assert b"".join(piece_bytes(p) for p in seq.pieces) == s.encode()
    assert count_tokens(s, vocab) == len(seq)


def test_detokenize_accepts_ids(vocab):
    ids = tokenize("plain ids", vocab).ids
    assert detokenize(ids, vocab) == "plain ids"


def test_specials_decode_verbatim(vocab):
    eot = vocab.token_to_id["<|endoftext|>"]
    assert detokenize([eot], vocab) == "<|endoftext|>"


def test_schema_errors():
    with pytest.raises(SchemaError):
        vocab_from_dict({"vocab": {"a": 0}})
    with pytest.raises(SchemaError):
        vocab_from_dict({"vocab": {"a": 0}, "merges": []})  # byte symbols missing
    base = {p: i for i, p in enumerate(byte_alphabet())}
    with pytest.raises(SchemaError):
        vocab_from_dict({"vocab": {**base, "x": 0}, "merges": []})  # duplicate id
    with pytest.raises(SchemaError):
        vocab_from_dict({"vocab": base, "merges": [], "pretokenizer": "sentencepiece"})
    with pytest.raises(SchemaError):
        vocab_from_dict({"vocab": base, "merges": [["a"]]})
    with pytest.raises(SchemaError):
        vocab_from_dict({"vocab": base, "merges": [], "specials": ["<s>"]})


def test_merge_consistency():
    base = {p: i for i, p in enumerate(byte_alphabet())}
    with pytest.raises(MergeConsistencyError):
        vocab_from_dict({"vocab": base, "merges": [["a", "b"]]})  # "ab" has no id
    v = dict(base, ab=256)
    with pytest.raises(MergeConsistencyError):
        vocab_from_dict({"vocab": v, "merges": [["a", "b"], "a b"]})


def test_merges_txt_style_strings():
    v = toy_vocab(["ab"], ["a b"])
    assert tokenize("ab", v).pieces == ["ab"]


def test_file_round_trip(tmp_path, abc):
    path = tmp_path / "tok.json"
    save_tokenizer(abc, path)
    again = load_tokenizer(path)
    assert vocab_to_dict(again) == vocab_to_dict(abc)
    (tmp_path / "broken.json").write_text("[1, 2")
    with pytest.raises(SchemaError):
        load_tokenizer(tmp_path / "broken.json")
    with pytest.raises(IoError):
        load_tokenizer(tmp_path / "missing.json")


def test_fixture_file_schema(vocab):
    from importlib.resources import files

    data = json.loads(files("vistok").joinpath("data/tokenizer_fixture.json").read_text("utf-8"))
    assert data["pretokenizer"] == "gpt2_regex_like" == vocab.pretokenizer
    assert len(vocab) == len(data["vocab"]) == 12000
    assert len(vocab.merges) == len(data["merges"])


def test_known_fixture_encodings(vocab):
    # frozen from the fixture tokenizer; an independent BPE agrees (see test_oracles)
    assert tokenize("Hello wörld 你好", vocab).ids == [40, 715, 355, 290, 2978, 445, 221, 3758, 255, 7381, 122]


@settings(max_examples=300, deadline=None)
@given(UNICODE)
def test_round_trip(vocab, s):
    assert detokenize(tokenize(s, vocab), vocab) == s


@settings(max_examples=200, deadline=None)
@given(UNICODE)
def test_removing_last_merge_never_shortens(vocab, s):
    fewer = vocab.without_last_merge()
    assert count_tokens(s, fewer) >= count_tokens(s, vocab)


@settings(max_examples=200, deadline=None)
@given(UNICODE)
def test_whitespace_pretokenizer_round_trip(abc, s):
    assert "".join(pretokenize(s, "whitespace_runs")) == s
    assert "".join(pretokenize(s, "gpt2_regex_like")) == s
    assert detokenize(tokenize(s, abc), abc) == s
