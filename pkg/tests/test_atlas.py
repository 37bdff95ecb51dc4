import json

import numpy as np
import pytest

from vistok.atlas import Glyph, GlyphAtlas, atlas_from_dict, atlas_to_dict, load_atlas, save_atlas
from vistok.errors import AtlasError, IoError

from conftest import make_atlas


def test_default_atlas_metrics(atlas):
    assert atlas.line_height_px == 14
    assert atlas.fallback == 0xFFFD
    # a handful of advances the fixture numbers depend on
    assert [atlas.advance(c) for c in "aeimt ."] == [4, 4, 2, 7, 3, 2, 2]
    assert atlas.advance("\u200b") == 0


def test_every_glyph_fits_the_line_box(atlas):
    for cp, g in atlas.glyphs.items():
        assert g.top + g.height <= atlas.line_height_px
        assert g.bearing + g.width <= g.advance
        if g.height:
            assert g.advance >= 1


def test_lookup_is_total(atlas):
    tofu = atlas.lookup(atlas.fallback)
    assert atlas.lookup(0x10FFFF) is tofu
    assert atlas.resolve("\U0001F600") == atlas.fallback


def test_whitespace_resolves_to_space(atlas):
    assert atlas.resolve("\n") == 0x20
    assert atlas.resolve("\t") == 0x20
    assert atlas.advance("\n") == atlas.advance(" ")


def test_round_trip_through_json(tmp_path):
    a = make_atlas("xyz", advance=5)
    path = tmp_path / "a.json"
    save_atlas(a, path)
    b = load_atlas(path)
    assert atlas_to_dict(a) == atlas_to_dict(b)
    for cp in a.glyphs:
        assert np.array_equal(a.lookup(cp).bitmap, b.lookup(cp).bitmap)


def test_missing_fallback_rejected():
    with pytest.raises(AtlasError):
        GlyphAtlas({0x61: Glyph(np.zeros((0, 0), np.uint8), 3)}, 14, 0xFFFD)


def test_tall_glyph_rejected():
    g = Glyph(np.ones((15, 2), np.uint8), 3)
    with pytest.raises(AtlasError):
        GlyphAtlas({0xFFFD: g}, 14, 0xFFFD)


def test_zero_advance_printable_rejected():
    tofu = Glyph(np.ones((3, 2), np.uint8), 3)
    with pytest.raises(AtlasError):
        GlyphAtlas({0xFFFD: tofu, 0x61: Glyph(np.ones((3, 1), np.uint8), 0)}, 14, 0xFFFD)


def test_malformed_files(tmp_path):
    with pytest.raises(AtlasError):
        atlas_from_dict({"format": "something-else"})
    d = atlas_to_dict(make_atlas("a"))
    d["glyphs"]["0061"]["rows"] = ["ff", "fff"]
    with pytest.raises(AtlasError):
        atlas_from_dict(d)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(AtlasError):
        load_atlas(bad)
    with pytest.raises(IoError):
        load_atlas(tmp_path / "absent.json")


def test_bundled_file_schema():
    from importlib.resources import files

    data = json.loads(files("vistok").joinpath("data/atlas_7px.json").read_text("utf-8"))
    assert data["format"] == "vistok-atlas" and data["version"] == 1
    assert data["font_size_px"] == 7
