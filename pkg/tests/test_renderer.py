import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vistok.errors import ConfigError, GlyphOverflow
from vistok.renderer import (
    RenderConfig,
    encode_png,
    fold,
    fold_provenance,
    image_count,
    ink_pixel_count,
    measure,
    raw_advance,
    render,
    render_strip,
)

from conftest import make_atlas

TEXT = st.text(alphabet=st.characters(codec="utf-8", exclude_categories=["Cs"]), max_size=80)


def test_config_defaults_match_geometry():
    c = RenderConfig()
    assert (c.H, c.strip_width_px, c.fold_side_px, c.P, c.channels) == (14, 3584, 224, 14, 3)
    assert c.H * c.strip_width_px == c.fold_side_px ** 2


@pytest.mark.parametrize("kw", [
    dict(strip_height_px=16),
    dict(strip_width_px=3580),
    dict(fold_side_px=210),
    dict(channels=2),
    dict(letter_spacing_px=-1),
    dict(image_count_policy=0),
    dict(foreground=(0, 0, 300)),
])
def test_config_invariants(kw):
    with pytest.raises(ConfigError):
        RenderConfig(**kw)


def test_square_384_layout():
    c = RenderConfig.square_384()
    assert (c.H, c.strip_width_px, c.fold_side_px, c.P, c.image_count_policy) == (16, 9216, 384, 16, 1)


def test_measure_examples(atlas, config, geometry_lines):
    assert measure("", config, atlas) == 0
    assert atlas.advance("a") == 4
    assert measure("a", config, atlas) == 14
    assert raw_advance(geometry_lines["3570"], config, atlas) == 3570
    assert measure(geometry_lines["3570"], config, atlas) == 3570
    assert measure(geometry_lines["3584"], config, atlas) == 3584


def test_letter_spacing_skips_zero_width(atlas):
    c = RenderConfig(letter_spacing_px=1)
    assert raw_advance("ab", c, atlas) == 4 + 4 + 2
    assert raw_advance("a\u200bb", c, atlas) == 10


def test_strip_shape_and_extents(atlas, config):
    rt = render_strip("Hi there", config, atlas)
    assert rt.strip.shape == (14, measure("Hi there", config, atlas), 3)
    assert rt.total_width_px == rt.strip.shape[1]
    assert len(rt.char_extents) == len("Hi there")
    prev_end = 0
    for a, b in rt.char_extents:
        assert a == prev_end and b >= a
        prev_end = b
    assert prev_end == rt.raw_width_px
    # padding is pure background
    assert np.all(rt.strip[:, rt.raw_width_px:] == 255)


def test_whitespace_has_no_ink(atlas, config):
    rt = render_strip("   \n\t", config, atlas)
    assert ink_pixel_count(rt.strip, config.background) == 0
    assert rt.raw_width_px == 5 * atlas.advance(" ")


def test_glyph_overflow():
    tall = make_atlas("a", line_height=16)
    with pytest.raises(GlyphOverflow):
        render_strip("a", RenderConfig(), tall)


def test_fold_examples(atlas, config, geometry_lines):
    line = geometry_lines["3584"]
    imgs = render(line, config, atlas)
    assert len(imgs) == 1 and imgs[0].shape == (224, 224, 3)
    assert render("", config, atlas) == []
    double = render(line + line, config, atlas)
    assert len(double) == 2
    strip = render_strip(line + line, config, atlas).strip
    assert strip.shape[1] == 7168
    assert ink_pixel_count(strip, config.background) == sum(ink_pixel_count(i, config.background) for i in double)


def test_fold_is_strip_major(atlas, config, geometry_lines):
    rt = render_strip(geometry_lines["3584"], config, atlas)
    img = fold(rt, config)[0]
    for r in range(16):
        assert np.array_equal(img[14 * r:14 * (r + 1)], rt.strip[:, 224 * r:224 * (r + 1)])


def test_image_count_formula(config):
    assert image_count(0, config) == 0
    assert image_count(14, config) == 1
    assert image_count(3584, config) == 1
    assert image_count(3598, config) == 2


def test_fixed_image_policy_pads_and_truncates(atlas, geometry_lines):
    c = RenderConfig(image_count_policy=3)
    imgs = render("hello", c, atlas)
    assert len(imgs) == 3 and np.all(imgs[2] == 255)
    c1 = RenderConfig(image_count_policy=1)
    with pytest.warns(UserWarning):
        assert len(render(geometry_lines["3584"] * 2, c1, atlas)) == 1


def test_fold_provenance_marks_padding(config):
    prov = fold_provenance(3570, config, 1)
    assert prov.shape == (1, 16, 16)
    flat = prov.reshape(-1)
    assert list(flat[:255]) == list(range(255)) and flat[255] == -1


def test_grayscale_channel(atlas):
    c = RenderConfig(channels=1)
    assert render_strip("abc", c, atlas).strip.shape[2] == 1


def test_png_is_deterministic(atlas, config):
    img = render("deterministic", config, atlas)[0]
    assert encode_png(img) == encode_png(img.copy())
    from io import BytesIO

    from PIL import Image

    back = np.asarray(Image.open(BytesIO(encode_png(img))))
    assert np.array_equal(back, img)


@settings(max_examples=150, deadline=None)
@given(a=TEXT, b=TEXT)
def test_width_properties(atlas, a, b):
    config = RenderConfig()
    assert raw_advance(a + b, config, atlas) == raw_advance(a, config, atlas) + raw_advance(b, config, atlas)
    assert measure(a + b, config, atlas) >= measure(a, config, atlas) - 13 + raw_advance(b, config, atlas)
    assert measure(a, config, atlas) % 14 == 0


@settings(max_examples=100, deadline=None)
@given(text=TEXT, data=st.data())
def test_permutation_keeps_advance(atlas, text, data):
    config = RenderConfig()
    perm = data.draw(st.permutations(list(text)))
    assert raw_advance("".join(perm), config, atlas) == raw_advance(text, config, atlas)


@settings(max_examples=60, deadline=None)
@given(text=TEXT)
def test_fold_conserves_ink(atlas, text):
    config = RenderConfig()
    rt = render_strip(text, config, atlas)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        imgs = fold(rt, config)
    assert ink_pixel_count(rt.strip, config.background) == sum(ink_pixel_count(i, config.background) for i in imgs)
    a = render_strip(text, config, atlas).strip
    assert np.array_equal(a, rt.strip)
