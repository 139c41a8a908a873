"""Tests for the seeded synthetic scene generator."""

import numpy as np
import pytest

from image_io import load_image, load_mask, raw_color_distance
from report_writer import SCENES_HEADER, read_csv
from synth import (
    BACKGROUNDS,
    BORDER_MARGIN,
    MIN_CONTRAST,
    SCENE_HEIGHT,
    SCENE_WIDTH,
    generate_scenes,
    make_scene,
    synth_generate,
    textured_stems,
)


@pytest.fixture(scope="module")
def scenes():
    return generate_scenes(seed=0, count=12)


def test_backgrounds_cycle(scenes):
    assert [s.background for s in scenes] == [BACKGROUNDS[i % 3] for i in range(12)]
    assert [s.stem for s in scenes[:2]] == ["scene_000", "scene_001"]


def test_scene_geometry(scenes):
    for scene in scenes:
        assert scene.image.shape == (SCENE_HEIGHT, SCENE_WIDTH)
        assert scene.truth.shape == (SCENE_HEIGHT, SCENE_WIDTH)
        assert 0.15 <= scene.area_fraction <= 0.5

        bits = scene.truth.bits
        m = BORDER_MARGIN
        assert not bits[:m].any() and not bits[-m:].any()
        assert not bits[:, :m].any() and not bits[:, -m:].any()


def test_object_contrasts_with_background(scenes):
    for scene in scenes:
        pixels = scene.image.pixels.astype(np.float64)
        inside = pixels[scene.truth.bits].mean(axis=0)
        outside = np.median(pixels[~scene.truth.bits], axis=0)
        assert raw_color_distance(inside, outside) >= MIN_CONTRAST - 20


def test_flat_background_is_single_color(scenes):
    flat = next(s for s in scenes if s.background == "flat")
    outside = flat.image.pixels[~flat.truth.bits]
    assert len(np.unique(outside, axis=0)) == 1


def test_checker_background_has_two_colors(scenes):
    checker = next(s for s in scenes if s.background == "checker")
    outside = checker.image.pixels[~checker.truth.bits]
    assert len(np.unique(outside, axis=0)) == 2


def test_same_seed_same_scenes():
    first = generate_scenes(seed=4, count=3)
    second = generate_scenes(seed=4, count=3)
    for a, b in zip(first, second):
        assert np.array_equal(a.image.pixels, b.image.pixels)
        assert np.array_equal(a.truth.bits, b.truth.bits)


def test_different_seed_differs():
    a = generate_scenes(seed=1, count=1)[0]
    b = generate_scenes(seed=2, count=1)[0]
    assert not np.array_equal(a.image.pixels, b.image.pixels)


def test_unknown_background():
    with pytest.raises(ValueError):
        make_scene(np.random.default_rng(0), "stripes")


def test_textured_stems(scenes):
    stems = textured_stems(scenes)
    assert "scene_000" not in stems
    assert {"scene_001", "scene_002"} <= stems


def test_written_dataset_is_byte_identical(tmp_path):
    synth_generate(9, 4, tmp_path / "one")
    synth_generate(9, 4, tmp_path / "two")
    files = sorted(p.relative_to(tmp_path / "one") for p in (tmp_path / "one").rglob("*") if p.is_file())
    assert len(files) == 4 * 2 + 1
    for rel in files:
        assert (tmp_path / "one" / rel).read_bytes() == (tmp_path / "two" / rel).read_bytes()


def test_written_dataset_round_trips(tmp_path):
    scenes = synth_generate(3, 2, tmp_path)
    for scene in scenes:
        image = load_image(tmp_path / "images" / f"{scene.stem}.png")
        truth = load_mask(tmp_path / "truth" / f"{scene.stem}.png")
        assert np.array_equal(image.pixels, scene.image.pixels)
        assert np.array_equal(truth.bits, scene.truth.bits)

    rows = read_csv(tmp_path / "scenes.csv")
    assert list(rows[0].keys()) == SCENES_HEADER
    assert [row["stem"] for row in rows] == ["scene_000", "scene_001"]
