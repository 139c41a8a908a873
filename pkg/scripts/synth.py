"""
Seeded synthetic salient-object scenes with exact ground truth.

Each scene is a centered, smoothly shaded object (disk or rounded
rectangle) over one of three backgrounds:
- flat: a single color
- checker: a two-color lattice of isolated 2x2 checks with a 6 px period
- noise: a base color with low-amplitude per-pixel noise

Backgrounds cycle flat / checker / noise by scene index.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, ImageDraw

from errors import DatasetError, ImageIOError
from image_io import BinaryMask, RgbImage, raw_color_distance, save_image, save_mask
from report_writer import SCENES_HEADER, write_csv

SCENE_WIDTH = 160
SCENE_HEIGHT = 120
BACKGROUNDS = ("flat", "checker", "noise")
TEXTURED = ("checker", "noise")
SHAPES = ("disk", "rounded_rect")

CHECK_PERIOD = 6
CHECK_SIZE = 2
NOISE_AMPLITUDE = 6
SHADE_AMPLITUDE = 8
MIN_CONTRAST = 120.0
BORDER_MARGIN = 6
AREA_RANGE = (0.17, 0.35)

PathLike = Union[str, Path]


@dataclass(frozen=True, eq=False)
class Scene:
    stem: str
    background: str
    shape: str
    image: RgbImage
    truth: BinaryMask

    @property
    def area_fraction(self) -> float:
        return self.truth.count() / float(self.truth.bits.size)


def _random_color(rng: np.random.Generator) -> np.ndarray:
    return rng.integers(40, 216, size=3)


def _pick_palette(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Background, check and object colors.

    Object and check colors sit at least MIN_CONTRAST away from the
    background and each other; the check color is at least as far from
    the background as the object is.
    """
    while True:
        background, check, obj = (_random_color(rng) for _ in range(3))
        d_bg_obj = raw_color_distance(background, obj)
        d_bg_check = raw_color_distance(background, check)
        d_check_obj = raw_color_distance(check, obj)
        if min(d_bg_obj, d_bg_check, d_check_obj) < MIN_CONTRAST:
            continue
        if d_bg_check < d_bg_obj:
            continue
        return background, check, obj


def _object_mask(
    rng: np.random.Generator,
    width: int,
    height: int,
) -> tuple[str, np.ndarray]:
    shape = SHAPES[int(rng.integers(len(SHAPES)))]
    area = float(rng.uniform(*AREA_RANGE)) * width * height

    if shape == "disk":
        radius = np.sqrt(area / np.pi)
        half_w = half_h = radius
    else:
        aspect = float(rng.uniform(1.0, 1.6))
        half_h = np.sqrt(area / aspect) / 2.0
        half_w = half_h * aspect

    half_w = min(half_w, width / 2.0 - BORDER_MARGIN)
    half_h = min(half_h, height / 2.0 - BORDER_MARGIN)
    slack_x = max(0.0, width / 2.0 - BORDER_MARGIN - half_w)
    slack_y = max(0.0, height / 2.0 - BORDER_MARGIN - half_h)
    cx = width / 2.0 + float(rng.uniform(-slack_x, slack_x)) * 0.5
    cy = height / 2.0 + float(rng.uniform(-slack_y, slack_y)) * 0.5

    box = [
        int(round(cx - half_w)), int(round(cy - half_h)),
        int(round(cx + half_w)) - 1, int(round(cy + half_h)) - 1,
    ]
    canvas = Image.new("L", (width, height), 0)
    draw = ImageDraw.Draw(canvas)
    if shape == "disk":
        draw.ellipse(box, fill=255)
    else:
        radius = int(min(half_w, half_h) / 2)
        draw.rounded_rectangle(box, radius=radius, fill=255)
    return shape, np.asarray(canvas) > 0


def _background(
    rng: np.random.Generator,
    kind: str,
    width: int,
    height: int,
    base: np.ndarray,
    check: np.ndarray,
) -> np.ndarray:
    pixels = np.broadcast_to(base, (height, width, 3)).astype(np.int64)
    if kind == "checker":
        ys, xs = np.mgrid[0:height, 0:width]
        checks = ((ys % CHECK_PERIOD) < CHECK_SIZE) & ((xs % CHECK_PERIOD) < CHECK_SIZE)
        pixels[checks] = check
    elif kind == "noise":
        pixels = pixels + rng.integers(
            -NOISE_AMPLITUDE, NOISE_AMPLITUDE + 1, size=(height, width, 3)
        )
    return pixels


def make_scene(
    rng: np.random.Generator,
    background: str,
    stem: str = "scene",
    width: int = SCENE_WIDTH,
    height: int = SCENE_HEIGHT,
) -> Scene:
    """
    Draw one scene.

    Args:
        rng: Random generator (consumed deterministically)
        background: One of BACKGROUNDS
        stem: Scene name
        width: Image width
        height: Image height

    Returns:
        Scene with image and exact object mask
    """
    if background not in BACKGROUNDS:
        raise ValueError(f"Unknown background '{background}', expected one of {BACKGROUNDS}")

    base, check, obj = _pick_palette(rng)
    shape, mask = _object_mask(rng, width, height)
    pixels = _background(rng, background, width, height, base, check)

    # Gentle horizontal shading across the object.
    xs = np.arange(width, dtype=np.float64)
    cols = np.flatnonzero(mask.any(axis=0))
    span = max(1.0, float(cols[-1] - cols[0]))
    shade = np.round(SHADE_AMPLITUDE * (2.0 * (xs - cols[0]) / span - 1.0)).astype(np.int64)
    shaded = obj[None, None, :] + shade[None, :, None]
    pixels = np.where(mask[..., None], shaded, pixels)

    image = RgbImage(np.clip(pixels, 0, 255).astype(np.uint8))
    return Scene(stem=stem, background=background, shape=shape, image=image, truth=BinaryMask(mask))


def generate_scenes(seed: int, count: int) -> list[Scene]:
    rng = np.random.default_rng(seed)
    return [
        make_scene(rng, BACKGROUNDS[i % len(BACKGROUNDS)], stem=f"scene_{i:03d}")
        for i in range(count)
    ]


def synth_generate(seed: int, count: int, out_dir: PathLike) -> list[Scene]:
    """
    Write a seeded synthetic dataset.

    Layout: <out_dir>/images/<stem>.png, <out_dir>/truth/<stem>.png and a
    scenes.csv manifest (stem, background, shape, area_fraction).
    """
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    out_dir = Path(out_dir)
    scenes = generate_scenes(seed, count)
    try:
        for scene in scenes:
            save_image(scene.image, out_dir / "images" / f"{scene.stem}.png")
            save_mask(scene.truth, out_dir / "truth" / f"{scene.stem}.png")
    except ImageIOError as e:
        raise DatasetError(f"Cannot write dataset to {out_dir}: {e}") from e

    rows = [
        [s.stem, s.background, s.shape, f"{s.area_fraction:.4f}"]
        for s in scenes
    ]
    write_csv(SCENES_HEADER, rows, out_dir / "scenes.csv")
    return scenes


def textured_stems(scenes: list[Scene]) -> set[str]:
    return {s.stem for s in scenes if s.background in TEXTURED}
