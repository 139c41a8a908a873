"""Image builders shared by the tests."""

import numpy as np

from image_io import RgbImage
from saliency import SaliencyMap


def palette_image(rng, height, width, colors=3, jitter=6):
    """Few base colors plus small jitter, so tunnel edges actually occur."""
    palette = rng.integers(0, 256, size=(colors, 3))
    index = rng.integers(colors, size=(height, width))
    noise = rng.integers(-jitter, jitter + 1, size=(height, width, 3))
    return RgbImage(np.clip(palette[index] + noise, 0, 255).astype(np.uint8))


def uniform_image(height, width, color=(90, 140, 200)):
    return RgbImage(np.broadcast_to(np.array(color, dtype=np.uint8), (height, width, 3)))


def disk_image(size=64, radius=16, background=(40, 120, 40), color=(220, 60, 60)):
    """Centered disk on a flat background; returns (image, disk mask)."""
    ys, xs = np.mgrid[0:size, 0:size]
    center = (size - 1) / 2.0
    disk = (ys - center) ** 2 + (xs - center) ** 2 <= radius ** 2
    pixels = np.where(disk[..., None], np.array(color), np.array(background))
    return RgbImage(pixels.astype(np.uint8)), disk


def nested_squares_image(size=60):
    """Black background, gray ring, light-gray core: a three-level saliency."""
    pixels = np.zeros((size, size, 3), dtype=np.uint8)
    pixels[10:size - 10, 10:size - 10] = 100
    pixels[20:size - 20, 20:size - 20] = 200
    return RgbImage(pixels)


def gray_levels_map(values):
    """SaliencyMap whose quantized view equals the given 8-bit array."""
    return SaliencyMap(np.asarray(values, dtype=np.float64) / 255.0)


def checkerboard_disk_image(size=96, cell=3, radius=20,
                            colors=((30, 30, 30), (230, 230, 230)), disk=(200, 40, 40)):
    """Disk over a two-color checkerboard with square cells; returns (image, disk mask)."""
    ys, xs = np.mgrid[0:size, 0:size]
    parity = ((ys // cell) + (xs // cell)) % 2
    pixels = np.where(parity[..., None] == 0, np.array(colors[0]), np.array(colors[1]))
    center = (size - 1) / 2.0
    inside = (ys - center) ** 2 + (xs - center) ** 2 <= radius ** 2
    pixels = np.where(inside[..., None], np.array(disk), pixels)
    return RgbImage(pixels.astype(np.uint8)), inside
