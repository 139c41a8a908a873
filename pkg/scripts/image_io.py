"""
Pixel-level data types, color distance, and raster file I/O.

Images, masks and grayscale maps are thin immutable wrappers around
numpy arrays in row-major (height, width[, channel]) order. Reading and
writing goes through Pillow.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from errors import (
    DimensionMismatchError,
    ImageReadError,
    ImageWriteError,
    UnsupportedFormatError,
)

PathLike = Union[str, Path]

# Largest raw RGB L2 distance between two 8-bit colors.
MAX_RGB_DISTANCE = 255.0 * math.sqrt(3.0)

READABLE_SUFFIXES = {".png", ".bmp", ".tif", ".tiff", ".jpg", ".jpeg"}
LOSSLESS_SUFFIXES = {".png", ".bmp", ".tif", ".tiff"}
ALPHA_SUFFIXES = {".png", ".tif", ".tiff"}


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class RgbImage:
    """8-bit 3-channel raster, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ValueError(f"RgbImage needs shape (H, W, 3), got {pixels.shape}")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValueError("RgbImage must be at least 1x1")
        if pixels.dtype != np.uint8:
            if np.any(pixels < 0) or np.any(pixels > 255):
                raise ValueError("channel values must lie in [0, 255]")
            pixels = pixels.astype(np.uint8)
        object.__setattr__(self, "pixels", _frozen(pixels))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape[:2]


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Foreground mask, shape (height, width), True = foreground."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits)
        if bits.ndim != 2:
            raise ValueError(f"BinaryMask needs shape (H, W), got {bits.shape}")
        object.__setattr__(self, "bits", _frozen(bits.astype(bool)))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))


@dataclass(frozen=True, eq=False)
class GrayMap:
    """8-bit single-channel map, shape (height, width)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise ValueError(f"GrayMap needs shape (H, W), got {values.shape}")
        if values.dtype != np.uint8:
            if np.any(values < 0) or np.any(values > 255):
                raise ValueError("gray values must lie in [0, 255]")
            values = values.astype(np.uint8)
        object.__setattr__(self, "values", _frozen(values))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def raw_color_distance(a, b) -> np.ndarray:
    """Euclidean RGB distance in 8-bit units; broadcasts over leading axes."""
    diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def color_distance(a, b):
    """
    Normalized color difference in [0, 1].

    Euclidean distance in raw RGB divided by 255*sqrt(3). Accepts single
    triples (returns float) or broadcastable arrays of triples.
    """
    d = raw_color_distance(a, b) / MAX_RGB_DISTANCE
    if np.ndim(d) == 0:
        return float(d)
    return d


def require_same_shape(first, second, what: str = "rasters") -> None:
    """Raise DimensionMismatchError unless both objects share (H, W)."""
    if tuple(first.shape) != tuple(second.shape):
        raise DimensionMismatchError(
            f"{what} differ in size: {tuple(first.shape)} vs {tuple(second.shape)}"
        )


def _check_suffix(path: Path, allowed: set[str], action: str) -> None:
    suffix = path.suffix.lower()
    if suffix not in allowed:
        raise UnsupportedFormatError(
            f"Cannot {action} '{path.name}': format '{suffix or '(none)'}' "
            f"not in {sorted(allowed)}"
        )


def _open(path: PathLike, mode: str) -> np.ndarray:
    path = Path(path)
    _check_suffix(path, READABLE_SUFFIXES, "read")
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert(mode))
    except FileNotFoundError as e:
        raise ImageReadError(f"File not found: {path}") from e
    except UnidentifiedImageError as e:
        raise ImageReadError(f"Not a decodable image: {path}") from e
    except (OSError, ValueError, Image.DecompressionBombError) as e:
        raise ImageReadError(f"Failed to read {path}: {e}") from e


def _save(array: np.ndarray, path: PathLike, allowed: set[str]) -> None:
    path = Path(path)
    _check_suffix(path, allowed, "write")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(np.ascontiguousarray(array, dtype=np.uint8)).save(path)
    except OSError as e:
        raise ImageWriteError(f"Failed to write {path}: {e}") from e


def load_image(path: PathLike) -> RgbImage:
    """Load any supported raster as 8-bit RGB (alpha and palettes are flattened)."""
    return RgbImage(_open(path, "RGB"))


def load_gray(path: PathLike) -> GrayMap:
    """Load a raster as an 8-bit grayscale map."""
    return GrayMap(_open(path, "L"))


def load_mask(path: PathLike) -> BinaryMask:
    """Load a {0,255} mask; anything above 127 counts as foreground."""
    return BinaryMask(_open(path, "L") > 127)


def save_image(image: RgbImage, path: PathLike) -> None:
    _save(image.pixels, path, LOSSLESS_SUFFIXES | {".jpg", ".jpeg"})


def save_gray(gray: GrayMap, path: PathLike) -> None:
    _save(gray.values, path, LOSSLESS_SUFFIXES)


def save_mask(mask: BinaryMask, path: PathLike) -> None:
    _save(np.where(mask.bits, 255, 0).astype(np.uint8), path, LOSSLESS_SUFFIXES)


def save_rgba(image: RgbImage, mask: BinaryMask, path: PathLike) -> None:
    """Write the image with alpha 255 inside the mask and 0 outside."""
    require_same_shape(image, mask, "image and mask")
    alpha = np.where(mask.bits, 255, 0).astype(np.uint8)
    rgba = np.dstack([image.pixels, alpha])
    _save(rgba, path, ALPHA_SUFFIXES)
