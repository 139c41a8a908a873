"""
Border-grounded geodesic saliency.

The four image borders act as the geodesic ground; each pixel's saliency
is its tunneled geodesic distance to the border, divided by the largest
such distance in the image.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from matplotlib import colormaps

from errors import InvalidSeedError
from geodesic import (
    SeedSet,
    TunnelParams,
    classic_geodesic_transform,
    tunneling_geodesic_transform,
)
from image_io import GrayMap, RgbImage


@dataclass(frozen=True, eq=False)
class SaliencyMap:
    """Per-pixel saliency in [0, 1], shape (height, width)."""

    s: np.ndarray

    def __post_init__(self) -> None:
        s = np.array(self.s, dtype=np.float64, copy=True)
        if s.ndim != 2:
            raise ValueError(f"SaliencyMap needs shape (H, W), got {s.shape}")
        if s.size and (np.min(s) < 0.0 or np.max(s) > 1.0):
            raise ValueError("saliency values must lie in [0, 1]")
        s.flags.writeable = False
        object.__setattr__(self, "s", s)

    @property
    def width(self) -> int:
        return self.s.shape[1]

    @property
    def height(self) -> int:
        return self.s.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.s.shape

    @property
    def quantized(self) -> GrayMap:
        return quantize(self)

    @classmethod
    def from_gray(cls, gray: GrayMap) -> "SaliencyMap":
        """Wrap an 8-bit map (e.g. an externally computed one) as saliency."""
        return cls(gray.values.astype(np.float64) / 255.0)


def border_seeds(width: int, height: int) -> SeedSet:
    """All pixels with x in {0, width-1} or y in {0, height-1}."""
    if width < 1 or height < 1:
        raise InvalidSeedError(f"Image must be at least 1x1, got {width}x{height}")
    border = np.zeros((height, width), dtype=bool)
    border[0, :] = border[-1, :] = True
    border[:, 0] = border[:, -1] = True
    return SeedSet(np.argwhere(border))


def rect_seeds(width: int, height: int, x0: int, y0: int, x1: int, y1: int) -> SeedSet:
    """
    Outline of a user rectangle as the ground (corners inclusive).

    Args:
        width: Image width
        height: Image height
        x0, y0: Top-left corner
        x1, y1: Bottom-right corner

    Returns:
        SeedSet with the rectangle's perimeter pixels
    """
    if not (0 <= x0 <= x1 < width and 0 <= y0 <= y1 < height):
        raise InvalidSeedError(
            f"Rectangle ({x0},{y0})-({x1},{y1}) not inside {width}x{height} image"
        )
    outline = np.zeros((height, width), dtype=bool)
    outline[y0, x0:x1 + 1] = outline[y1, x0:x1 + 1] = True
    outline[y0:y1 + 1, x0] = outline[y0:y1 + 1, x1] = True
    return SeedSet(np.argwhere(outline))


def normalize(g: np.ndarray) -> np.ndarray:
    """Divide by the maximum; an all-zero field stays zero."""
    peak = float(np.max(g)) if g.size else 0.0
    if peak <= 0.0:
        return np.zeros_like(g, dtype=np.float64)
    return np.clip(g / peak, 0.0, 1.0)


def geodesic_saliency(
    image: RgbImage,
    params: Optional[TunnelParams] = None,
    seeds: Optional[SeedSet] = None,
    tunneling: bool = True,
) -> SaliencyMap:
    """
    Geodesic saliency map of an image.

    Args:
        image: Input image
        params: Tunnel parameters (defaults: K_t=30, sigma_d_raw=24)
        seeds: Ground pixels; defaults to the four borders
        tunneling: False falls back to the classic transform

    Returns:
        SaliencyMap normalized by its maximum
    """
    params = params or TunnelParams()
    if seeds is None:
        seeds = border_seeds(image.width, image.height)

    if tunneling:
        field = tunneling_geodesic_transform(image, seeds, params)
    else:
        field = classic_geodesic_transform(image, seeds, params.connectivity)
    return SaliencyMap(normalize(field.g))


def quantize(saliency: SaliencyMap) -> GrayMap:
    """round(s * 255), half-up."""
    return GrayMap(np.floor(saliency.s * 255.0 + 0.5).astype(np.uint8))


def render_false_color(saliency: SaliencyMap, colormap: str = "jet") -> RgbImage:
    """Visualization only; never fed back into computation."""
    rgba = colormaps[colormap](quantize(saliency).values)
    return RgbImage(np.round(rgba[..., :3] * 255.0).astype(np.uint8))
