"""
Unsupervised hierarchical salient-object cut.

The quantized saliency histogram is smoothed and scanned for valleys;
every valley is a candidate threshold, and the one nearest twice the
mean saliency is selected.
"""

from dataclasses import dataclass, field

import numpy as np

from image_io import BinaryMask, GrayMap
from saliency import SaliencyMap, quantize
from validator import ensure_valid, validate_smoothing_window, validate_threshold

HISTOGRAM_BINS = 256
DEFAULT_SMOOTHING_WINDOW = 5


@dataclass(frozen=True)
class CutHierarchy:
    """Ascending valley thresholds, the selected one, and one mask per threshold."""

    thresholds: list[int]
    selected: int
    masks: list[BinaryMask] = field(default_factory=list)
    fallback: bool = False

    def selected_mask(self, gray: GrayMap) -> BinaryMask:
        return apply_threshold(gray, self.selected)


def histogram(gray: GrayMap) -> np.ndarray:
    """256-bin count of 8-bit values."""
    return np.bincount(gray.values.ravel(), minlength=HISTOGRAM_BINS).astype(np.int64)


def smooth_histogram(bins: np.ndarray, window: int = DEFAULT_SMOOTHING_WINDOW) -> np.ndarray:
    """
    Centered moving average with truncated edges.

    Each bin spreads its count evenly over the in-range bins of its
    window, so the total mass is preserved.
    """
    ensure_valid(validate_smoothing_window(window))
    bins = np.asarray(bins, dtype=np.float64)
    if window == 1:
        return bins.copy()
    kernel = np.ones(window)
    in_range = np.convolve(np.ones(len(bins)), kernel, mode="same")
    return np.convolve(bins / in_range, kernel, mode="same")


def find_cut_thresholds(bins: np.ndarray) -> list[int]:
    """
    Strict local minima in bins 1..254, ascending.

    Runs of equal values collapse to one candidate at the run's midpoint;
    a run qualifies only when both neighbouring runs are strictly larger.
    """
    bins = np.asarray(bins, dtype=np.float64)
    # Run boundaries: start index of each maximal run of equal values.
    starts = np.flatnonzero(np.r_[True, bins[1:] != bins[:-1]])
    ends = np.r_[starts[1:] - 1, len(bins) - 1]
    values = bins[starts]

    thresholds = []
    for i in range(1, len(starts) - 1):
        if values[i - 1] > values[i] < values[i + 1]:
            mid = (int(starts[i]) + int(ends[i])) // 2
            if 1 <= mid <= 254:
                thresholds.append(mid)
    return thresholds


def adaptive_threshold(saliency: SaliencyMap) -> int:
    """Twice the mean quantized saliency, clamped to 255 (round half up)."""
    mean = float(np.mean(quantize(saliency).values, dtype=np.float64))
    return int(np.floor(min(2.0 * mean, 255.0) + 0.5))


def select_threshold(candidates: list[int], saliency: SaliencyMap) -> int:
    """Candidate nearest the adaptive threshold; ties go to the lower one."""
    target = adaptive_threshold(saliency)
    if not candidates:
        return target
    return min(sorted(candidates), key=lambda t: (abs(t - target), t))


def apply_threshold(gray: GrayMap, threshold: int) -> BinaryMask:
    """Foreground where value > threshold."""
    ensure_valid(validate_threshold(int(threshold)))
    return BinaryMask(gray.values > threshold)


def hierarchical_cut(
    saliency: SaliencyMap,
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW,
) -> CutHierarchy:
    """
    Cut the saliency map at every histogram valley.

    Args:
        saliency: Saliency map
        smoothing_window: Odd moving-average width for the histogram

    Returns:
        CutHierarchy; with no valleys, selected is the adaptive threshold
        and fallback is True
    """
    gray = quantize(saliency)
    thresholds = find_cut_thresholds(smooth_histogram(histogram(gray), smoothing_window))
    return CutHierarchy(
        thresholds=thresholds,
        selected=select_threshold(thresholds, saliency),
        masks=[apply_threshold(gray, t) for t in thresholds],
        fallback=not thresholds,
    )
