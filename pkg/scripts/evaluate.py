"""
Quantitative evaluation against ground-truth masks.

Precision / recall / F-measure per mask, threshold-swept PR curves, batch
runs over an image directory (or a directory of precomputed maps), and
the K_t sensitivity sweep.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

import numpy as np

from cut import apply_threshold, adaptive_threshold, hierarchical_cut, DEFAULT_SMOOTHING_WINDOW
from errors import DatasetError, GeoSalError
from geodesic import TunnelParams
from image_io import (
    READABLE_SUFFIXES,
    BinaryMask,
    load_gray,
    load_image,
    load_mask,
    require_same_shape,
)
from report_writer import (
    CURVE_HEADER,
    IMAGE_CURVE_HEADER,
    PER_IMAGE_HEADER,
    SUMMARY_HEADER,
    build_curve_rows,
    build_per_image_rows,
    build_summary_row,
    write_csv,
)
from reporter import Reporter
from saliency import SaliencyMap, geodesic_saliency, quantize
from validator import DatasetValidator, ensure_valid, validate_beta2, validate_workers

DEFAULT_BETA2 = 0.3
THRESHOLDS = np.arange(256)

PathLike = Union[str, Path]


class Mode(Enum):
    """Binarization protocol for batch runs."""

    ADAPTIVE = "adaptive"  # twice-mean threshold (GS)
    HIERARCHICAL = "hierarchical"  # selected histogram valley (GC)


@dataclass(frozen=True)
class EvalMetrics:
    precision: float
    recall: float
    f_measure: float
    beta2: float = DEFAULT_BETA2


@dataclass(frozen=True, eq=False)
class PrCurve:
    """Precision and recall at every threshold 0..255 (foreground = value > t)."""

    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray

    @property
    def points(self) -> list[tuple[int, float, float]]:
        return [
            (int(t), float(p), float(r))
            for t, p, r in zip(self.thresholds, self.precision, self.recall)
        ]


@dataclass(frozen=True, eq=False)
class ImageResult:
    stem: str
    metrics: EvalMetrics
    threshold: int
    curve: PrCurve


@dataclass
class BatchReport:
    mode: Mode
    k_t: Optional[float]
    results: list[ImageResult] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    mean_precision: float = 0.0
    mean_recall: float = 0.0
    mean_f: float = 0.0
    mean_curve: Optional[PrCurve] = None

    def summary_row(self) -> list:
        return build_summary_row(
            self.mode.value, self.k_t, self.mean_precision, self.mean_recall, self.mean_f
        )


def _ratios(tp, mask_count, truth_count):
    """Vectorized precision/recall with the empty-mask / empty-truth conventions."""
    tp = np.asarray(tp, dtype=np.float64)
    mask_count = np.asarray(mask_count, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(
            mask_count > 0,
            tp / np.maximum(mask_count, 1),
            1.0 if truth_count == 0 else 0.0,
        )
        recall = tp / truth_count if truth_count > 0 else np.ones_like(tp)
    return precision, recall


def precision_recall(mask: BinaryMask, truth: BinaryMask) -> tuple[float, float]:
    """
    Pixel precision and recall of a mask against ground truth.

    Empty mask: precision 1.0 if the truth is empty too, else 0.0.
    Empty truth: recall 1.0.
    """
    require_same_shape(mask, truth, "mask and ground truth")
    tp = int(np.count_nonzero(mask.bits & truth.bits))
    precision, recall = _ratios(tp, mask.count(), truth.count())
    return float(precision), float(recall)


def f_measure(precision: float, recall: float, beta2: float = DEFAULT_BETA2) -> float:
    """(1 + b2) P R / (b2 P + R); 0 when the denominator is 0."""
    denominator = beta2 * precision + recall
    if denominator <= 0:
        return 0.0
    return (1.0 + beta2) * precision * recall / denominator


def evaluate_mask(
    mask: BinaryMask,
    truth: BinaryMask,
    beta2: float = DEFAULT_BETA2,
) -> EvalMetrics:
    precision, recall = precision_recall(mask, truth)
    return EvalMetrics(precision, recall, f_measure(precision, recall, beta2), beta2)


def pr_curve(saliency: SaliencyMap, truth: BinaryMask) -> PrCurve:
    """Precision/recall of apply_threshold(quantize(map), t) for t = 0..255."""
    require_same_shape(saliency, truth, "saliency map and ground truth")
    values = quantize(saliency).values.ravel()
    bits = truth.bits.ravel()

    all_hist = np.bincount(values, minlength=256)
    truth_hist = np.bincount(values[bits], minlength=256)
    # Pixels strictly above t: total minus cumulative count up to t.
    mask_count = all_hist.sum() - np.cumsum(all_hist)
    tp = truth_hist.sum() - np.cumsum(truth_hist)

    precision, recall = _ratios(tp, mask_count, int(bits.sum()))
    return PrCurve(THRESHOLDS.copy(), precision, recall)


def mean_curve(curves: list[PrCurve]) -> Optional[PrCurve]:
    """Pointwise average across images."""
    if not curves:
        return None
    return PrCurve(
        THRESHOLDS.copy(),
        np.mean([c.precision for c in curves], axis=0),
        np.mean([c.recall for c in curves], axis=0),
    )


def choose_threshold(
    saliency: SaliencyMap,
    mode: Mode,
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW,
) -> int:
    if mode == Mode.ADAPTIVE:
        return adaptive_threshold(saliency)
    return hierarchical_cut(saliency, smoothing_window).selected


def evaluate_saliency(
    stem: str,
    saliency: SaliencyMap,
    truth: BinaryMask,
    mode: Mode,
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW,
    beta2: float = DEFAULT_BETA2,
) -> ImageResult:
    require_same_shape(saliency, truth, f"{stem}: saliency map and ground truth")
    threshold = choose_threshold(saliency, mode, smoothing_window)
    mask = apply_threshold(quantize(saliency), threshold)
    return ImageResult(
        stem=stem,
        metrics=evaluate_mask(mask, truth, beta2),
        threshold=threshold,
        curve=pr_curve(saliency, truth),
    )


def list_rasters(directory: PathLike) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError(f"Not a directory: {directory}")
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in READABLE_SUFFIXES
    )


def pair_files(
    source_dir: PathLike,
    truth_dir: PathLike,
    reporter: Reporter,
    stems: Optional[set[str]] = None,
) -> list[tuple[str, Path, Path]]:
    """
    Pair <source_dir>/<stem>.<ext> with <truth_dir>/<stem>.<ext>.

    Unpaired or ambiguous files are reported and left out.
    """
    sources = list_rasters(source_dir)
    truths = list_rasters(truth_dir)
    if not sources:
        raise DatasetError(f"No images found in {source_dir}")

    truth_validator = DatasetValidator()
    truth_by_stem: dict[str, Path] = {}
    for path in truths:
        result = truth_validator.register(path.stem, path.name)
        if not result.is_valid:
            reporter.error(result.error_message, stem=path.stem)
            truth_by_stem.pop(path.stem, None)
            continue
        truth_by_stem[path.stem] = path
    ambiguous_truths = {stem for stem, _, _ in truth_validator.get_duplicates()}

    source_validator = DatasetValidator()
    pairs = []
    for path in sources:
        stem = path.stem
        if stems is not None and stem not in stems:
            continue
        result = source_validator.register(stem, path.name)
        if not result.is_valid:
            reporter.error(result.error_message, stem=stem)
            continue
        if stem in ambiguous_truths:
            continue
        truth = truth_by_stem.get(stem)
        if truth is None:
            reporter.error(f"No ground-truth mask in {truth_dir}", stem=stem, file=str(path))
            continue
        pairs.append((stem, path, truth))

    ambiguous_sources = {stem for stem, _, _ in source_validator.get_duplicates()}
    pairs = [p for p in pairs if p[0] not in ambiguous_sources]

    source_stems = {p.stem for p in sources}
    for stem in sorted(set(truth_by_stem) - source_stems):
        reporter.warning("Ground-truth mask has no matching image", stem=stem)
    return pairs


def _run_pairs(
    pairs: list[tuple[str, Path, Path]],
    produce: Callable[[Path], SaliencyMap],
    modes: list[Mode],
    k_t: Optional[float],
    smoothing_window: int,
    beta2: float,
    workers: int,
    reporter: Reporter,
) -> list[BatchReport]:
    """One report per mode; each image's map is computed once and scored in every mode."""

    def work(stem: str, source: Path, truth_path: Path) -> list[ImageResult]:
        truth = load_mask(truth_path)
        saliency = produce(source)
        return [
            evaluate_saliency(stem, saliency, truth, mode, smoothing_window, beta2)
            for mode in modes
        ]

    reports = [BatchReport(mode=mode, k_t=k_t) for mode in modes]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [(stem, pool.submit(work, stem, src, gt)) for stem, src, gt in pairs]
        # Reporting happens here, on the calling thread, in stem order.
        for stem, future in futures:
            try:
                results = future.result()
            except GeoSalError as e:
                reporter.error(str(e), stem=stem)
            except Exception as e:
                reporter.error(f"Unexpected error: {e}", stem=stem)
            else:
                for report, result in zip(reports, results):
                    report.results.append(result)
                continue
            for report in reports:
                report.skipped.append(stem)

    for report in reports:
        _aggregate(report)
    return reports


def _aggregate(report: BatchReport) -> None:
    report.results.sort(key=lambda r: r.stem)
    if report.results:
        report.mean_precision = float(np.mean([r.metrics.precision for r in report.results]))
        report.mean_recall = float(np.mean([r.metrics.recall for r in report.results]))
        report.mean_f = float(np.mean([r.metrics.f_measure for r in report.results]))
        report.mean_curve = mean_curve([r.curve for r in report.results])


def subset_report(report: BatchReport, stems: set[str]) -> BatchReport:
    """Re-aggregate a report over the given stems only."""
    subset = BatchReport(
        mode=report.mode,
        k_t=report.k_t,
        results=[r for r in report.results if r.stem in stems],
        skipped=[s for s in report.skipped if s in stems],
    )
    _aggregate(subset)
    return subset


def write_reports(report: BatchReport, out_dir: PathLike, per_image_curves: bool = True) -> None:
    """Write per_image.csv, pr_curve.csv, summary.csv (and curves/<stem>.csv)."""
    out_dir = Path(out_dir)
    write_csv(PER_IMAGE_HEADER, build_per_image_rows(report.results), out_dir / "per_image.csv")
    if report.mean_curve is not None:
        c = report.mean_curve
        write_csv(CURVE_HEADER, build_curve_rows(c.thresholds, c.precision, c.recall),
                  out_dir / "pr_curve.csv")
    write_csv(SUMMARY_HEADER, [report.summary_row()], out_dir / "summary.csv")

    if per_image_curves:
        for r in report.results:
            c = r.curve
            write_csv(IMAGE_CURVE_HEADER, build_curve_rows(c.thresholds, c.precision, c.recall),
                      out_dir / "curves" / f"{r.stem}.csv")


def _evaluate_dir(
    source_dir: PathLike,
    truth_dir: PathLike,
    produce: Callable[[Path], SaliencyMap],
    modes: list[Mode],
    k_t: Optional[float],
    smoothing_window: int,
    beta2: float,
    workers: int,
    reporter: Reporter,
    stems: Optional[set[str]] = None,
) -> list[BatchReport]:
    ensure_valid(validate_workers(workers))
    ensure_valid(validate_beta2(beta2))

    pairs = pair_files(source_dir, truth_dir, reporter, stems)
    reports = _run_pairs(pairs, produce, modes, k_t, smoothing_window, beta2, workers, reporter)
    paired = {stem for stem, _, _ in pairs}
    failed = set(reporter.get_failed_items())
    if stems is not None:
        failed &= stems
    for report in reports:
        report.skipped = sorted(set(report.skipped) | (failed - paired))
    return reports


def batch_evaluate(
    image_dir: PathLike,
    truth_dir: PathLike,
    params: Optional[TunnelParams] = None,
    mode: Mode = Mode.HIERARCHICAL,
    out_dir: Optional[PathLike] = None,
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW,
    beta2: float = DEFAULT_BETA2,
    workers: int = 1,
    reporter: Optional[Reporter] = None,
    stems: Optional[set[str]] = None,
) -> BatchReport:
    """
    Compute saliency for every image and score it against its mask.

    Args:
        image_dir: Directory of input images
        truth_dir: Directory of same-stem {0,255} masks
        params: Tunnel parameters
        mode: ADAPTIVE (twice-mean) or HIERARCHICAL (selected valley)
        out_dir: When given, CSV reports are written there
        smoothing_window: Histogram smoothing for HIERARCHICAL
        beta2: F-measure weight
        workers: Thread pool size
        reporter: Receives per-file errors (missing pairs, bad files)
        stems: Optional subset of stems to evaluate

    Returns:
        BatchReport with per-image results sorted by stem
    """
    params = params or TunnelParams()
    [report] = _evaluate_dir(
        image_dir, truth_dir, lambda path: geodesic_saliency(load_image(path), params),
        [mode], params.k_t, smoothing_window, beta2, workers, reporter or Reporter(), stems,
    )
    if out_dir is not None:
        write_reports(report, out_dir)
    return report


def evaluate_maps(
    map_dir: PathLike,
    truth_dir: PathLike,
    mode: Mode = Mode.ADAPTIVE,
    out_dir: Optional[PathLike] = None,
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW,
    beta2: float = DEFAULT_BETA2,
    workers: int = 1,
    reporter: Optional[Reporter] = None,
) -> BatchReport:
    """Score precomputed grayscale saliency maps (any method) against masks."""
    [report] = _evaluate_dir(
        map_dir, truth_dir, lambda path: SaliencyMap.from_gray(load_gray(path)),
        [mode], None, smoothing_window, beta2, workers, reporter or Reporter(),
    )
    if out_dir is not None:
        write_reports(report, out_dir)
    return report


def kt_sweep(
    image_dir: PathLike,
    truth_dir: PathLike,
    k_values: Iterable[float] = (15, 30, 60),
    modes: Iterable[Mode] = (Mode.ADAPTIVE, Mode.HIERARCHICAL),
    base_params: Optional[TunnelParams] = None,
    out_dir: Optional[PathLike] = None,
    summary_name: Optional[str] = "summary.csv",
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW,
    beta2: float = DEFAULT_BETA2,
    workers: int = 1,
    reporter: Optional[Reporter] = None,
    stems: Optional[set[str]] = None,
) -> list[BatchReport]:
    """
    Repeat the batch evaluation for each K_t and mode.

    Each image's saliency is computed once per K_t and scored in every mode.
    Each run's reports go to <out_dir>/k<K_t>_<mode>/; one combined summary
    table (one row per K_t and mode) goes to <out_dir>/<summary_name> unless
    summary_name is None.
    """
    base_params = base_params or TunnelParams()
    reporter = reporter or Reporter()
    modes = list(modes)
    reports = []
    for k_t in k_values:
        params = replace(base_params, k_t=k_t)
        runs = _evaluate_dir(
            image_dir, truth_dir,
            lambda path, params=params: geodesic_saliency(load_image(path), params),
            modes, k_t, smoothing_window, beta2, workers, reporter, stems,
        )
        for report in runs:
            if out_dir is not None:
                write_reports(report, Path(out_dir) / f"k{k_t:g}_{report.mode.value}")
            reporter.notice(
                f"K_t={k_t:g} {report.mode.value}: P={report.mean_precision:.4f} "
                f"R={report.mean_recall:.4f} F={report.mean_f:.4f}"
            )
        reports.extend(runs)

    if out_dir is not None and summary_name is not None:
        write_csv(SUMMARY_HEADER, [r.summary_row() for r in reports],
                  Path(out_dir) / summary_name)
    return reports
