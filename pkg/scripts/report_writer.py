"""
CSV report builder for evaluation runs.

Constructs the per-image, PR-curve and summary tables and writes them
as CSV files.
"""

import csv
from pathlib import Path
from typing import Any, Iterable, Union

from errors import DatasetError

PER_IMAGE_HEADER = ["stem", "precision", "recall", "f", "threshold"]
CURVE_HEADER = ["threshold", "mean_precision", "mean_recall"]
IMAGE_CURVE_HEADER = ["threshold", "precision", "recall"]
SUMMARY_HEADER = ["mode", "k_t", "mean_p", "mean_r", "mean_f"]
SCENES_HEADER = ["stem", "background", "shape", "area_fraction"]

FLOAT_FORMAT = "{:.6f}"


def _fmt(value: Any) -> Any:
    if isinstance(value, float):
        return FLOAT_FORMAT.format(value)
    return value


def build_per_image_rows(results: Iterable[Any]) -> list[list[Any]]:
    """
    Build per-image rows.

    Args:
        results: ImageResult objects (stem, metrics, threshold)

    Returns:
        Rows sorted by stem
    """
    rows = []
    for r in sorted(results, key=lambda r: r.stem):
        rows.append([
            r.stem,
            _fmt(r.metrics.precision),
            _fmt(r.metrics.recall),
            _fmt(r.metrics.f_measure),
            r.threshold,
        ])
    return rows


def build_curve_rows(thresholds, precision, recall) -> list[list[Any]]:
    """One row per threshold of a (mean or per-image) PR curve."""
    return [
        [int(t), _fmt(float(p)), _fmt(float(r))]
        for t, p, r in zip(thresholds, precision, recall)
    ]


def build_summary_row(
    mode: str,
    k_t: Any,
    mean_p: float,
    mean_r: float,
    mean_f: float,
) -> list[Any]:
    """Single summary row; k_t is blank for externally supplied maps."""
    if isinstance(k_t, float) and k_t.is_integer():
        k_t = int(k_t)
    return [mode, "" if k_t is None else k_t, _fmt(mean_p), _fmt(mean_r), _fmt(mean_f)]


def validate_report_structure(
    header: list[str],
    rows: list[list[Any]],
) -> tuple[bool, list[str]]:
    """
    Validate table shape before writing.

    Args:
        header: Column names
        rows: Table rows

    Returns:
        Tuple of (is_valid, list of errors)
    """
    errors = []

    if not header:
        errors.append("Missing header")
    if len(set(header)) != len(header):
        errors.append("Duplicate column names in header")

    for i, row in enumerate(rows):
        if len(row) != len(header):
            errors.append(f"Row {i} has {len(row)} fields, expected {len(header)}")

    return (len(errors) == 0, errors)


def write_csv(
    header: list[str],
    rows: list[list[Any]],
    output_path: Union[str, Path],
) -> None:
    """
    Write a table to a CSV file.

    Args:
        header: Column names
        rows: Table rows
        output_path: Output file path
    """
    is_valid, errors = validate_report_structure(header, rows)
    if not is_valid:
        raise ValueError(f"Malformed report {output_path}: {'; '.join(errors)}")

    output_path = Path(output_path)
    try:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise DatasetError(f"Failed to write {output_path}: {e}") from e


def read_csv(path: Union[str, Path]) -> list[dict[str, str]]:
    """Read a CSV written by write_csv into dict rows."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))
