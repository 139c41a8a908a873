"""
Validation rules for run parameters and dataset pairing.

Implements checks for tunnel parameters (K_t, sigma_d, connectivity,
stride), cut settings, worker counts, and duplicate image stems.
"""

import math
from dataclasses import dataclass
from typing import Any, Optional

from errors import ParameterError

MAX_SIGMA_D_RAW = 255.0 * math.sqrt(3.0)


@dataclass
class ValidationResult:
    """Result of a validation check."""

    is_valid: bool
    error_message: str = ""
    warning_message: str = ""


def ensure_valid(result: ValidationResult) -> None:
    """Raise ParameterError for a failed result."""
    if not result.is_valid:
        raise ParameterError(result.error_message)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def validate_k_t(k_t: Any) -> ValidationResult:
    """K_t must be a positive finite number."""
    if not _is_number(k_t) or not math.isfinite(k_t) or k_t <= 0:
        return ValidationResult(
            is_valid=False,
            error_message=f"k_t must be a positive number, got {k_t!r}"
        )
    return ValidationResult(is_valid=True)


def validate_sigma_d(sigma_d_raw: Any) -> ValidationResult:
    """sigma_d_raw must lie in (0, 255*sqrt(3)]."""
    if not _is_number(sigma_d_raw) or not (0 < sigma_d_raw <= MAX_SIGMA_D_RAW):
        return ValidationResult(
            is_valid=False,
            error_message=(
                f"sigma_d_raw must lie in (0, {MAX_SIGMA_D_RAW:.3f}], got {sigma_d_raw!r}"
            )
        )
    return ValidationResult(is_valid=True)


def validate_connectivity(connectivity: Any) -> ValidationResult:
    if connectivity not in (4, 8) or isinstance(connectivity, bool):
        return ValidationResult(
            is_valid=False,
            error_message=f"connectivity must be 4 or 8, got {connectivity!r}"
        )
    return ValidationResult(is_valid=True)


def validate_stride(stride: Optional[int]) -> ValidationResult:
    """Stride is optional (derived); when given it must be a positive int."""
    if stride is None:
        return ValidationResult(is_valid=True)
    if not isinstance(stride, int) or isinstance(stride, bool) or stride < 1:
        return ValidationResult(
            is_valid=False,
            error_message=f"tunnel_stride must be a positive integer, got {stride!r}"
        )
    return ValidationResult(is_valid=True)


def validate_tunnel_params(params: Any) -> ValidationResult:
    """
    Validate a TunnelParams-like object.

    Args:
        params: Object with k_t, sigma_d_raw, connectivity, tunnel_stride

    Returns:
        First failing ValidationResult, or a passing one
    """
    for result in (
        validate_k_t(params.k_t),
        validate_sigma_d(params.sigma_d_raw),
        validate_connectivity(params.connectivity),
        validate_stride(params.tunnel_stride),
    ):
        if not result.is_valid:
            return result

    if params.k_t > 1000:
        return ValidationResult(
            is_valid=True,
            warning_message=f"k_t={params.k_t} leaves no room for tunnels on typical images"
        )
    return ValidationResult(is_valid=True)


def validate_smoothing_window(window: Any) -> ValidationResult:
    if not isinstance(window, int) or isinstance(window, bool) or window < 1:
        return ValidationResult(
            is_valid=False,
            error_message=f"smoothing window must be a positive integer, got {window!r}"
        )
    if window % 2 == 0:
        return ValidationResult(
            is_valid=False,
            error_message=f"smoothing window must be odd, got {window}"
        )
    return ValidationResult(is_valid=True)


def validate_threshold(threshold: Optional[int]) -> ValidationResult:
    if threshold is None:
        return ValidationResult(is_valid=True)
    if not isinstance(threshold, int) or isinstance(threshold, bool) or not (0 <= threshold <= 255):
        return ValidationResult(
            is_valid=False,
            error_message=f"threshold must be an integer in [0, 255], got {threshold!r}"
        )
    return ValidationResult(is_valid=True)


def validate_workers(workers: Any) -> ValidationResult:
    if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
        return ValidationResult(
            is_valid=False,
            error_message=f"workers must be a positive integer, got {workers!r}"
        )
    return ValidationResult(is_valid=True)


def validate_beta2(beta2: Any) -> ValidationResult:
    if not _is_number(beta2) or not math.isfinite(beta2) or beta2 <= 0:
        return ValidationResult(
            is_valid=False,
            error_message=f"beta2 must be a positive number, got {beta2!r}"
        )
    return ValidationResult(is_valid=True)


def validate_params_document(data: Any) -> ValidationResult:
    """A parameter file is a mapping of section name -> mapping of keys."""
    if not isinstance(data, dict):
        return ValidationResult(
            is_valid=False,
            error_message=f"parameter file must be a mapping of sections, got {type(data).__name__}"
        )
    for section, body in data.items():
        if body is not None and not isinstance(body, dict):
            return ValidationResult(
                is_valid=False,
                error_message=f"section '{section}' must be a mapping, got {type(body).__name__}"
            )
    return ValidationResult(is_valid=True)


def validate_k_values(k_values: Any) -> ValidationResult:
    if not isinstance(k_values, (list, tuple)) or not k_values:
        return ValidationResult(
            is_valid=False,
            error_message=f"k_values must be a non-empty list of numbers, got {k_values!r}"
        )
    for k_t in k_values:
        result = validate_k_t(k_t)
        if not result.is_valid:
            return result
    return ValidationResult(is_valid=True)


class ConfigValidator:
    """
    Validator for a complete run configuration.

    Collects every error and warning instead of stopping at the first,
    so the CLI can report them together before any work starts.
    """

    def __init__(self):
        self.validation_errors: list[str] = []
        self.validation_warnings: list[str] = []

    def _record(self, result: ValidationResult) -> None:
        if not result.is_valid:
            self.validation_errors.append(result.error_message)
        if result.warning_message:
            self.validation_warnings.append(result.warning_message)

    def validate(self, config: Any) -> ValidationResult:
        """
        Validate a RunConfig.

        Args:
            config: RunConfig instance

        Returns:
            ValidationResult; error_message joins all collected errors
        """
        self._record(validate_k_t(config.k_t))
        self._record(validate_sigma_d(config.sigma_d_raw))
        self._record(validate_connectivity(config.connectivity))
        self._record(validate_stride(config.tunnel_stride))
        self._record(validate_smoothing_window(config.smoothing_window))
        self._record(validate_threshold(config.threshold))
        self._record(validate_workers(config.workers))
        self._record(validate_beta2(config.beta2))
        self._record(validate_k_values(config.k_values))

        if self.validation_errors:
            return ValidationResult(
                is_valid=False,
                error_message="; ".join(self.validation_errors),
            )
        return ValidationResult(
            is_valid=True,
            warning_message="; ".join(self.validation_warnings),
        )


class DatasetValidator:
    """
    Cross-file validator for a dataset directory.

    Tracks stems to detect two files that would pair with the same mask
    (e.g. scene.png and scene.jpg).
    """

    def __init__(self):
        self.stem_map: dict[str, str] = {}  # stem -> file name
        self.duplicate_pairs: list[tuple[str, str, str]] = []  # (stem, name1, name2)

    def register(self, stem: str, name: str) -> ValidationResult:
        """
        Register a file under its stem.

        Args:
            stem: File stem used for pairing
            name: Full file name

        Returns:
            ValidationResult
        """
        if stem in self.stem_map and self.stem_map[stem] != name:
            self.duplicate_pairs.append((stem, self.stem_map[stem], name))
            return ValidationResult(
                is_valid=False,
                error_message=(
                    f"Duplicate stem '{stem}' used by both '{self.stem_map[stem]}' and '{name}'"
                )
            )

        self.stem_map[stem] = name
        return ValidationResult(is_valid=True)

    def get_duplicates(self) -> list[tuple[str, str, str]]:
        """Get list of duplicate stem pairs."""
        return self.duplicate_pairs
