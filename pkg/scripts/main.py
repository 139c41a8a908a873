#!/usr/bin/env python3
"""
Command-line front end for geodesic saliency.

Subcommands:
1. saliency - write the grayscale saliency map (optionally false-colored)
2. cut      - write the selected cut mask and one mask per hierarchy level
3. extract  - write an RGBA cutout of the selected foreground
4. eval     - score a directory of images (or precomputed maps) against masks
5. bench    - generate the synthetic set and run the K_t sweep
"""

import argparse
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

import yaml

# Add scripts directory and project root to path
sys.path.insert(0, str(Path(__file__).parent))
sys.path.insert(1, str(Path(__file__).parent.parent))

import config
from cut import apply_threshold, hierarchical_cut
from errors import DatasetError, GeoSalError, ImageIOError, ParameterError
from evaluate import Mode, batch_evaluate, evaluate_maps, kt_sweep, subset_report, write_reports
from geodesic import TunnelParams
from image_io import load_image, save_gray, save_image, save_mask, save_rgba
from report_writer import SUMMARY_HEADER, write_csv
from reporter import Reporter
from saliency import geodesic_saliency, quantize, rect_seeds, render_false_color
from synth import synth_generate, textured_stems
from validator import ConfigValidator, ensure_valid, validate_params_document

EXIT_OK = 0
EXIT_IO_ERROR = 1
EXIT_USAGE = 2  # argparse
EXIT_VALIDATION = 3
EXIT_PARTIAL = 4


@dataclass
class RunConfig:
    """Resolved settings for one command invocation."""

    command: str = ""
    input: Optional[str] = None
    truth: Optional[str] = None
    output: Optional[str] = None
    k_t: float = config.k_t
    sigma_d_raw: float = config.sigma_d_raw
    connectivity: int = config.connectivity
    tunnel_stride: Optional[int] = config.tunnel_stride
    exact_tunnels: bool = config.exact_tunnels
    smoothing_window: int = config.smoothing_window
    threshold: Optional[int] = None
    mode: str = config.mode
    maps: bool = False
    classic: bool = False
    ground_rect: Optional[tuple[int, int, int, int]] = None
    false_color: Optional[str] = None
    seed: int = config.synth_seed
    count: int = config.synth_count
    k_values: list[float] = field(default_factory=lambda: list(config.sweep_k_values))
    workers: int = 1
    beta2: float = config.beta2
    quiet: bool = False

    def tunnel_params(self) -> TunnelParams:
        return TunnelParams(
            k_t=self.k_t,
            sigma_d_raw=self.sigma_d_raw,
            connectivity=self.connectivity,
            tunnel_stride=self.tunnel_stride,
            exact_tunnels=self.exact_tunnels,
        )


# params.yaml section/key -> RunConfig attribute
YAML_KEYS = {
    ("tunnel", "k_t"): "k_t",
    ("tunnel", "sigma_d_raw"): "sigma_d_raw",
    ("tunnel", "connectivity"): "connectivity",
    ("tunnel", "tunnel_stride"): "tunnel_stride",
    ("tunnel", "exact_tunnels"): "exact_tunnels",
    ("cut", "smoothing_window"): "smoothing_window",
    ("eval", "mode"): "mode",
    ("eval", "beta2"): "beta2",
    ("eval", "workers"): "workers",
    ("bench", "seed"): "seed",
    ("bench", "count"): "count",
    ("bench", "k_values"): "k_values",
}


def load_yaml_config(config_path: str) -> dict[str, Any]:
    """Load and parse YAML configuration."""
    with open(config_path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def _number_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _rect(text: str) -> tuple[int, int, int, int]:
    try:
        x0, y0, x1, y1 = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x0,y0,x1,y1, got '{text}'")
    return x0, y0, x1, y1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geosal",
        description="Geodesic-tunneling saliency, hierarchical cut and evaluation.",
    )
    # Every tunable defaults to None so that unset flags fall through to YAML.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="YAML parameter file (default: params.yaml)")
    common.add_argument("--k-t", dest="k_t", type=float, help="tunnel reach divisor K_t")
    common.add_argument("--sigma-d", dest="sigma_d_raw", type=float,
                        help="raw RGB L2 budget for tunnel endpoints")
    common.add_argument("--connectivity", type=int, choices=(4, 8))
    common.add_argument("--tunnel-stride", type=int)
    common.add_argument("--exact-tunnels", action=argparse.BooleanOptionalAction, default=None,
                        help="enumerate the full tunnel disc (--no-exact-tunnels to sample)")
    common.add_argument("--smoothing-window", type=int)
    common.add_argument("-q", "--quiet", action="store_true", help="hide notices")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("saliency", parents=[common], help="write the saliency map")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="output map (.png)")
    p.add_argument("--false-color", help="also write a jet-colored render here")
    p.add_argument("--ground-rect", type=_rect,
                   help="use the outline of x0,y0,x1,y1 as ground instead of the borders")
    p.add_argument("--classic", action="store_true", help="disable tunneling")

    p = sub.add_parser("cut", parents=[common], help="write cut masks")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="output directory")
    p.add_argument("--threshold", type=int, help="manual threshold (overrides selection)")

    p = sub.add_parser("extract", parents=[common], help="write an RGBA foreground cutout")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="output image (.png)")
    p.add_argument("--threshold", type=int, help="manual threshold (overrides selection)")

    p = sub.add_parser("eval", parents=[common], help="evaluate a dataset")
    p.add_argument("input", help="image directory (or map directory with --maps)")
    p.add_argument("truth", help="ground-truth mask directory")
    p.add_argument("-o", "--output", help="report directory")
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--maps", action="store_true",
                   help="input holds precomputed grayscale saliency maps")
    p.add_argument("--workers", type=int)
    p.add_argument("--beta2", type=float)

    p = sub.add_parser("bench", parents=[common], help="synthetic benchmark and K_t sweep")
    p.add_argument("-o", "--output", help="benchmark directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--k-values", type=_number_list, help="comma-separated K_t values")
    p.add_argument("--workers", type=int)
    p.add_argument("--beta2", type=float)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < YAML parameter file < explicit flags."""
    run = RunConfig(command=args.command, workers=config.workers())

    params_path = getattr(args, "params", None) or config.params_file()
    if Path(params_path).is_file():
        data = load_yaml_config(params_path)
        ensure_valid(validate_params_document(data))
        for (section, key), attr in YAML_KEYS.items():
            value = (data.get(section) or {}).get(key, ...)
            if value is not ...:
                setattr(run, attr, value)
    elif getattr(args, "params", None):
        raise ImageIOError(f"Parameter file not found: {params_path}")

    names = {f.name for f in fields(RunConfig)}
    for key, value in vars(args).items():
        if key in names and value is not None and key != "command":
            setattr(run, key, value)
    return run


def _default_output(run: RunConfig, suffix: str) -> Path:
    if run.output:
        return Path(run.output)
    return Path(config.output_dir()) / f"{Path(run.input).stem}{suffix}"


def cmd_saliency(run: RunConfig, reporter: Reporter) -> int:
    image = load_image(run.input)
    seeds = None
    if run.ground_rect is not None:
        seeds = rect_seeds(image.width, image.height, *run.ground_rect)

    saliency = geodesic_saliency(image, run.tunnel_params(), seeds, tunneling=not run.classic)
    output = _default_output(run, "_saliency.png")
    save_gray(quantize(saliency), output)
    reporter.notice(f"Wrote saliency map {output}")

    if run.false_color:
        save_image(render_false_color(saliency), run.false_color)
        reporter.notice(f"Wrote false-color render {run.false_color}")
    return EXIT_OK


def _select(run: RunConfig, reporter: Reporter, image):
    saliency = geodesic_saliency(image, run.tunnel_params())
    hierarchy = hierarchical_cut(saliency, run.smoothing_window)
    gray = quantize(saliency)

    if run.threshold is not None:
        threshold = run.threshold
        reporter.notice(f"Using manual threshold {threshold}")
    else:
        threshold = hierarchy.selected
        if hierarchy.fallback:
            reporter.notice(
                f"No histogram valleys; falling back to adaptive threshold {threshold}"
            )
        else:
            reporter.notice(
                f"Cut candidates {hierarchy.thresholds}, selected {threshold}"
            )
    return hierarchy, threshold, apply_threshold(gray, threshold)


def cmd_cut(run: RunConfig, reporter: Reporter) -> int:
    image = load_image(run.input)
    hierarchy, _, mask = _select(run, reporter, image)

    out_dir = Path(run.output) if run.output else Path(config.output_dir())
    stem = Path(run.input).stem
    save_mask(mask, out_dir / f"{stem}_cut.png")
    for t, level in zip(hierarchy.thresholds, hierarchy.masks):
        save_mask(level, out_dir / f"{stem}_level_{t:03d}.png")
    reporter.notice(f"Wrote {1 + len(hierarchy.masks)} mask(s) to {out_dir}")
    return EXIT_OK


def cmd_extract(run: RunConfig, reporter: Reporter) -> int:
    image = load_image(run.input)
    _, _, mask = _select(run, reporter, image)
    output = _default_output(run, "_cutout.png")
    save_rgba(image, mask, output)
    reporter.notice(f"Wrote cutout {output} ({mask.count()} foreground pixels)")
    return EXIT_OK


def cmd_eval(run: RunConfig, reporter: Reporter) -> int:
    out_dir = Path(run.output) if run.output else Path(config.output_dir())
    mode = Mode(run.mode)
    if run.maps:
        report = evaluate_maps(
            run.input, run.truth, mode, out_dir,
            run.smoothing_window, run.beta2, run.workers, reporter,
        )
    else:
        report = batch_evaluate(
            run.input, run.truth, run.tunnel_params(), mode, out_dir,
            run.smoothing_window, run.beta2, run.workers, reporter,
        )
    reporter.notice(
        f"{len(report.results)} image(s) scored, {len(report.skipped)} skipped: "
        f"P={report.mean_precision:.4f} R={report.mean_recall:.4f} F={report.mean_f:.4f}"
    )
    return EXIT_PARTIAL if reporter.has_failures() else EXIT_OK


def cmd_bench(run: RunConfig, reporter: Reporter) -> int:
    out_dir = Path(run.output) if run.output else Path(config.output_dir())
    dataset = out_dir / "dataset"
    scenes = synth_generate(run.seed, run.count, dataset)
    reporter.notice(f"Generated {len(scenes)} scene(s) in {dataset}")

    reports = kt_sweep(
        dataset / "images", dataset / "truth", run.k_values,
        (Mode.ADAPTIVE, Mode.HIERARCHICAL), run.tunnel_params(), out_dir / "runs",
        None, run.smoothing_window, run.beta2, run.workers, reporter,
    )
    write_csv(SUMMARY_HEADER, [r.summary_row() for r in reports], out_dir / "summary.csv")

    textured = textured_stems(scenes)
    subsets = [subset_report(r, textured) for r in reports]
    for subset in subsets:
        write_reports(subset, out_dir / "textured" / f"k{subset.k_t:g}_{subset.mode.value}",
                      per_image_curves=False)
    write_csv(SUMMARY_HEADER, [s.summary_row() for s in subsets],
              out_dir / "textured" / "summary.csv")
    reporter.notice(f"Wrote benchmark summaries to {out_dir}")
    return EXIT_PARTIAL if reporter.has_failures() else EXIT_OK


COMMANDS = {
    "saliency": cmd_saliency,
    "cut": cmd_cut,
    "extract": cmd_extract,
    "eval": cmd_eval,
    "bench": cmd_bench,
}


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    reporter = Reporter(quiet=bool(getattr(args, "quiet", False)))

    try:
        run = resolve_config(args)
    except (OSError, ImageIOError, yaml.YAMLError) as e:
        reporter.error(f"Failed to load parameters: {e}")
        return EXIT_IO_ERROR
    except ParameterError as e:
        reporter.error(f"Invalid parameter file: {e}")
        return EXIT_VALIDATION

    result = ConfigValidator().validate(run)
    if not result.is_valid:
        reporter.error(f"Invalid parameters: {result.error_message}")
        return EXIT_VALIDATION
    if result.warning_message:
        reporter.warning(result.warning_message)

    try:
        code = COMMANDS[run.command](run, reporter)
    except (ImageIOError, DatasetError) as e:
        reporter.error(str(e))
        code = EXIT_IO_ERROR
    except (GeoSalError, ValueError) as e:
        reporter.error(str(e))
        code = EXIT_VALIDATION

    if run.command in ("eval", "bench"):
        reporter.print_summary()
    return code


if __name__ == "__main__":
    sys.exit(main())
