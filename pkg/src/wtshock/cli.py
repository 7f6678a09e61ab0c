"""Command-line pipeline driver.

Subcommands: solve, detect, lipschitz, verify, full, print-defaults.
Exit codes: 0 success (verify: aligned), 1 error, 2 verification failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .config import ConfigError, PipelineConfig, config_to_json, default_config, load_config
from .characteristics import lines_to_table, report_to_text
from .grids import Field2D, Signal1D, atomic_write_text, field_to_text, read_field, sample_initial_data
from .lipschitz import estimates_to_table
from .pipeline import (
    DetectionResult,
    build_grid,
    detect_stage,
    lipschitz_stage,
    solve_stage,
    verify_stage,
)
from .wtmm import chains_to_table

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_ALIGNED = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wtshock",
        description="Detect weak wave-equation shocks via wavelet modulus maxima.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", metavar="PATH", help="JSON configuration file")
        p.add_argument("--out", metavar="DIR", help="output directory override")
        p.add_argument(
            "--scales",
            metavar="JMIN..JMAX",
            help="dyadic scale range override, e.g. 1..5",
        )
        p.add_argument("--threshold", type=float, help="relative maxima threshold override")
        p.add_argument(
            "--boundary", choices=("reflect", "zero"), help="convolution boundary override"
        )

    add_common(sub.add_parser("solve", help="solve the Cauchy problem, write a FIELD2D dump"))
    p_detect = sub.add_parser("detect", help="run WTMM detection, write maxima/chain tables")
    add_common(p_detect)
    p_detect.add_argument("--field", metavar="PATH", help="FIELD2D input (skip solving)")
    p_lip = sub.add_parser("lipschitz", help="estimate Lipschitz exponents of a 1D signal")
    add_common(p_lip)
    p_lip.add_argument("--field", metavar="PATH", help="FIELD2D input; the signal is one row")
    p_lip.add_argument("--row", type=int, default=0, help="row index to analyze (with --field)")
    p_verify = sub.add_parser("verify", help="verify ridge/characteristic alignment")
    add_common(p_verify)
    p_verify.add_argument("--field", metavar="PATH", help="FIELD2D input (skip solving)")
    p_full = sub.add_parser("full", help="solve + detect + lipschitz + verify")
    add_common(p_full)
    sub.add_parser("print-defaults", help="print the default configuration as JSON")
    return parser


def _resolve_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else default_config()
    updates = {}
    if args.out:
        updates["output_dir"] = args.out
    if args.scales:
        try:
            j_min_s, j_max_s = args.scales.split("..")
            scales = dataclasses.replace(cfg.scales, j_min=int(j_min_s), j_max=int(j_max_s))
        except ValueError as exc:
            raise ConfigError(f"bad --scales value {args.scales!r} (expected JMIN..JMAX)") from exc
        updates["scales"] = scales
    detect_updates = {}
    if args.threshold is not None:
        detect_updates["threshold_rel"] = args.threshold
    if args.boundary is not None:
        detect_updates["boundary"] = args.boundary
    if detect_updates:
        updates["detect"] = dataclasses.replace(cfg.detect, **detect_updates)
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    from .config import validate

    validate(cfg)
    return cfg


def _out_path(cfg: PipelineConfig, name: str) -> str:
    return os.path.join(cfg.output_dir, name)


def _get_field(cfg: PipelineConfig, args) -> Field2D:
    if getattr(args, "field", None):
        return read_field(args.field)
    return solve_stage(cfg)


def _write_detection(cfg: PipelineConfig, det: DetectionResult) -> None:
    atomic_write_text(_out_path(cfg, "surface.txt"), field_to_text(det.surface))
    det.gradient.export(cfg.output_dir, "gradient", cfg.detect.boundary)
    atomic_write_text(_out_path(cfg, "ridges.txt"), chains_to_table(det.ridges))
    atomic_write_text(_out_path(cfg, "scale_chains.txt"), chains_to_table(det.scale_chains))
    atomic_write_text(_out_path(cfg, "estimates.txt"), estimates_to_table(det.estimates))
    manifest = {
        "sigma": det.sigma,
        "surface": cfg.detect.surface,
        "boundary": cfg.detect.boundary,
        "threshold_rel": cfg.detect.threshold_rel,
        "n_maxima": len(det.maxima),
        "n_ridges": len(det.ridges),
        "reference_row": det.reference_row,
    }
    atomic_write_text(
        _out_path(cfg, "detect_manifest.json"),
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    )


def cmd_solve(cfg: PipelineConfig) -> int:
    fld = solve_stage(cfg)
    atomic_write_text(_out_path(cfg, "field.txt"), field_to_text(fld))
    return EXIT_OK


def cmd_detect(cfg: PipelineConfig, args) -> int:
    det = detect_stage(cfg, _get_field(cfg, args))
    _write_detection(cfg, det)
    return EXIT_OK


def cmd_lipschitz(cfg: PipelineConfig, args) -> int:
    if getattr(args, "field", None):
        fld = read_field(args.field)
        if not 0 <= args.row < fld.grid.m:
            raise ConfigError(f"--row {args.row} out of range 0..{fld.grid.m - 1}")
        signal = fld.row(args.row)
    else:
        if cfg.problem.phi is None:
            raise ConfigError("lipschitz needs either --field or a problem.phi datum")
        signal = sample_initial_data(cfg.problem.phi.to_spec(), build_grid(cfg).x)
    result = lipschitz_stage(cfg, signal)
    atomic_write_text(_out_path(cfg, "lipschitz_chains.txt"), chains_to_table(result.chains))
    atomic_write_text(_out_path(cfg, "lipschitz_estimates.txt"), estimates_to_table(result.estimates))
    return EXIT_OK


def cmd_verify(cfg: PipelineConfig, args) -> int:
    det = detect_stage(cfg, _get_field(cfg, args))
    _write_detection(cfg, det)
    report = verify_stage(cfg, det)
    atomic_write_text(_out_path(cfg, "report.txt"), report_to_text(report))
    atomic_write_text(_out_path(cfg, "lines.txt"), lines_to_table(report))
    return EXIT_OK if report.aligned else EXIT_NOT_ALIGNED


def cmd_full(cfg: PipelineConfig, args) -> int:
    fld = solve_stage(cfg)
    atomic_write_text(_out_path(cfg, "field.txt"), field_to_text(fld))
    det = detect_stage(cfg, fld)
    _write_detection(cfg, det)
    if cfg.problem.phi is not None:
        signal = sample_initial_data(cfg.problem.phi.to_spec(), fld.grid.x)
        lip = lipschitz_stage(cfg, signal)
        atomic_write_text(_out_path(cfg, "lipschitz_chains.txt"), chains_to_table(lip.chains))
        atomic_write_text(
            _out_path(cfg, "lipschitz_estimates.txt"), estimates_to_table(lip.estimates)
        )
    report = verify_stage(cfg, det)
    atomic_write_text(_out_path(cfg, "report.txt"), report_to_text(report))
    atomic_write_text(_out_path(cfg, "lines.txt"), lines_to_table(report))
    return EXIT_OK if report.aligned else EXIT_NOT_ALIGNED


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "print-defaults":
        sys.stdout.write(config_to_json(default_config()))
        return EXIT_OK
    try:
        cfg = _resolve_config(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "detect":
            return cmd_detect(cfg, args)
        if args.command == "lipschitz":
            return cmd_lipschitz(cfg, args)
        if args.command == "verify":
            return cmd_verify(cfg, args)
        if args.command == "full":
            return cmd_full(cfg, args)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, ValueError, OSError) as exc:
        print(f"wtshock: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
