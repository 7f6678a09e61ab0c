"""End-to-end pipeline stages shared by the CLI and the experiment scripts.

solve -> second-derivative surface -> gradient WTMM -> ridges -> line fits
-> characteristic verification, plus the 1D Lipschitz subsystem.

Detection runs on the smoothed second-derivative surface of u (not on u
itself): a weak discontinuity leaves u and its gradient continuous, so only
the second-derivative surfaces carry a maxima ridge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .characteristics import (
    CharacteristicReport,
    FittedLine,
    PdeCoefficients,
    fit_ridge_lines,
    verify_alignment,
)
from .config import PipelineConfig
from .cwt import GradientField, ScaleSet, cwt1d, gradient_transform, multiscale_derivative_2d
from .grids import Field2D, Grid2D, Signal1D, make_grid2d, sample_initial_data
from .kernels import scaled_kernel_2d
from .lipschitz import ClassificationBands, LipschitzEstimate, estimate_exponent
from .wave import CauchyProblem, solve_on_grid
from .wtmm import MaximaChain, chain_across_scales, chain_ridges, find_maxima_1d, find_maxima_2d

__all__ = [
    "DetectionResult",
    "LipschitzResult",
    "build_grid",
    "build_problem",
    "solve_stage",
    "detect_stage",
    "lipschitz_stage",
    "verify_stage",
    "bands_from_config",
]


def build_grid(cfg: PipelineConfig) -> Grid2D:
    g = cfg.grid
    return make_grid2d(g.x_min, g.x_max, g.n, g.t_min, g.t_max, g.m)


def build_problem(cfg: PipelineConfig) -> CauchyProblem:
    p = cfg.problem
    return CauchyProblem(
        nu=p.nu,
        phi=p.phi.to_spec() if p.phi is not None else None,
        psi=p.psi.to_spec() if p.psi is not None else None,
    )


def bands_from_config(cfg: PipelineConfig) -> ClassificationBands:
    c = cfg.classify
    return ClassificationBands(c.jump_halfwidth, c.dirac_max, c.smooth_min, c.residual_max)


def solve_stage(cfg: PipelineConfig) -> Field2D:
    return solve_on_grid(build_problem(cfg), build_grid(cfg))


@dataclass(frozen=True)
class DetectionResult:
    surface: Field2D
    gradient: GradientField
    maxima: tuple
    ridges: tuple  # MaximaChain(kind=ridge), filtered to min_ridge_points
    scale_chains: tuple  # MaximaChain(kind=scale_chain) from the reference row
    estimates: tuple  # LipschitzEstimate per scale chain
    reference_row: int
    sigma: float


def _second_difference_row(fld: Field2D, row: int) -> Signal1D:
    """Centered second differences of one t-row (ends replicated)."""
    v = fld.values[row]
    dx = fld.grid.x.dx
    d2 = np.empty_like(v)
    d2[1:-1] = (v[:-2] - 2.0 * v[1:-1] + v[2:]) / (dx * dx)
    d2[0], d2[-1] = d2[1], d2[-2]
    return Signal1D(fld.grid.x, d2)


def detect_stage(cfg: PipelineConfig, fld: Field2D) -> DetectionResult:
    """Gradient WTMM on the second-derivative surface at the detection scale."""
    det = cfg.detect
    grid = fld.grid
    dx = grid.x.dx
    sigma = (2.0**det.sigma_j) * dx
    orders = (2, 0) if det.surface == "xx" else (0, 2)
    surf_kern = scaled_kernel_2d(*orders, sigma, dx, grid.dt)
    surface = multiscale_derivative_2d(fld, *orders, sigma, boundary=det.boundary)
    gf = gradient_transform(surface, sigma, boundary=det.boundary)
    maxima = find_maxima_2d(
        gf,
        det.threshold_rel,
        extra_border_x=surf_kern.factor_x.radius_samples,
        extra_border_t=surf_kern.factor_t.radius_samples,
    )
    ridges = [
        r
        for r in chain_ridges(maxima, det.max_jump_cells, dx, det.max_row_gap)
        if len(r) >= det.min_ridge_points
    ]

    # Lipschitz diagnostics on the reference row (middle of the trusted region)
    ref_row = grid.m // 2
    scales = ScaleSet(cfg.scales.j_min, cfg.scales.j_max, dx)
    stack = cwt1d(_second_difference_row(fld, ref_row), 1, scales, boundary=det.boundary)
    per_scale = find_maxima_1d(stack, det.threshold_rel)
    chains = chain_across_scales(per_scale, det.linking_radius_cells)
    bands = bands_from_config(cfg)
    estimates = tuple(estimate_exponent(c, bands) for c in chains)
    return DetectionResult(
        surface=surface,
        gradient=gf,
        maxima=tuple(maxima),
        ridges=tuple(ridges),
        scale_chains=tuple(chains),
        estimates=estimates,
        reference_row=ref_row,
        sigma=sigma,
    )


@dataclass(frozen=True)
class LipschitzResult:
    chains: tuple
    estimates: tuple


def lipschitz_stage(cfg: PipelineConfig, signal: Signal1D) -> LipschitzResult:
    """Scale chains and exponent estimates for a 1D signal."""
    det = cfg.detect
    scales = ScaleSet(cfg.scales.j_min, cfg.scales.j_max, signal.grid.dx)
    stack = cwt1d(signal, det.cwt_order, scales, boundary=det.boundary)
    per_scale = find_maxima_1d(stack, det.threshold_rel)
    chains = chain_across_scales(per_scale, det.linking_radius_cells)
    bands = bands_from_config(cfg)
    return LipschitzResult(
        chains=tuple(chains),
        estimates=tuple(estimate_exponent(c, bands) for c in chains),
    )


def verification_coefficients(cfg: PipelineConfig) -> PdeCoefficients:
    v = cfg.verify
    if v.a is not None or v.b is not None or v.c is not None:
        if None in (v.a, v.b, v.c):
            raise ValueError("verify.a, verify.b, verify.c must be given together")
        return PdeCoefficients(v.a, v.b, v.c)
    return PdeCoefficients.from_wave_speed(cfg.problem.nu)


def verify_stage(cfg: PipelineConfig, detection: DetectionResult) -> CharacteristicReport:
    """Fit ridge lines and compare against the characteristic roots."""
    v = cfg.verify
    coeffs = verification_coefficients(cfg)
    x0_true = v.x0_true
    if x0_true is None:
        if cfg.problem.phi is None:
            raise ValueError("verify.x0_true is required when the problem has no phi datum")
        x0_true = cfg.problem.phi.x0
    ridges = sorted(detection.ridges, key=len, reverse=True)[: v.n_lines]
    if not ridges:
        return verify_alignment([], coeffs, x0_true, v.slope_tol, v.intercept_tol)
    dx = detection.gradient.grid.x.dx
    fitted = fit_ridge_lines(ridges, v.n_lines, dx)
    return verify_alignment(fitted, coeffs, x0_true, v.slope_tol, v.intercept_tol)
