"""Discrete convolution transforms: 1D CWT stacks, 2D smoothing/derivative
transforms, and the gradient/modulus/angle field used for edge-style detection.

Two interchangeable convolution paths are provided (direct summation and an
FFT-based fast path); they share the padding logic exactly, so they agree to
rounding error and either can serve as the oracle for the other.

A band of kernel-radius width at each border is boundary-contaminated;
transforms record its width so detection stages can ignore it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .grids import Field2D, Grid1D, Grid2D, Signal1D, atomic_write_text, field_to_text
from .kernels import SampledKernel1D, SampledKernel2D, scaled_kernel_1d, scaled_kernel_2d

__all__ = [
    "ScaleSet",
    "CwtStack1D",
    "GradientField",
    "convolve_1d",
    "convolve_2d",
    "cwt1d",
    "gradient_transform",
    "multiscale_derivative_2d",
]

BOUNDARY_MODES = ("reflect", "zero")


@dataclass(frozen=True)
class ScaleSet:
    """Dyadic scale ladder sigma_j = 2^j * base_unit, j = j_min .. j_max."""

    j_min: int
    j_max: int
    base_unit: float

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise ValueError(f"j_min {self.j_min} exceeds j_max {self.j_max}")
        if not self.base_unit > 0:
            raise ValueError("base unit must be positive")
        if 2**self.j_min < 2:
            raise ValueError("smallest dyadic scale must be >= 2 base units for resolvability")

    @property
    def js(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def sigmas(self) -> np.ndarray:
        return (2.0 ** self.js) * self.base_unit

    def __len__(self) -> int:
        return self.j_max - self.j_min + 1


@dataclass(frozen=True)
class CwtStack1D:
    """Per-scale wavelet coefficients of a 1D signal, one row per scale."""

    grid: Grid1D
    scales: ScaleSet
    order: int
    coefficients: np.ndarray = field(repr=False)  # shape (n_scales, n)
    border_samples: tuple = ()  # untrusted cells at each end, per scale

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != (len(self.scales), self.grid.n):
            raise ValueError(f"coefficient shape {c.shape} does not match scales x grid")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficients")
        object.__setattr__(self, "coefficients", c)


@dataclass(frozen=True)
class GradientField:
    """Gradient pair of the smoothed field, with modulus and orientation.

    modulus = sqrt(wt_x^2 + wt_t^2), angle = atan2(wt_t, wt_x) in (-pi, pi].
    """

    grid: Grid2D
    sigma: float
    wt_x: Field2D
    wt_t: Field2D
    modulus: Field2D
    angle: Field2D
    border_x: int = 0  # untrusted columns at each side
    border_t: int = 0  # untrusted rows at top and bottom

    def manifest(self, boundary: str) -> dict:
        return {
            "sigma": self.sigma,
            "orders": {"wt_x": [1, 0], "wt_t": [0, 1]},
            "boundary": boundary,
            "border_x": self.border_x,
            "border_t": self.border_t,
        }

    def export(self, directory: str, prefix: str, boundary: str) -> None:
        """One FIELD2D dump per component plus a JSON manifest."""
        import os

        for name, fld in (
            ("wt_x", self.wt_x),
            ("wt_t", self.wt_t),
            ("modulus", self.modulus),
            ("angle", self.angle),
        ):
            atomic_write_text(os.path.join(directory, f"{prefix}_{name}.txt"), field_to_text(fld))
        atomic_write_text(
            os.path.join(directory, f"{prefix}_manifest.json"),
            json.dumps(self.manifest(boundary), indent=2, sort_keys=True) + "\n",
        )


def _pad_1d(values: np.ndarray, radius: int, boundary: str) -> np.ndarray:
    if boundary == "reflect":
        return np.pad(values, radius, mode="reflect")
    if boundary == "zero":
        return np.pad(values, radius, mode="constant")
    raise ValueError(f"unknown boundary mode {boundary!r} (expected one of {BOUNDARY_MODES})")


def _conv_core(values: np.ndarray, kernel: SampledKernel1D, boundary: str, method: str, axis: int = -1):
    """Convolution along one axis, rectangle-rule scaled by the lattice spacing."""
    radius = kernel.radius_samples
    n = values.shape[axis]
    if 2 * radius + 1 > 2 * n:
        raise ValueError(
            f"kernel support ({2 * radius + 1} samples) wider than twice the signal ({n})"
        )
    work = np.moveaxis(np.atleast_2d(values), axis, -1)
    padded = np.stack([_pad_1d(row, radius, boundary) for row in work])
    taps = kernel.values
    if method == "fast":
        out = fftconvolve(padded, taps[None, :], mode="valid")
    elif method == "direct":
        # explicit sliding dot product; np.convolve semantics, fixed order
        width = len(taps)
        out = np.empty_like(work)
        rev = taps[::-1]
        for i in range(work.shape[-1]):
            out[..., i] = padded[..., i : i + width] @ rev
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    out = out * kernel.dx
    out = np.moveaxis(out, -1, axis)
    return out.reshape(values.shape) if values.ndim == 1 else out


def convolve_1d(
    signal: Signal1D,
    kernel: SampledKernel1D,
    boundary: str = "reflect",
    method: str = "fast",
) -> Signal1D:
    """Discrete convolution of a signal with a sampled kernel (same length out)."""
    out = _conv_core(signal.values, kernel, boundary, method)
    return Signal1D(signal.grid, out)


def convolve_2d(
    fld: Field2D,
    kernel: SampledKernel2D,
    boundary: str = "reflect",
    method: str = "fast",
) -> Field2D:
    """Separable 2D convolution: x pass (axis 1) then t pass (axis 0)."""
    out = _conv_core(fld.values, kernel.factor_x, boundary, method, axis=1)
    out = _conv_core(out, kernel.factor_t, boundary, method, axis=0)
    return Field2D(fld.grid, out)


def cwt1d(
    signal: Signal1D,
    m: int,
    scales: ScaleSet,
    boundary: str = "reflect",
    method: str = "fast",
) -> CwtStack1D:
    """Order-m wavelet transform of a signal at every dyadic scale."""
    rows, borders = [], []
    for sigma in scales.sigmas:
        kern = scaled_kernel_1d(m, sigma, signal.grid.dx)
        rows.append(_conv_core(signal.values, kern, boundary, method))
        borders.append(kern.radius_samples)
    return CwtStack1D(signal.grid, scales, m, np.vstack(rows), tuple(borders))


def multiscale_derivative_2d(
    fld: Field2D,
    order_x: int,
    order_t: int,
    sigma: float,
    boundary: str = "reflect",
    method: str = "fast",
) -> Field2D:
    """Smoothed (order_x, order_t) derivative surface of a field at one scale."""
    kern = scaled_kernel_2d(order_x, order_t, sigma, fld.grid.x.dx, fld.grid.dt)
    return convolve_2d(fld, kern, boundary, method)


def gradient_transform(
    fld: Field2D,
    sigma: float,
    boundary: str = "reflect",
    method: str = "fast",
) -> GradientField:
    """Gradient pair (sigma-scaled first derivatives) with modulus and angle."""
    kern_x = scaled_kernel_2d(1, 0, sigma, fld.grid.x.dx, fld.grid.dt)
    kern_t = scaled_kernel_2d(0, 1, sigma, fld.grid.x.dx, fld.grid.dt)
    wt_x = convolve_2d(fld, kern_x, boundary, method)
    wt_t = convolve_2d(fld, kern_t, boundary, method)
    modulus = np.hypot(wt_x.values, wt_t.values)
    angle = np.arctan2(wt_t.values, wt_x.values)
    return GradientField(
        grid=fld.grid,
        sigma=float(sigma),
        wt_x=wt_x,
        wt_t=wt_t,
        modulus=Field2D(fld.grid, modulus),
        angle=Field2D(fld.grid, angle),
        border_x=kern_x.factor_x.radius_samples,
        border_t=kern_t.factor_t.radius_samples,
    )
