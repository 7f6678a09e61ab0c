"""Uniform space-time grids, sampled fields, and synthetic initial data.

The spatial axis is endpoint-inclusive: sample ``i`` sits exactly at
``x_min + i * dx`` with ``dx = (x_max - x_min) / (n - 1)``.  Fields are
stored row-major by time row, which is also the on-disk layout of the
FIELD2D dump format (see :func:`write_field` / :func:`read_field`).
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid1D",
    "Grid2D",
    "Signal1D",
    "Field2D",
    "InitialDataSpec",
    "SINGULAR_KINDS",
    "make_grid1d",
    "make_grid2d",
    "sample_initial_data",
    "initial_data_callable",
    "write_field",
    "read_field",
    "atomic_write_text",
]

SINGULAR_KINDS = frozenset({"c1_parabolic_kink", "step", "ramp_corner", "dirac"})
SMOOTH_KINDS = frozenset({"smooth_sine", "smooth_gaussian"})
ALL_KINDS = SINGULAR_KINDS | SMOOTH_KINDS


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid on [x_min, x_max] with n endpoint-inclusive samples."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"reversed or empty bounds: [{self.x_min}, {self.x_max}]")
        if self.n < 8:
            raise ValueError(f"need at least 8 samples, got {self.n}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    def coord(self, i) -> float:
        """Coordinate of sample i (scalar or array)."""
        return self.x_min + np.asarray(i) * self.dx

    def index_of(self, x: float) -> int:
        """Nearest sample index to coordinate x."""
        return int(round((x - self.x_min) / self.dx))

    def coords(self) -> np.ndarray:
        return self.x_min + np.arange(self.n) * self.dx


@dataclass(frozen=True)
class Grid2D:
    """Space-time grid: a Grid1D in x crossed with m uniform time rows."""

    x: Grid1D
    t_min: float
    t_max: float
    m: int

    def __post_init__(self):
        if self.t_min < 0:
            raise ValueError(f"t_min must be >= 0, got {self.t_min}")
        if not self.t_min < self.t_max:
            raise ValueError(f"reversed or empty time bounds: [{self.t_min}, {self.t_max}]")
        if self.m < 4:
            raise ValueError(f"need at least 4 time rows, got {self.m}")

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.m - 1)

    def t_coord(self, k) -> float:
        return self.t_min + np.asarray(k) * self.dt

    def t_coords(self) -> np.ndarray:
        return self.t_min + np.arange(self.m) * self.dt


def make_grid1d(x_min: float, x_max: float, n: int) -> Grid1D:
    return Grid1D(float(x_min), float(x_max), int(n))


def make_grid2d(x_min, x_max, n, t_min, t_max, m) -> Grid2D:
    return Grid2D(make_grid1d(x_min, x_max, n), float(t_min), float(t_max), int(m))


@dataclass(frozen=True)
class Signal1D:
    grid: Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"values shape {v.shape} does not match grid n={self.grid.n}")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal contains non-finite values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class Field2D:
    grid: Grid2D
    values: np.ndarray = field(repr=False)  # shape (m, n), row-major by t-row

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.m, self.grid.x.n):
            raise ValueError(
                f"values shape {v.shape} does not match grid ({self.grid.m}, {self.grid.x.n})"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", v)

    def row(self, k: int) -> Signal1D:
        return Signal1D(self.grid.x, self.values[k])


@dataclass(frozen=True)
class InitialDataSpec:
    """Synthetic initial-datum family.

    c1_parabolic_kink is the canonical weak discontinuity: the function is
    C^1 with a jump of size ``amplitude`` in its second derivative at x0.
    step / ramp_corner / dirac probe the exponent ladder alpha = 0, 1, -1;
    the smooth kinds are C-infinity controls.
    """

    kind: str
    x0: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown initial-data kind {self.kind!r}")
        if self.amplitude == 0:
            raise ValueError("amplitude must be nonzero")


def initial_data_callable(spec: InitialDataSpec):
    """Analytic evaluator x -> value for a spec (vectorized over numpy arrays).

    The dirac kind has no pointwise analytic form; it is only meaningful
    sampled on a grid or as a point mass in quadrature, so it is rejected here.
    """
    a, x0 = spec.amplitude, spec.x0
    if spec.kind == "c1_parabolic_kink":
        return lambda x: np.where(np.asarray(x) >= x0, a * (np.asarray(x) - x0) ** 2 / 2.0, 0.0)
    if spec.kind == "step":
        return lambda x: np.where(np.asarray(x) >= x0, a, 0.0)
    if spec.kind == "ramp_corner":
        return lambda x: a * np.abs(np.asarray(x) - x0)
    if spec.kind == "smooth_sine":
        return lambda x: a * np.sin(np.asarray(x) - x0)
    if spec.kind == "smooth_gaussian":
        return lambda x: a * np.exp(-((np.asarray(x) - x0) ** 2) / 2.0)
    raise ValueError(f"kind {spec.kind!r} has no pointwise analytic form")


def sample_initial_data(spec: InitialDataSpec, grid: Grid1D) -> Signal1D:
    """Sample a spec on a grid.

    The dirac kind becomes a single-sample impulse of height amplitude/dx at
    the sample nearest x0, so its rectangle-rule mass is exactly ``amplitude``.
    """
    if spec.kind in SINGULAR_KINDS and not (grid.x_min < spec.x0 < grid.x_max):
        raise ValueError(
            f"singularity location x0={spec.x0} outside open interval "
            f"({grid.x_min}, {grid.x_max})"
        )
    if spec.kind == "dirac":
        values = np.zeros(grid.n)
        values[grid.index_of(spec.x0)] = spec.amplitude / grid.dx
        return Signal1D(grid, values)
    f = initial_data_callable(spec)
    return Signal1D(grid, np.asarray(f(grid.coords()), dtype=float))


# ---------------------------------------------------------------------------
# FIELD2D dump format

def _format_row(row: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in row)


def field_to_text(fld: Field2D) -> str:
    g = fld.grid
    header = (
        f"FIELD2D {g.x.n} {g.m} {g.x.x_min!r} {g.x.x_max!r} {g.t_min!r} {g.t_max!r}"
    )
    lines = [header]
    lines.extend(_format_row(fld.values[k]) for k in range(g.m))
    return "\n".join(lines) + "\n"


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a temp file in the same directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_field(fld: Field2D, path: str) -> None:
    atomic_write_text(path, field_to_text(fld))


def read_field(path: str) -> Field2D:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 7 or header[0] != "FIELD2D":
            raise ValueError(f"{path}: not a FIELD2D dump")
        n, m = int(header[1]), int(header[2])
        x_min, x_max, t_min, t_max = map(float, header[3:7])
        values = np.loadtxt(fh, ndmin=2)
    if values.shape != (m, n):
        raise ValueError(f"{path}: body shape {values.shape} does not match header ({m}, {n})")
    return Field2D(make_grid2d(x_min, x_max, n, t_min, t_max, m), values)
