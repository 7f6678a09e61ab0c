"""Pipeline configuration: nested dataclasses with strict JSON (de)serialization.

The default configuration doubles as the reference experiment: a
c1_parabolic_kink Cauchy problem at unit wave speed whose detected ridges
should align with the characteristics x = x0 +/- t.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional

from .grids import InitialDataSpec

__all__ = ["PipelineConfig", "ConfigError", "load_config", "default_config", "config_to_json"]


class ConfigError(ValueError):
    """Invalid, unknown, or missing configuration keys."""


@dataclass(frozen=True)
class GridConfig:
    x_min: float = -2.0
    x_max: float = 2.0
    n: int = 1024
    t_min: float = 0.0
    t_max: float = 1.0
    m: int = 256


@dataclass(frozen=True)
class DatumConfig:
    kind: str = "c1_parabolic_kink"
    x0: float = 0.0
    amplitude: float = 1.0

    def to_spec(self) -> InitialDataSpec:
        return InitialDataSpec(self.kind, self.x0, self.amplitude)


@dataclass(frozen=True)
class ProblemConfig:
    nu: float = 1.0
    phi: Optional[DatumConfig] = field(default_factory=DatumConfig)
    psi: Optional[DatumConfig] = None


@dataclass(frozen=True)
class ScalesConfig:
    j_min: int = 1
    j_max: int = 5


@dataclass(frozen=True)
class DetectConfig:
    sigma_j: int = 2  # detection scale sigma = 2^sigma_j * dx
    threshold_rel: float = 0.1
    boundary: str = "reflect"
    surface: str = "xx"  # second-derivative surface used for ridge detection
    cwt_order: int = 2  # kernel order for 1D Lipschitz chains
    linking_radius_cells: int = 1
    max_jump_cells: int = 2
    max_row_gap: int = 2
    min_ridge_points: int = 5


@dataclass(frozen=True)
class ClassifyConfig:
    jump_halfwidth: float = 0.35
    dirac_max: float = -0.65
    smooth_min: float = 0.65
    residual_max: float = 0.5


@dataclass(frozen=True)
class VerifyConfig:
    # null coefficients default to the solver's wave equation (-nu^2, 0, 1)
    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    x0_true: Optional[float] = None  # defaults to phi.x0
    n_lines: int = 2
    slope_tol: float = 0.05
    intercept_tol: float = 0.02


@dataclass(frozen=True)
class PipelineConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    scales: ScalesConfig = field(default_factory=ScalesConfig)
    detect: DetectConfig = field(default_factory=DetectConfig)
    classify: ClassifyConfig = field(default_factory=ClassifyConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    output_dir: str = "out"


def _from_dict(cls, data, path="config"):
    if data is None:
        return None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        f = fields[name]
        nested = _NESTED.get((cls, name))
        if nested is not None:
            kwargs[name] = _from_dict(nested, value, f"{path}.{name}")
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


_NESTED = {
    (PipelineConfig, "grid"): GridConfig,
    (PipelineConfig, "problem"): ProblemConfig,
    (PipelineConfig, "scales"): ScalesConfig,
    (PipelineConfig, "detect"): DetectConfig,
    (PipelineConfig, "classify"): ClassifyConfig,
    (PipelineConfig, "verify"): VerifyConfig,
    (ProblemConfig, "phi"): DatumConfig,
    (ProblemConfig, "psi"): DatumConfig,
}


def default_config() -> PipelineConfig:
    return PipelineConfig()


def load_config(path: str) -> PipelineConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    cfg = _from_dict(PipelineConfig, data)
    validate(cfg)
    return cfg


def validate(cfg: PipelineConfig) -> None:
    """Cross-field checks beyond per-dataclass construction."""
    from .grids import SINGULAR_KINDS, make_grid2d

    try:
        make_grid2d(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n, cfg.grid.t_min, cfg.grid.t_max, cfg.grid.m)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    if cfg.problem.nu <= 0:
        raise ConfigError(f"problem.nu must be positive, got {cfg.problem.nu}")
    for name, datum in (("phi", cfg.problem.phi), ("psi", cfg.problem.psi)):
        if datum is None:
            continue
        try:
            spec = datum.to_spec()
        except ValueError as exc:
            raise ConfigError(f"problem.{name}: {exc}") from exc
        if spec.kind in SINGULAR_KINDS and not (cfg.grid.x_min < spec.x0 < cfg.grid.x_max):
            raise ConfigError(
                f"problem.{name}.x0={spec.x0} outside the open spatial interval"
            )
    if cfg.scales.j_min > cfg.scales.j_max:
        raise ConfigError("scales.j_min exceeds scales.j_max")
    if cfg.scales.j_min < 1:
        raise ConfigError("scales.j_min must be >= 1 (sigma >= 2 dx resolvability)")
    if not 0.0 < cfg.detect.threshold_rel < 1.0:
        raise ConfigError("detect.threshold_rel must lie in (0, 1)")
    if cfg.detect.boundary not in ("reflect", "zero"):
        raise ConfigError(f"detect.boundary must be reflect or zero, got {cfg.detect.boundary!r}")
    if cfg.detect.surface not in ("xx", "tt"):
        raise ConfigError(f"detect.surface must be xx or tt, got {cfg.detect.surface!r}")
    if cfg.detect.cwt_order not in (1, 2):
        raise ConfigError("detect.cwt_order must be 1 or 2")
    if cfg.verify.n_lines not in (1, 2):
        raise ConfigError("verify.n_lines must be 1 or 2")
    if cfg.verify.slope_tol <= 0 or cfg.verify.intercept_tol <= 0:
        raise ConfigError("verification tolerances must be positive")


def config_to_json(cfg: PipelineConfig) -> str:
    return json.dumps(dataclasses.asdict(cfg), indent=2) + "\n"
