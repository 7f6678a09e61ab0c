"""Weak-shock detection for the 1D wave equation via wavelet modulus maxima.

Solve the Cauchy problem exactly (d'Alembert), locate second-derivative
shocks as wavelet-transform modulus maxima, estimate their Lipschitz
regularity from dyadic-scale decay, and verify that the detected ridges lie
on the PDE's characteristics.
"""

from .characteristics import (
    CharacteristicLine,
    CharacteristicReport,
    PdeCoefficients,
    char_roots,
    fit_ridge_lines,
    verify_alignment,
)
from .config import PipelineConfig, default_config, load_config
from .cwt import (
    CwtStack1D,
    GradientField,
    ScaleSet,
    convolve_1d,
    convolve_2d,
    cwt1d,
    gradient_transform,
    multiscale_derivative_2d,
)
from .grids import (
    Field2D,
    Grid1D,
    Grid2D,
    InitialDataSpec,
    Signal1D,
    make_grid1d,
    make_grid2d,
    read_field,
    sample_initial_data,
    write_field,
)
from .kernels import GaussianKernel, Kernel2D, scaled_kernel_1d, scaled_kernel_2d, theta
from .lipschitz import LipschitzEstimate, classify, estimate_exponent
from .wave import CauchyProblem, dalembert_eval, solve_on_grid
from .wtmm import (
    MaximaChain,
    MaximaPoint,
    chain_across_scales,
    chain_ridges,
    find_maxima_1d,
    find_maxima_2d,
)

__version__ = "0.1.0"
