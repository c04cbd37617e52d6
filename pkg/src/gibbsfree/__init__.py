"""Fourier reconstruction of piecewise-smooth functions with estimated jumps.

The partial sum of a function with jumps converges slowly and rings near each
discontinuity. Estimating the jump locations and heights from the same
coefficients (by Prony-type fitting or a concentration kernel) and adding the
analytic tail of the jump model removes most of the ringing.
"""

from .concentration import (
    ConcentrationFactor,
    DetectionConfig,
    concentration_sum,
    concentration_sum_fft,
    detect,
    refine_jumps,
)
from .errors import *  # noqa: F401,F403
from .functions import (
    Box,
    Composite,
    Disc,
    JumpSet,
    Piece,
    PiecewiseFnSpec,
    Spectrum1D,
    Spectrum2D,
    Term,
    fourier_coeffs_2d_exact,
    fourier_coeffs_2d_quadrature,
    fourier_coeffs_exact,
    fourier_coeffs_quadrature,
    function_f1,
    function_f2,
    function_h,
    function_s,
    get_function,
    jump_set_of,
    ramp_spectrum,
)
from .noise import NoiseSpec, add_noise, noise_sweep
from .pipeline import make_estimator
from .prony import PronyConfig, prony_estimate
from .recon2d import Grid2D, edge_augmented_2d, partial_sum_2d, psnr
from .spectral import (
    SampledFunction,
    convergence_slope,
    edge_augmented_sum,
    edge_error,
    l2_error,
    match_jump_sets,
    partial_sum,
    standard_error,
    uniform_grid,
)

__version__ = "0.1.0"
