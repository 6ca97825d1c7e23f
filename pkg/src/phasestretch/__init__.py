"""Phase Stretch Transform feature detection with closed-form oracles."""
from .analytic import (
    OracleReport,
    compare_oracle,
    pst_quadratic,
    pst_quadratic_order3,
    pst_smallphase,
    pst_smallphase_field,
)
from .config import PRESETS, PstConfig
from .detectors import (
    HybridPolicy,
    hybrid,
    log_equalize,
    normalize_robust,
    smooth_derivative,
    threshold,
)
from .kernel import (
    LocalizationKernel,
    PhaseKernel,
    TaylorCoeffs,
    build_lpf,
    build_phase_kernel,
    build_quadratic_kernel,
    phase_profile,
    taylor_coeffs,
)
from .spectral import FrequencyGrid, forward, freq_grid, freq_grid_1d, inverse, spectral_derivative
from .transform import FeatureMap, ImageF, crop, pad, pst1d, pst2d, stretch

__version__ = "0.1.0"
