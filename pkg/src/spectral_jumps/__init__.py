"""Detect, locate and size jump discontinuities of periodic signals from
their Fourier coefficients, in one dimension and along coordinate lines of
the 2-torus."""

from .corpus import (
    JumpSet,
    SignalSpec,
    brute_force_variation,
    builtin,
    reference_corpus,
    evaluate,
    make_pulse,
    make_staircase,
    true_jumps,
)
from .detector import (
    CalibrationResult,
    JumpReport,
    VariationEstimate,
    YnField,
    calibrate_K,
    calibrate_K_variation,
    detect_jumps,
    interval_variation,
    lukacs_jump_estimate,
    y_n,
    y_n_field,
)
from .spectral import (
    CoefficientSet,
    coefficient_mass,
    coefficients_analytic,
    coefficients_from_samples,
    conjugate_dirichlet_kernel,
    conjugate_partial_sum,
    dirichlet_kernel,
    partial_sum,
)
from .torus2d import (
    CoefficientGrid2D,
    HyperplaneReport,
    coefficients_2d,
    conjugate_dirichlet_2d,
    conjugate_partial_sum_2d,
    detect_hyperplanes,
    rectangle_slice_variation,
    y_jn,
)

__version__ = "0.1.0"
