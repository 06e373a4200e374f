"""Tensor products of Hilbert spaces of increasing smoothness.

Weight families, lazy singular-value enumeration with exact minimal errors,
orthonormal bases with reproducing kernels, and midpoint interpolation on
Haar spaces.
"""

__version__ = "0.1.0"

from incsmooth.bases import BasisFamily, eval_basis, rkhs_condition
from incsmooth.haar_approx import HaarInterpolant, interpolate, measured_error, worst_case_error
from incsmooth.kernels import CoefVector, SpaceSpec, kernel_eval, norm
from incsmooth.sequences import decay_fit, product_sum
from incsmooth.spectra import (
    CostModel,
    SingularValueStream,
    evaluate_cost,
    min_error_all,
    predicted_decay_all,
    predicted_decay_std,
)
from incsmooth.weights import Rule, WeightFamily, alpha, decay_params, gamma, validate

__all__ = [
    "BasisFamily",
    "CoefVector",
    "CostModel",
    "HaarInterpolant",
    "Rule",
    "SingularValueStream",
    "SpaceSpec",
    "WeightFamily",
    "alpha",
    "decay_fit",
    "decay_params",
    "eval_basis",
    "evaluate_cost",
    "gamma",
    "interpolate",
    "kernel_eval",
    "measured_error",
    "min_error_all",
    "norm",
    "predicted_decay_all",
    "predicted_decay_std",
    "product_sum",
    "rkhs_condition",
    "validate",
    "worst_case_error",
]
