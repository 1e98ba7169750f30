"""Anisotropy statistics of 2D Gaussian random fields."""

from ._anistat import (
    ConfidenceRegion,
    CovarianceModel,
    DegenerateSample,
    DomainError,
    Error,
    InfeasibleSampleSize,
    InvalidInput,
    IoError,
    SlopeTensor,
    chi2_inv_2dof,
    confidence_region,
    estimate,
    generate,
    isotropy_interval,
    isotropy_test,
    jacobian_det,
    jpdf_nonparametric,
    slope_tensor,
)

__version__ = "0.1.0"
