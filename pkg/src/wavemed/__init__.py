"""Robust nonparametric regression by wavelet block thresholding of bin medians."""

from .binning import BinningPlan, BinnedMedians, DegenerateDataError, make_plan
from .dwt import BesovSpec, CoefficientPyramid, get_filter
from .estimator import EstimatorConfig, FitResult, fit, pointwise_at
from .noise import make_model, parse_model
from .shrinkage import LAMBDA_STAR, ShrinkageConfig

__version__ = "0.1.0"

__all__ = [
    "BesovSpec",
    "BinnedMedians",
    "BinningPlan",
    "CoefficientPyramid",
    "DegenerateDataError",
    "EstimatorConfig",
    "FitResult",
    "LAMBDA_STAR",
    "ShrinkageConfig",
    "fit",
    "get_filter",
    "make_model",
    "make_plan",
    "parse_model",
    "pointwise_at",
]
