"""Union of Intersections for sparse model selection and estimation."""

from .core import (
    ModelEstimate,
    SupportFamily,
    UoIConfig,
    estimate_union,
    intersect_supports,
    run_uoi,
    select_bolasso,
    select_stability,
)
from .exceptions import DataError, InvalidArgumentError
from .resampling import SeedSpec
from .solvers import CoefficientVector, DataSet, RegularizationGrid, fit_lasso, fit_logistic_l1, fit_ols, make_lambda_grid

__version__ = "0.1.0"
