"""Single-fit baselines tuned on a held-out selection block."""

from __future__ import annotations

import numpy as np

from .solvers import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    CoefficientVector,
    DataSet,
    fit_ols,
    lasso_path,
    logistic_l1_path,
    logistic_nll,
    make_lambda_grid,
)


def _validated_path(train, validation, fitter, score, q, ratio, task, tol, max_iter, standardize):
    if standardize:
        work, transform = train.standardize()
        Xv = transform.transform(validation.features)
    else:
        work, transform = train, None
        Xv = validation.features
    grid = make_lambda_grid(work, q, ratio, task=task)
    fits = fitter(work, grid.values, tol=tol, max_iter=max_iter)
    losses = np.array([score(f, Xv, validation.response) for f in fits])
    best = int(np.argmin(losses))
    fit = fits[best]
    if transform is not None:
        fit = transform.to_original(fit)
    return fit, float(grid[best])


def _mse(fit, X, y):
    r = y - fit.predict(X)
    return float(np.mean(r * r))


def _mean_nll(fit, X, y):
    return logistic_nll(X, y, fit.values, fit.intercept) / len(y)


def fit_lasso_validated(
    train: DataSet,
    validation: DataSet,
    q: int = 48,
    ratio: float = 1e-3,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    standardize: bool = True,
) -> tuple[CoefficientVector, float]:
    """Lasso with the penalty chosen by validation mean squared error.

    Returns the fit (original scale) and the chosen penalty.
    """
    return _validated_path(train, validation, lasso_path, _mse, q, ratio, "regression", tol, max_iter, standardize)


def fit_l1_logistic_validated(
    train: DataSet,
    validation: DataSet,
    q: int = 48,
    ratio: float = 1e-3,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    standardize: bool = True,
) -> tuple[CoefficientVector, float]:
    """L1-logistic with the penalty chosen by validation log-loss."""
    return _validated_path(
        train, validation, logistic_l1_path, _mean_nll, q, ratio, "classification", tol, max_iter, standardize
    )


def fit_ols_full(train: DataSet) -> CoefficientVector:
    """Unrestricted least squares on every column."""
    return fit_ols(train)
