"""
Selection, estimation and prediction metrics.

Supports are any iterables of feature indices; coefficient vectors are
array-likes. All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .exceptions import InvalidArgumentError
from .solvers import logistic_nll

# keeps zero-residual fits finite in the regression BIC
MSE_FLOOR = 1e-12


def selection_accuracy(true_support: Iterable[int], est_support: Iterable[int]) -> float:
    """``1 - |S_est ^ S_true| / (|S_est| + |S_true|)``; 1 when both are empty."""
    s, e = set(true_support), set(est_support)
    denom = len(s) + len(e)
    if denom == 0:
        return 1.0
    return 1.0 - len(s ^ e) / denom


def confusion_counts(true_support: Iterable[int], est_support: Iterable[int]) -> tuple[int, int]:
    """(false positives, false negatives) of an estimated support."""
    s, e = set(true_support), set(est_support)
    return len(e - s), len(s - e)


def estimation_rms(true_beta, est_beta) -> float:
    b = np.asarray(true_beta, dtype=np.float64).ravel()
    bh = np.asarray(est_beta, dtype=np.float64).ravel()
    if b.shape != bh.shape:
        raise InvalidArgumentError("coefficient vectors differ in length")
    return float(np.sqrt(np.mean((b - bh) ** 2)))


def estimation_variance(estimates: Sequence) -> float:
    """Population variance of each coordinate across estimates, averaged over coordinates."""
    rows = [np.asarray(getattr(e, "values", e), dtype=np.float64).ravel() for e in estimates]
    if len(rows) < 2:
        raise InvalidArgumentError("estimation variance needs at least two estimates")
    B = np.stack(rows)
    return float(np.mean(np.mean(B * B, axis=0) - np.mean(B, axis=0) ** 2))


def r_squared(y, y_hat) -> float:
    """Coefficient of determination ``1 - SSE / SST``."""
    y = np.asarray(y, dtype=np.float64).ravel()
    y_hat = np.asarray(y_hat, dtype=np.float64).ravel()
    if y.shape != y_hat.shape:
        raise InvalidArgumentError("y and y_hat differ in length")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst <= 0.0:
        raise InvalidArgumentError("R^2 is undefined for a constant response")
    return 1.0 - float(np.sum((y - y_hat) ** 2)) / sst


def bic_regression(y, y_hat, n: Optional[int] = None, nonzeros: int = 0) -> float:
    """``n log(SSE / (n - 1)) + k log n`` with the mean square floored at 1e-12."""
    y = np.asarray(y, dtype=np.float64).ravel()
    y_hat = np.asarray(y_hat, dtype=np.float64).ravel()
    n = y.size if n is None else int(n)
    if n < 2:
        raise InvalidArgumentError("BIC needs n >= 2")
    mse = max(float(np.sum((y - y_hat) ** 2)) / (n - 1), MSE_FLOOR)
    return n * math.log(mse) + int(nonzeros) * math.log(n)


def bic_classification(log_likelihood: float, n: float, nonzeros: int) -> float:
    """``-2 log L + k log n`` with ``log L`` the held-out log-likelihood."""
    if not n >= 1:
        raise InvalidArgumentError("BIC needs n >= 1")
    return -2.0 * float(log_likelihood) + int(nonzeros) * math.log(n)


def selection_ratio(est_beta) -> float:
    b = np.asarray(getattr(est_beta, "values", est_beta)).ravel()
    if b.size == 0:
        raise InvalidArgumentError("empty coefficient vector")
    return float(np.count_nonzero(b)) / b.size


@dataclass
class MetricReport:
    """Metrics of one fit; fields are None when their inputs are unavailable."""

    selection_accuracy: Optional[float] = None
    estimation_rms: Optional[float] = None
    estimation_variance: Optional[float] = None
    r_squared: Optional[float] = None
    bic: Optional[float] = None
    selection_ratio: Optional[float] = None
    false_positives: Optional[int] = None
    false_negatives: Optional[int] = None
    prediction_accuracy: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def regression_report(coef, X_test, y_test, true_beta=None) -> MetricReport:
    """Metrics of a fitted linear predictor on held-out rows."""
    values = np.asarray(coef.values)
    y_hat = coef.predict(X_test)
    support = np.flatnonzero(values)
    report = MetricReport(
        bic=bic_regression(y_test, y_hat, len(y_test), support.size),
        selection_ratio=selection_ratio(values),
    )
    y = np.asarray(y_test, dtype=np.float64)
    if y.size >= 2 and np.ptp(y) > 0:
        report.r_squared = r_squared(y, y_hat)
    if true_beta is not None:
        true_support = np.flatnonzero(np.asarray(true_beta))
        report.selection_accuracy = selection_accuracy(true_support, support)
        report.estimation_rms = estimation_rms(true_beta, values)
        report.false_positives, report.false_negatives = confusion_counts(true_support, support)
    return report


def classification_report(coef, X_test, y_test, true_beta=None) -> MetricReport:
    """Metrics of a fitted logistic predictor on held-out rows."""
    values = np.asarray(coef.values)
    y = np.asarray(y_test, dtype=np.float64)
    z = coef.predict(X_test)
    k = int(np.count_nonzero(values))
    loglik = -logistic_nll(X_test, y, values, coef.intercept)
    report = MetricReport(
        bic=bic_classification(loglik, len(y), k),
        selection_ratio=selection_ratio(values),
        prediction_accuracy=float(np.mean((z >= 0.0) == (y == 1.0))),
    )
    if true_beta is not None:
        true_support = np.flatnonzero(np.asarray(true_beta))
        support = np.flatnonzero(values)
        report.selection_accuracy = selection_accuracy(true_support, support)
        report.estimation_rms = estimation_rms(true_beta, values)
        report.false_positives, report.false_negatives = confusion_counts(true_support, support)
    return report
