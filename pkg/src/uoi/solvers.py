"""
Convex base learners used by the selection and estimation stages.

* Lasso by cyclic coordinate descent on the un-normalized objective
  ``sum_i (y_i - x_i'b - b0)^2 + lam * sum_j w_j |b_j|``
  (``w_j = 1`` unless per-feature penalty weights are supplied).
* Ordinary least squares restricted to a support, minimum-norm when the
  restricted design is rank deficient.
* L1-penalized logistic regression by proximal gradient descent with a
  backtracking line search, and an unpenalized Newton solver used for
  refits on a fixed support.

All solvers fit an unpenalized intercept and are deterministic. They never
raise on non-convergence: the returned :class:`CoefficientVector` carries
``converged=False`` together with the last iterate and its optimality
violation, and callers decide what to do with it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from numba import njit

from .exceptions import InvalidArgumentError

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 10_000

# Classification grid head sits this far above the analytic lambda_max so
# that the all-zero solution survives rounding in the intercept update.
_LOGISTIC_LMAX_SLACK = 1e-9

# An accepted proximal step doubles for the next iteration. Flat regions
# (nearly separable classes) need steps far above the initial 1.0.
_MAX_STEP = 1e8


# =============================================================================
# Data containers
# =============================================================================


@dataclass(frozen=True)
class DataSet:
    """
    Paired samples of predictors and response.

    Parameters
    ----------
    features : ndarray of shape (n, p)
    response : ndarray of shape (n,)
        Real-valued for regression, {0, 1} for classification.
    column_standardized : bool
        Declares that every column has unit sum of squares; checked.
    """

    features: np.ndarray
    response: np.ndarray
    column_standardized: bool = False

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        y = np.ascontiguousarray(np.asarray(self.response, dtype=np.float64))
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise InvalidArgumentError("features must be a 2-D matrix")
        y = y.ravel()
        if X.shape[0] != y.shape[0]:
            raise InvalidArgumentError(
                f"features have {X.shape[0]} rows but response has {y.shape[0]} entries"
            )
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise InvalidArgumentError("NaN or Inf entries are not accepted")
        if self.column_standardized:
            ss = np.sum(X * X, axis=0)
            if np.any(np.abs(ss - 1.0) > 1e-8):
                raise InvalidArgumentError(
                    "column_standardized is set but column sums of squares are not 1"
                )
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "response", y)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "DataSet":
        """Rows ``rows`` (may repeat) as a new, unstandardized DataSet."""
        rows = np.asarray(rows, dtype=np.intp)
        return DataSet(self.features[rows], self.response[rows])

    def is_binary(self) -> bool:
        return bool(np.all((self.response == 0.0) | (self.response == 1.0)))

    def standardize(self) -> tuple["DataSet", "Standardization"]:
        """Center columns and scale them to unit sum of squares.

        Constant columns are left at zero with scale 1.
        """
        X = self.features
        means = X.mean(axis=0)
        Xc = X - means
        scales = np.sqrt(np.sum(Xc * Xc, axis=0))
        constant = scales <= 1e-12 * max(1.0, float(np.max(np.abs(X), initial=0.0)))
        scales = np.where(constant, 1.0, scales)
        Xs = Xc / scales
        Xs[:, constant] = 0.0
        flag = not np.any(constant)
        return (
            DataSet(Xs, self.response, column_standardized=flag),
            Standardization(means=means, scales=scales),
        )


@dataclass(frozen=True)
class Standardization:
    """Column means and scales applied by :meth:`DataSet.standardize`."""

    means: np.ndarray
    scales: np.ndarray

    def to_original(self, fit: "CoefficientVector") -> "CoefficientVector":
        """Express a fit made on standardized columns on the original scale."""
        values = fit.values / self.scales
        intercept = fit.intercept - float(values @ self.means)
        return CoefficientVector(
            values=values,
            intercept=intercept,
            converged=fit.converged,
            n_iter=fit.n_iter,
            kkt_violation=fit.kkt_violation,
        )

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.means) / self.scales


@dataclass
class CoefficientVector:
    """
    A fitted linear predictor ``x -> x'values + intercept``.

    ``converged``, ``n_iter`` and ``kkt_violation`` describe how the solver
    terminated; a non-converged result still holds the last iterate.
    """

    values: np.ndarray
    intercept: float = 0.0
    converged: bool = True
    n_iter: int = 0
    kkt_violation: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).ravel()
        self.intercept = float(self.intercept)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.values))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.values + self.intercept

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.predict(X))


@dataclass(frozen=True)
class RegularizationGrid:
    """Strictly decreasing positive regularization values."""

    values: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if v.size < 1:
            raise InvalidArgumentError("a regularization grid needs at least one value")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise InvalidArgumentError("regularization values must be positive and finite")
        if np.any(np.diff(v) >= 0):
            raise InvalidArgumentError("regularization values must be strictly decreasing")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, j):
        return float(self.values[j])

    def __iter__(self):
        return (float(v) for v in self.values)


# =============================================================================
# Lasso: cyclic coordinate descent on the centered Gram matrix
# =============================================================================


@njit(cache=True, nogil=True)
def _lasso_gradient(G, c, beta, g):
    # g = X'r for the centered problem
    p = beta.shape[0]
    for j in range(p):
        s = c[j]
        for k in range(p):
            s -= G[j, k] * beta[k]
        g[j] = s


@njit(cache=True, nogil=True)
def _lasso_kkt(G, g, beta, pen):
    worst = 0.0
    for j in range(beta.shape[0]):
        if beta[j] > 0.0:
            v = abs(-2.0 * g[j] + pen[j])
        elif beta[j] < 0.0:
            v = abs(-2.0 * g[j] - pen[j])
        else:
            v = abs(2.0 * g[j]) - pen[j]
            if v < 0.0:
                v = 0.0
        if v > worst:
            worst = v
    return worst


@njit(cache=True, nogil=True)
def _lasso_objective(G, c, yy, beta, pen):
    p = beta.shape[0]
    quad = 0.0
    lin = 0.0
    l1 = 0.0
    for j in range(p):
        s = 0.0
        for k in range(p):
            s += G[j, k] * beta[k]
        quad += beta[j] * s
        lin += c[j] * beta[j]
        l1 += pen[j] * abs(beta[j])
    return yy - 2.0 * lin + quad + l1


@njit(cache=True, nogil=True)
def _lasso_cd(G, c, yy, pen, beta, tol, max_iter, history):
    """Cyclic coordinate descent in place on ``beta``.

    ``pen[j]`` is the full per-coordinate penalty ``lam * w_j``. When
    ``history`` is non-empty the objective after every sweep is stored.
    Returns (sweeps, kkt_violation, converged).
    """
    p = beta.shape[0]
    g = np.empty(p)
    _lasso_gradient(G, c, beta, g)
    record = history.shape[0] > 0
    sweeps = 0
    converged = False
    kkt = np.inf
    while sweeps < max_iter:
        sweeps += 1
        max_delta = 0.0
        for j in range(p):
            gjj = G[j, j]
            if gjj <= 0.0:
                continue
            old = beta[j]
            rho = g[j] + gjj * old
            t = 0.5 * pen[j]
            if rho > t:
                new = (rho - t) / gjj
            elif rho < -t:
                new = (rho + t) / gjj
            else:
                new = 0.0
            d = new - old
            if d != 0.0:
                beta[j] = new
                for k in range(p):
                    g[k] -= G[k, j] * d
                if abs(d) > max_delta:
                    max_delta = abs(d)
        if record and sweeps <= history.shape[0]:
            history[sweeps - 1] = _lasso_objective(G, c, yy, beta, pen)
        if max_delta <= tol:
            _lasso_gradient(G, c, beta, g)
            kkt = _lasso_kkt(G, g, beta, pen)
            if kkt <= tol:
                converged = True
                break
    if not converged:
        _lasso_gradient(G, c, beta, g)
        kkt = _lasso_kkt(G, g, beta, pen)
    return sweeps, kkt, converged


def _centered_moments(X: np.ndarray, y: np.ndarray):
    xm = X.mean(axis=0)
    ym = float(y.mean())
    Xc = X - xm
    yc = y - ym
    G = np.ascontiguousarray(Xc.T @ Xc)
    c = np.ascontiguousarray(Xc.T @ yc)
    yy = float(yc @ yc)
    return G, c, yy, xm, ym


def _check_tol(tol, max_iter):
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    if int(max_iter) < 1:
        raise InvalidArgumentError("max_iter must be a positive integer")


def lasso_path(
    data: DataSet,
    lambdas: Iterable[float],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    penalty_weights: Optional[np.ndarray] = None,
) -> list[CoefficientVector]:
    """
    Lasso fits along a sequence of penalties, warm-starting each from the last.

    Parameters
    ----------
    data : DataSet
    lambdas : iterable of float
        Positive penalties, visited in the given order.
    tol, max_iter
        Per-fit tolerance on coefficient change and KKT violation, and
        maximum number of sweeps.
    penalty_weights : ndarray of shape (p,), optional
        Per-feature multipliers on the penalty (all ones by default).

    Returns
    -------
    list of CoefficientVector, one per penalty.
    """
    lambdas = [float(v) for v in lambdas]
    for lam in lambdas:
        if not lam > 0:
            raise InvalidArgumentError(f"lambda must be positive, got {lam}")
    _check_tol(tol, max_iter)
    p = data.n_features
    if penalty_weights is None:
        weights = np.ones(p)
    else:
        weights = np.asarray(penalty_weights, dtype=np.float64).ravel()
        if weights.shape != (p,) or np.any(weights < 0):
            raise InvalidArgumentError("penalty_weights must be nonnegative with length p")
    G, c, yy, xm, ym = _centered_moments(data.features, data.response)
    beta = np.zeros(p)
    no_history = np.empty(0)
    fits = []
    for lam in lambdas:
        pen = lam * weights
        sweeps, kkt, ok = _lasso_cd(G, c, yy, pen, beta, float(tol), int(max_iter), no_history)
        values = beta.copy()
        fits.append(
            CoefficientVector(
                values=values,
                intercept=ym - float(xm @ values),
                converged=bool(ok),
                n_iter=int(sweeps),
                kkt_violation=float(kkt),
            )
        )
    return fits


def fit_lasso(
    data: DataSet,
    lam: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    penalty_weights: Optional[np.ndarray] = None,
) -> CoefficientVector:
    """Single Lasso fit from a zero start. See :func:`lasso_path`."""
    return lasso_path(data, [lam], tol=tol, max_iter=max_iter, penalty_weights=penalty_weights)[0]


def lasso_objective_history(
    data: DataSet, lam: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> np.ndarray:
    """Objective value after each coordinate-descent sweep (diagnostics)."""
    if not lam > 0:
        raise InvalidArgumentError("lambda must be positive")
    G, c, yy, _, _ = _centered_moments(data.features, data.response)
    p = data.n_features
    beta = np.zeros(p)
    history = np.full(int(max_iter), np.nan)
    sweeps, _, _ = _lasso_cd(G, c, yy, lam * np.ones(p), beta, float(tol), int(max_iter), history)
    return history[:sweeps]


def lasso_objective(data: DataSet, fit: CoefficientVector, lam: float) -> float:
    r = data.response - fit.predict(data.features)
    return float(r @ r + lam * np.sum(np.abs(fit.values)))


# =============================================================================
# Ordinary least squares on a support
# =============================================================================


def _as_support(support, p: int) -> np.ndarray:
    idx = np.unique(np.asarray(list(support), dtype=np.intp))
    if idx.size and (idx[0] < 0 or idx[-1] >= p):
        raise InvalidArgumentError(f"support indices must lie in [0, {p})")
    return idx


def fit_ols(data: DataSet, support: Optional[Iterable[int]] = None, fit_intercept: bool = True) -> CoefficientVector:
    """
    Least squares restricted to the columns in ``support``.

    Coefficients outside the support are exactly zero. Rank-deficient
    restricted designs give the minimum-norm solution. An empty support
    gives the mean predictor (or the zero predictor without intercept).
    """
    X, y = data.features, data.response
    p = X.shape[1]
    idx = np.arange(p) if support is None else _as_support(support, p)
    values = np.zeros(p)
    if fit_intercept:
        ym = float(y.mean())
        if idx.size == 0:
            return CoefficientVector(values, ym)
        Xs = X[:, idx]
        xm = Xs.mean(axis=0)
        sol = np.linalg.lstsq(Xs - xm, y - ym, rcond=None)[0]
        values[idx] = sol
        return CoefficientVector(values, ym - float(xm @ sol))
    if idx.size == 0:
        return CoefficientVector(values, 0.0)
    sol = np.linalg.lstsq(X[:, idx], y, rcond=None)[0]
    values[idx] = sol
    return CoefficientVector(values, 0.0)


# =============================================================================
# Logistic regression
# =============================================================================


def _sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_nll(X: np.ndarray, y: np.ndarray, values: np.ndarray, intercept: float) -> float:
    """Negative log-likelihood ``sum_i log(1 + e^z_i) - y_i z_i``."""
    z = np.asarray(X, dtype=np.float64) @ np.asarray(values, dtype=np.float64) + intercept
    return float(np.sum(np.logaddexp(0.0, z) - y * z))


def logistic_gradient(X: np.ndarray, y: np.ndarray, values: np.ndarray, intercept: float):
    """Gradient of :func:`logistic_nll` as ``(d/dvalues, d/dintercept)``."""
    X = np.asarray(X, dtype=np.float64)
    resid = _sigmoid(X @ values + intercept) - y
    return X.T @ resid, float(resid.sum())


@njit(cache=True, nogil=True)
def _softplus(z):
    if z > 0.0:
        return z + np.log1p(np.exp(-z))
    return np.log1p(np.exp(z))


@njit(cache=True, nogil=True)
def _sigm(z):
    if z >= 0.0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


@njit(cache=True, nogil=True)
def _logit_value(X, y, w, b):
    n, p = X.shape
    b = b / np.sqrt(n)
    f = 0.0
    for i in range(n):
        z = b
        for j in range(p):
            z += X[i, j] * w[j]
        f += _softplus(z) - y[i] * z
    return f


@njit(cache=True, nogil=True)
def _logit_value_grad(X, y, w, b, gw):
    n, p = X.shape
    b = b / np.sqrt(n)
    f = 0.0
    gb = 0.0
    for j in range(p):
        gw[j] = 0.0
    for i in range(n):
        z = b
        for j in range(p):
            z += X[i, j] * w[j]
        f += _softplus(z) - y[i] * z
        r = _sigm(z) - y[i]
        gb += r
        for j in range(p):
            gw[j] += X[i, j] * r
    return f, gb / np.sqrt(n)


@njit(cache=True, nogil=True)
def _logistic_prox_grad(X, y, pen, w, b, tol, max_iter, history):
    """Proximal gradient with backtracking, in place on ``w``.

    The intercept enters as ``b`` times a constant column of ones scaled to
    unit norm. Returns (iterations, b, residual, converged); the residual is
    the sup-norm of the gradient mapping at the last accepted step.
    """
    p = w.shape[0]
    gw = np.empty(p)
    w_new = np.empty(p)
    f, gb = _logit_value_grad(X, y, w, b, gw)
    t = 1.0
    resid = np.inf
    converged = False
    it = 0
    record = history.shape[0] > 0
    while it < max_iter:
        it += 1
        while True:
            lin = 0.0
            sq = 0.0
            for j in range(p):
                u = w[j] - t * gw[j]
                thr = t * pen[j]
                if u > thr:
                    v = u - thr
                elif u < -thr:
                    v = u + thr
                else:
                    v = 0.0
                w_new[j] = v
                d = v - w[j]
                lin += gw[j] * d
                sq += d * d
            b_new = b - t * gb
            db = b_new - b
            lin += gb * db
            sq += db * db
            f_new = _logit_value(X, y, w_new, b_new)
            if f_new <= f + lin + sq / (2.0 * t) or t < 1e-30:
                break
            t *= 0.5
        step_max = 0.0
        for j in range(p):
            d = abs(w_new[j] - w[j])
            if d > step_max:
                step_max = d
            w[j] = w_new[j]
        if abs(db) > step_max:
            step_max = abs(db)
        b = b_new
        resid = step_max / t
        f, gb = _logit_value_grad(X, y, w, b, gw)
        if record and it <= history.shape[0]:
            l1 = 0.0
            for j in range(p):
                l1 += pen[j] * abs(w[j])
            history[it - 1] = f + l1
        if resid <= tol:
            converged = True
            break
        t = min(_MAX_STEP, 2.0 * t)
    return it, b, resid, converged


def _check_binary(data: DataSet):
    y = data.response
    if not data.is_binary():
        raise InvalidArgumentError("classification response must take values in {0, 1}")
    frac = float(y.mean())
    if frac <= 0.0 or frac >= 1.0:
        raise InvalidArgumentError("both classes must be present in the response")
    return frac


def _logit(p: float) -> float:
    return float(np.log(p / (1.0 - p)))


class _LogisticScaling:
    """Centered, unit-norm reparametrization used by the proximal solver.

    With ``u_j = s_j w_j`` and ``v = sqrt(n) (b + mu'w)`` every coordinate,
    including the intercept, acts through a unit-norm column, which keeps a
    single step size well matched to all of them.
    """

    def __init__(self, X: np.ndarray):
        n = X.shape[0]
        self.sqrt_n = float(np.sqrt(n))
        self.means = X.mean(axis=0)
        Xc = X - self.means
        norms = np.sqrt(np.sum(Xc * Xc, axis=0))
        self.scales = np.where(norms > 0.0, norms, 1.0)
        self.X = np.ascontiguousarray(Xc / self.scales)

    def to_scaled(self, w, b):
        return w * self.scales, self.sqrt_n * (b + float(self.means @ w))

    def to_original(self, u, v):
        w = u / self.scales
        return w, v / self.sqrt_n - float(self.means @ w)


def logistic_l1_path(
    data: DataSet,
    lambdas: Iterable[float],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    penalty_weights: Optional[np.ndarray] = None,
) -> list[CoefficientVector]:
    """L1-logistic fits along a penalty sequence with warm starts.

    The first fit starts at the intercept-only optimum.
    """
    lambdas = [float(v) for v in lambdas]
    for lam in lambdas:
        if not lam >= 0:
            raise InvalidArgumentError(f"lambda must be nonnegative, got {lam}")
    _check_tol(tol, max_iter)
    frac = _check_binary(data)
    p = data.n_features
    weights = np.ones(p) if penalty_weights is None else np.asarray(penalty_weights, dtype=np.float64)
    sc = _LogisticScaling(data.features)
    u, v = sc.to_scaled(np.zeros(p), _logit(frac))
    no_history = np.empty(0)
    fits = []
    for lam in lambdas:
        it, v, resid, ok = _logistic_prox_grad(
            sc.X, data.response, lam * weights / sc.scales, u, v, float(tol), int(max_iter), no_history
        )
        w, b = sc.to_original(u, v)
        fits.append(CoefficientVector(w, b, converged=bool(ok), n_iter=int(it), kkt_violation=float(resid)))
    return fits


def fit_logistic_l1(
    data: DataSet,
    lam: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    penalty_weights: Optional[np.ndarray] = None,
) -> CoefficientVector:
    """
    L1-penalized logistic regression.

    Minimizes ``NLL(values, intercept) + lam * ||values||_1`` with an
    unpenalized intercept. ``kkt_violation`` on the result holds the
    proximal-gradient fixed-point residual.
    """
    return logistic_l1_path(data, [lam], tol=tol, max_iter=max_iter, penalty_weights=penalty_weights)[0]


def logistic_objective_history(
    data: DataSet, lam: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> np.ndarray:
    """Penalized objective after every accepted proximal step (diagnostics)."""
    frac = _check_binary(data)
    p = data.n_features
    sc = _LogisticScaling(data.features)
    u, v = sc.to_scaled(np.zeros(p), _logit(frac))
    history = np.full(int(max_iter), np.nan)
    it, _, _, _ = _logistic_prox_grad(
        sc.X, data.response, lam * np.ones(p) / sc.scales, u, v, float(tol), int(max_iter), history
    )
    return history[:it]


def fit_logistic(
    data: DataSet,
    support: Optional[Iterable[int]] = None,
    tol: float = 1e-8,
    max_iter: int = 100,
) -> CoefficientVector:
    """
    Unpenalized logistic regression on ``support`` by damped Newton steps.

    On separable data the likelihood has no finite maximizer; the iterates
    grow until the gradient falls below ``tol`` or ``max_iter`` is reached,
    and the result still separates the classes.
    """
    X, y = data.features, data.response
    p = X.shape[1]
    idx = np.arange(p) if support is None else _as_support(support, p)
    frac = float(np.clip(y.mean(), 1e-12, 1 - 1e-12))
    theta = np.zeros(idx.size + 1)
    theta[0] = _logit(frac)
    Z = np.empty((X.shape[0], idx.size + 1))
    Z[:, 0] = 1.0
    Z[:, 1:] = X[:, idx]

    def nll(th):
        z = Z @ th
        return float(np.sum(np.logaddexp(0.0, z) - y * z))

    f = nll(theta)
    grad_norm = np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        mu = _sigmoid(Z @ theta)
        grad = Z.T @ (mu - y)
        grad_norm = float(np.max(np.abs(grad)))
        if grad_norm <= tol:
            converged = True
            break
        H = (Z * (mu * (1.0 - mu))[:, None]).T @ Z
        step = np.linalg.lstsq(H, grad, rcond=None)[0]
        t = 1.0
        while True:
            cand = theta - t * step
            f_new = nll(cand)
            if f_new <= f - 1e-4 * t * float(grad @ step) or t < 1e-10:
                break
            t *= 0.5
        if f_new > f:
            break
        theta, f = cand, f_new
    values = np.zeros(p)
    values[idx] = theta[1:]
    return CoefficientVector(values, theta[0], converged=converged, n_iter=it, kkt_violation=grad_norm)


# =============================================================================
# Regularization grid
# =============================================================================


def lambda_max(data: DataSet, task: str = "regression") -> float:
    """Smallest penalty whose solution is identically zero."""
    if task == "regression":
        _, c, _, _, _ = _centered_moments(data.features, data.response)
        return 2.0 * float(np.max(np.abs(c), initial=0.0))
    if task == "classification":
        frac = _check_binary(data)
        g, _ = logistic_gradient(data.features, data.response, np.zeros(data.n_features), _logit(frac))
        return float(np.max(np.abs(g), initial=0.0)) * (1.0 + _LOGISTIC_LMAX_SLACK)
    raise InvalidArgumentError(f"unknown task {task!r}")


def make_lambda_grid(data: DataSet, q: int = 48, ratio: float = 1e-3, task: str = "regression") -> RegularizationGrid:
    """
    ``q`` log-spaced penalties from ``lambda_max`` down to ``ratio * lambda_max``.

    Raises
    ------
    InvalidArgumentError
        If ``q < 1``, ``ratio`` is outside (0, 1), or the response is
        constant so that ``lambda_max`` is zero.
    """
    q = int(q)
    if q < 1:
        raise InvalidArgumentError("grid size q must be at least 1")
    if not 0.0 < ratio < 1.0:
        raise InvalidArgumentError("grid ratio must lie in (0, 1)")
    lmax = lambda_max(data, task)
    if not lmax > 0:
        raise InvalidArgumentError("lambda_max is zero: the response is constant or uncorrelated with every column")
    if q == 1:
        return RegularizationGrid(np.array([lmax]))
    values = np.geomspace(lmax, ratio * lmax, q)
    values[0] = lmax
    return RegularizationGrid(values)

