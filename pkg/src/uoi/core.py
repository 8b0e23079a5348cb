"""
Union of Intersections: bootstrap-intersection selection followed by
bagged-union estimation.

Selection builds one candidate support per regularization value, either as
the intersection of Lasso supports over ``b1`` bootstrap resamples
(BoLasso) or by thresholding selection frequencies of a randomized Lasso
over half-subsamples (stability selection). Estimation then refits every
candidate by unpenalized least squares (or logistic regression) on each of
``b2`` bootstrap resamples, keeps the candidate with the lowest
out-of-bag loss, and averages the kept estimates. A feature picked in
``m`` of the ``b2`` resamples is therefore shrunk by ``m / b2``, and the
final support is the union of the picked supports.

Randomness is keyed by task, not by execution order:

* selection bootstrap ``k``   -> ``seed.spawn(0).spawn(k)``
* estimation bootstrap ``k``  -> ``seed.spawn(1).spawn(k)``
* stability subsample ``s``   -> ``seed.spawn(2).spawn(s)``

so increasing ``b1`` (or ``b2``) only appends resamples, and the output is
identical for any worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .exceptions import InvalidArgumentError
from .parallel import parallel_map
from .resampling import SeedSpec, bootstrap_indices, half_subsample
from .solvers import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    CoefficientVector,
    DataSet,
    RegularizationGrid,
    fit_logistic,
    fit_ols,
    lasso_path,
    logistic_l1_path,
    logistic_nll,
    make_lambda_grid,
)

Support = tuple[int, ...]

REGRESSION = "regression"
CLASSIFICATION = "classification"
TASKS = (REGRESSION, CLASSIFICATION)
VARIANTS = ("bolasso", "stability")
LOSSES = {REGRESSION: ("mse",), CLASSIFICATION: ("nll", "misclassification")}

_SELECTION_STREAM = 0
_ESTIMATION_STREAM = 1
_STABILITY_STREAM = 2

# Out-of-bag losses closer than this (relative to the evaluation response
# scale) count as ties and go to the sparsest candidate.
_TIE_RTOL = 1e-10


def make_support(indices: Iterable[int]) -> Support:
    return tuple(sorted({int(i) for i in indices}))


def intersect_supports(supports: Sequence[Iterable[int]]) -> Support:
    """Set intersection of a non-empty list of supports."""
    supports = list(supports)
    if not supports:
        raise InvalidArgumentError("cannot intersect an empty list of supports")
    common = set(supports[0])
    for s in supports[1:]:
        common.intersection_update(s)
    return make_support(common)


@dataclass
class SupportFamily:
    """One candidate support per regularization value.

    ``failed_cells`` lists (resample, grid index) pairs whose solver did not
    converge; each such cell contributed the empty support.
    """

    lambdas: np.ndarray
    supports: list[Support]
    failed_cells: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if len(self.supports) != len(self.lambdas):
            raise InvalidArgumentError("a support family needs one support per grid value")

    def __len__(self):
        return len(self.supports)

    def __getitem__(self, j) -> Support:
        return self.supports[j]

    def unique(self) -> list[tuple[int, Support]]:
        """Distinct supports with the lowest grid index at which each appears."""
        seen = {}
        for j, s in enumerate(self.supports):
            seen.setdefault(s, j)
        return sorted(((j, s) for s, j in seen.items()))

    def to_dict(self) -> dict:
        return {
            "lambdas": [float(v) for v in self.lambdas],
            "supports": [list(s) for s in self.supports],
            "failed_cells": [list(c) for c in self.failed_cells],
        }


@dataclass
class UoIConfig:
    """
    Hyperparameters of a UoI run.

    Parameters
    ----------
    b1, b2 : int
        Bootstrap counts for selection and estimation.
    n_lambdas, lambda_ratio : int, float
        Size and depth of the log-spaced grid built from the data when
        ``grid`` is not given.
    grid : RegularizationGrid, optional
        Explicit grid, in the units of the (standardized, if
        ``standardize``) design the solvers see.
    seed : SeedSpec or int
    selection_variant : {"bolasso", "stability"}
    stability_alpha, stability_pi_thr, stability_subsamples
        Randomized-Lasso weight floor, frequency threshold and subsample
        count; only read by the stability variant.
    standardize : bool
        Fit on centered, unit-sum-of-squares columns and report
        coefficients on the original scale.
    """

    b1: int = 20
    b2: int = 10
    n_lambdas: int = 48
    lambda_ratio: float = 1e-3
    grid: Optional[RegularizationGrid] = None
    seed: SeedSpec = field(default_factory=SeedSpec)
    selection_variant: str = "bolasso"
    stability_alpha: float = 0.5
    stability_pi_thr: float = 0.75
    stability_subsamples: int = 100
    standardize: bool = True
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    estimation_loss: Optional[str] = None

    def __post_init__(self):
        self.seed = SeedSpec.coerce(self.seed)
        if self.grid is not None and not isinstance(self.grid, RegularizationGrid):
            self.grid = RegularizationGrid(self.grid)
        self.validate()

    def validate(self):
        if int(self.b1) < 1 or int(self.b2) < 1:
            raise InvalidArgumentError("b1 and b2 must be at least 1")
        if int(self.n_lambdas) < 1:
            raise InvalidArgumentError("n_lambdas must be at least 1")
        if not 0.0 < self.lambda_ratio < 1.0:
            raise InvalidArgumentError("lambda_ratio must lie in (0, 1)")
        known = {name for names in LOSSES.values() for name in names}
        if self.estimation_loss is not None and self.estimation_loss not in known:
            raise InvalidArgumentError(f"estimation_loss must be one of {sorted(known)}")
        if self.selection_variant not in VARIANTS:
            raise InvalidArgumentError(f"selection_variant must be one of {VARIANTS}")
        if self.selection_variant == "stability":
            if not 0.0 < self.stability_alpha <= 1.0:
                raise InvalidArgumentError("stability_alpha must lie in (0, 1]")
            if not 0.0 < self.stability_pi_thr <= 1.0:
                raise InvalidArgumentError("stability_pi_thr must lie in (0, 1]")
            if int(self.stability_subsamples) < 1:
                raise InvalidArgumentError("stability_subsamples must be at least 1")

    def to_dict(self) -> dict:
        return {
            "b1": int(self.b1),
            "b2": int(self.b2),
            "n_lambdas": int(self.n_lambdas),
            "lambda_ratio": float(self.lambda_ratio),
            "grid": None if self.grid is None else [float(v) for v in self.grid.values],
            "seed": self.seed.to_dict(),
            "selection_variant": self.selection_variant,
            "stability_alpha": float(self.stability_alpha),
            "stability_pi_thr": float(self.stability_pi_thr),
            "stability_subsamples": int(self.stability_subsamples),
            "standardize": bool(self.standardize),
            "tol": float(self.tol),
            "max_iter": int(self.max_iter),
            "estimation_loss": self.estimation_loss,
        }

    def loss_for(self, task: str) -> str:
        """Out-of-bag loss used by estimation for ``task``."""
        if self.estimation_loss is None:
            return LOSSES[task][0]
        if self.estimation_loss not in LOSSES[task]:
            raise InvalidArgumentError(f"estimation_loss {self.estimation_loss!r} does not apply to {task}")
        return self.estimation_loss


@dataclass
class ModelEstimate:
    """
    Bagged UoI estimate.

    ``support`` is exactly the nonzero set of ``coefficients``; the
    per-bootstrap lists have one entry per estimation resample.
    """

    coefficients: CoefficientVector
    support: Support
    per_bootstrap_supports: list[Support]
    per_bootstrap_losses: list[float]
    per_bootstrap_choices: list[int]
    family: SupportFamily
    task: str = REGRESSION
    degenerate: bool = False
    warnings: list[str] = field(default_factory=list)

    def predict(self, X):
        return self.coefficients.predict(X)

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "coefficients": [float(v) for v in self.coefficients.values],
            "intercept": float(self.coefficients.intercept),
            "support": list(self.support),
            "per_bootstrap_supports": [list(s) for s in self.per_bootstrap_supports],
            "per_bootstrap_losses": [float(v) for v in self.per_bootstrap_losses],
            "per_bootstrap_choices": list(self.per_bootstrap_choices),
            "family": self.family.to_dict(),
            "degenerate": bool(self.degenerate),
            "warnings": list(self.warnings),
        }


def _check_task(task: str):
    if task not in TASKS:
        raise InvalidArgumentError(f"task must be one of {TASKS}, got {task!r}")


def resolve_grid(data: DataSet, config: UoIConfig, task: str = REGRESSION) -> RegularizationGrid:
    if config.grid is not None:
        return config.grid
    return make_lambda_grid(data, config.n_lambdas, config.lambda_ratio, task=task)


def _penalized_path(data: DataSet, grid: RegularizationGrid, config: UoIConfig, task: str, weights=None):
    fitter = lasso_path if task == REGRESSION else logistic_l1_path
    return fitter(data, grid.values, tol=config.tol, max_iter=config.max_iter, penalty_weights=weights)


def _path_supports(data: DataSet, grid: RegularizationGrid, config: UoIConfig, task: str, weights=None):
    """Supports along the grid and the grid indices whose fit failed."""
    try:
        fits = _penalized_path(data, grid, config, task, weights)
    except InvalidArgumentError:
        # e.g. a single-class resample in classification
        return [()] * len(grid), list(range(len(grid)))
    supports, failed = [], []
    for j, fit in enumerate(fits):
        if fit.converged:
            supports.append(fit.support)
        else:
            supports.append(())
            failed.append(j)
    return supports, failed


def select_bolasso(
    data: DataSet, config: UoIConfig, task: str = REGRESSION, workers: Optional[int] = 1
) -> SupportFamily:
    """Per grid value, intersect penalized-fit supports over ``b1`` bootstraps."""
    _check_task(task)
    grid = resolve_grid(data, config, task)
    root = config.seed.spawn(_SELECTION_STREAM)
    n = data.n_samples

    def one(k):
        plan = bootstrap_indices(n, root.spawn(k))
        return _path_supports(data.subset(plan.indices), grid, config, task)

    results = parallel_map(one, range(int(config.b1)), workers)
    supports = [intersect_supports([r[0][j] for r in results]) for j in range(len(grid))]
    failed = [(k, j) for k, r in enumerate(results) for j in r[1]]
    return SupportFamily(grid.values.copy(), supports, failed)


def stability_frequencies(
    data: DataSet, config: UoIConfig, task: str = REGRESSION, workers: Optional[int] = 1
) -> tuple[RegularizationGrid, np.ndarray, list[tuple[int, int]]]:
    """Selection frequency of every feature at every grid value.

    Each half-subsample is fit with a randomized Lasso whose per-feature
    penalty is ``lam * w_f`` with ``w_f ~ U[alpha, 1]`` drawn once per
    subsample. Returns (grid, frequencies of shape (q, p), failed cells).
    """
    _check_task(task)
    grid = resolve_grid(data, config, task)
    root = config.seed.spawn(_STABILITY_STREAM)
    n, p = data.n_samples, data.n_features
    alpha = float(config.stability_alpha)

    def one(s):
        stream = root.spawn(s)
        plan = half_subsample(n, stream.spawn(0))
        weights = stream.spawn(1).rng().uniform(alpha, 1.0, size=p)
        return _path_supports(data.subset(plan.indices), grid, config, task, weights)

    results = parallel_map(one, range(int(config.stability_subsamples)), workers)
    counts = np.zeros((len(grid), p))
    for supports, _ in results:
        for j, s in enumerate(supports):
            counts[j, list(s)] += 1.0
    failed = [(s, j) for s, r in enumerate(results) for j in r[1]]
    return grid, counts / len(results), failed


def select_stability(
    data: DataSet, config: UoIConfig, task: str = REGRESSION, workers: Optional[int] = 1
) -> SupportFamily:
    """Per grid value, features whose subsample selection frequency reaches ``pi_thr``."""
    if config.selection_variant != "stability":
        raise InvalidArgumentError("select_stability requires selection_variant='stability'")
    grid, freq, failed = stability_frequencies(data, config, task, workers)
    n_sub = int(config.stability_subsamples)
    counts = np.rint(freq * n_sub)
    needed = config.stability_pi_thr * n_sub - 1e-9
    supports = [make_support(np.flatnonzero(row >= needed)) for row in counts]
    return SupportFamily(grid.values.copy(), supports, failed)


def _refit(train: DataSet, support: Support, task: str) -> CoefficientVector:
    if task == REGRESSION:
        return fit_ols(train, support)
    if len(support) == 0:
        frac = float(np.clip(train.response.mean(), 1e-12, 1.0 - 1e-12))
        return CoefficientVector(np.zeros(train.n_features), float(np.log(frac / (1.0 - frac))))
    return fit_logistic(train, support)


def _loss(fit: CoefficientVector, evaluation: DataSet, loss: str) -> float:
    if loss == "mse":
        r = evaluation.response - fit.predict(evaluation.features)
        return float(np.mean(r * r))
    if loss == "nll":
        return logistic_nll(evaluation.features, evaluation.response, fit.values, fit.intercept) / evaluation.n_samples
    predicted = fit.predict(evaluation.features) >= 0.0
    return float(np.mean(predicted != (evaluation.response == 1.0)))


def _loss_scale(evaluation: DataSet, loss: str) -> float:
    if loss == "mse":
        y = evaluation.response
        scale = float(np.mean((y - y.mean()) ** 2))
        if scale <= 0.0:
            scale = float(np.mean(y * y))
        return scale if scale > 0.0 else 1.0
    return 1.0


def estimate_union(
    data: DataSet,
    family: SupportFamily,
    config: UoIConfig,
    task: str = REGRESSION,
    workers: Optional[int] = 1,
) -> ModelEstimate:
    """
    Bagged refits over the support family.

    For each of ``b2`` bootstraps, every distinct candidate support is
    refit on the resample and scored on its out-of-bag rows; the
    lowest-loss candidate is kept (ties go to the lowest grid index). The
    kept estimates, zero outside their supports, are averaged.
    """
    _check_task(task)
    candidates = family.unique()
    loss_name = config.loss_for(task)
    root = config.seed.spawn(_ESTIMATION_STREAM)
    n = data.n_samples

    def one(k):
        plan = bootstrap_indices(n, root.spawn(k))
        train = data.subset(plan.indices)
        oob = plan.out_of_bag()
        note = None
        if oob.size == 0:
            oob = np.arange(n)
            note = f"estimation bootstrap {k} has no out-of-bag rows; scored in-sample"
        evaluation = data.subset(oob)
        tol = _TIE_RTOL * _loss_scale(evaluation, loss_name)
        fits, losses = [], []
        for _, support in candidates:
            fit = _refit(train, support, task)
            fits.append(fit)
            losses.append(_loss(fit, evaluation, loss_name))
        losses_arr = np.asarray(losses)
        finite = np.isfinite(losses_arr)
        if not np.any(finite):
            best = 0
        else:
            best_loss = float(np.min(losses_arr[finite]))
            best = int(np.flatnonzero(finite & (losses_arr <= best_loss + tol))[0])
        j, support = candidates[best]
        fit = fits[best]
        if not fit.converged:
            note = (note + "; " if note else "") + f"estimation bootstrap {k}: refit did not converge"
        return fit, support, float(losses[best]), j, note

    results = parallel_map(one, range(int(config.b2)), workers)
    stacked = np.stack([r[0].values for r in results])
    values = stacked.mean(axis=0)
    intercept = float(np.mean([r[0].intercept for r in results]))
    warnings = [r[4] for r in results if r[4]]
    degenerate = all(len(s) == 0 for s in family.supports)
    if degenerate:
        warnings.append("every candidate support is empty; intercept-only model")
    if family.failed_cells:
        warnings.append(f"{len(family.failed_cells)} selection cells did not converge and were treated as empty")
    coef = CoefficientVector(values, intercept)
    return ModelEstimate(
        coefficients=coef,
        support=coef.support,
        per_bootstrap_supports=[r[1] for r in results],
        per_bootstrap_losses=[r[2] for r in results],
        per_bootstrap_choices=[r[3] for r in results],
        family=family,
        task=task,
        degenerate=degenerate,
        warnings=warnings,
    )


def run_uoi(
    data: DataSet, config: Optional[UoIConfig] = None, task: str = REGRESSION, workers: Optional[int] = 1
) -> ModelEstimate:
    """
    Full UoI fit: selection then bagged estimation.

    With ``config.standardize`` the design is centered and scaled to unit
    column sum of squares first; coefficients are returned on the original
    scale. For ``task="classification"`` the penalized learner is
    L1-logistic regression, refits are unpenalized logistic regressions and
    the out-of-bag loss is the mean negative log-likelihood.
    """
    _check_task(task)
    config = UoIConfig() if config is None else config
    if task == CLASSIFICATION and not data.is_binary():
        raise InvalidArgumentError("classification requires a {0, 1} response")
    if config.standardize:
        work, transform = data.standardize()
    else:
        work, transform = data, None
    if config.selection_variant == "stability":
        family = select_stability(work, config, task, workers)
    else:
        family = select_bolasso(work, config, task, workers)
    estimate = estimate_union(work, family, config, task, workers)
    if transform is not None:
        coef = transform.to_original(estimate.coefficients)
        estimate.coefficients = coef
        estimate.support = coef.support
    return estimate
