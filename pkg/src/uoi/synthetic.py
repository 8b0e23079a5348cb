"""
Synthetic sparse linear models for benchmarking.

Nonzero magnitudes follow one of four shapes on ``[beta_min, beta_max]``:

``laplacian``
    density proportional to ``exp(-|b| / s)`` with ``s = (beta_max - beta_min) / 4``,
    random sign.
``uniform``
    uniform magnitude, random sign.
``exponential``
    density proportional to ``exp(+c |b|)`` with ``c = 4 / (beta_max - beta_min)``,
    random sign.
``clustered``
    equal mixture of normals at ``0.33 * beta_max`` and ``0.9 * beta_max`` with
    standard deviation ``0.05 * beta_max``, positive only.

The design is i.i.d. standard normal (optionally AR(1)-correlated across
columns) with each column z-scored, and ``y = X beta + eps`` with
``eps ~ N(0, m * sum |beta|)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import InvalidArgumentError
from .resampling import SeedSpec
from .solvers import CoefficientVector, DataSet

DISTRIBUTIONS = ("laplacian", "uniform", "exponential", "clustered")
_ALIASES = {
    "laplacian-like-decay": "laplacian",
    "exponential-increase": "exponential",
    "clustered-positive": "clustered",
}

_BETA_STREAM = 0
_DESIGN_STREAM = 1
_NOISE_STREAM = 2


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a synthetic regression problem."""

    n: int = 1200
    p: int = 300
    k: int = 100
    distribution: str = "exponential"
    noise_multiplier: float = 0.2
    beta_min: float = 0.1
    beta_max: float = 3.0
    correlation: float = 0.0
    seed: SeedSpec = field(default_factory=SeedSpec)

    def __post_init__(self):
        dist = _ALIASES.get(self.distribution, self.distribution)
        if dist not in DISTRIBUTIONS:
            raise InvalidArgumentError(f"distribution must be one of {DISTRIBUTIONS}")
        object.__setattr__(self, "distribution", dist)
        object.__setattr__(self, "seed", SeedSpec.coerce(self.seed))
        if int(self.n) < 1 or int(self.p) < 1:
            raise InvalidArgumentError("n and p must be positive")
        if not 0 <= int(self.k) <= int(self.p):
            raise InvalidArgumentError("k must lie in [0, p]")
        if not 0 <= self.beta_min <= self.beta_max:
            raise InvalidArgumentError("need 0 <= beta_min <= beta_max")
        if self.noise_multiplier < 0:
            raise InvalidArgumentError("noise_multiplier must be nonnegative")
        if not -1 < self.correlation < 1:
            raise InvalidArgumentError("correlation must lie in (-1, 1)")

    @property
    def sparsity(self) -> float:
        return 1.0 - self.k / self.p

    def with_seed(self, seed) -> "GeneratorSpec":
        return replace(self, seed=SeedSpec.coerce(seed))

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "p": int(self.p),
            "k": int(self.k),
            "distribution": self.distribution,
            "noise_multiplier": float(self.noise_multiplier),
            "beta_min": float(self.beta_min),
            "beta_max": float(self.beta_max),
            "correlation": float(self.correlation),
            "seed": self.seed.to_dict(),
        }


def _truncated_exp_magnitudes(rng, size, lo, hi, rate):
    """Inverse-CDF draws from density proportional to exp(rate * x) on [lo, hi]."""
    u = rng.uniform(size=size)
    if hi == lo or rate == 0.0:
        return lo + (hi - lo) * u
    # x = lo + log(1 + u (e^{rate (hi-lo)} - 1)) / rate, written stably for either sign
    span = rate * (hi - lo)
    return lo + np.log1p(u * np.expm1(span)) / rate


def sample_magnitudes(distribution: str, size: int, beta_min: float, beta_max: float, rng) -> np.ndarray:
    """Draw ``size`` nonzero magnitudes (positive) of the given shape."""
    dist = _ALIASES.get(distribution, distribution)
    lo, hi = float(beta_min), float(beta_max)
    width = hi - lo
    if dist == "uniform":
        return rng.uniform(lo, hi, size=size) if width > 0 else np.full(size, lo)
    if dist == "laplacian":
        rate = -4.0 / width if width > 0 else 0.0
        return _truncated_exp_magnitudes(rng, size, lo, hi, rate)
    if dist == "exponential":
        rate = 4.0 / width if width > 0 else 0.0
        return _truncated_exp_magnitudes(rng, size, lo, hi, rate)
    if dist == "clustered":
        centers = np.array([0.33, 0.9]) * hi
        sd = 0.05 * hi
        out = np.empty(size)
        filled = 0
        while filled < size:
            m = size - filled
            draw = centers[rng.integers(0, 2, size=m)] + sd * rng.standard_normal(m)
            draw = draw[draw > 0]
            out[filled : filled + draw.size] = draw
            filled += draw.size
        return out
    raise InvalidArgumentError(f"unknown distribution {distribution!r}")


def generate_beta(spec: GeneratorSpec) -> CoefficientVector:
    """Exactly ``k`` nonzeros at random positions, magnitudes per ``spec.distribution``."""
    rng = spec.seed.spawn(_BETA_STREAM).rng()
    beta = np.zeros(spec.p)
    if spec.k == 0:
        return CoefficientVector(beta, 0.0)
    positions = np.sort(rng.choice(spec.p, size=spec.k, replace=False))
    mags = sample_magnitudes(spec.distribution, spec.k, spec.beta_min, spec.beta_max, rng)
    if spec.distribution == "clustered":
        signs = np.ones(spec.k)
    else:
        signs = np.where(rng.uniform(size=spec.k) < 0.5, -1.0, 1.0)
    # a zero magnitude would silently change k
    mags = np.where(mags > 0, mags, np.nextafter(0.0, 1.0))
    beta[positions] = signs * mags
    return CoefficientVector(beta, 0.0)


def noise_variance(spec: GeneratorSpec, beta) -> float:
    return float(spec.noise_multiplier * np.sum(np.abs(np.asarray(getattr(beta, "values", beta)))))


def generate_design(spec: GeneratorSpec) -> np.ndarray:
    rng = spec.seed.spawn(_DESIGN_STREAM).rng()
    X = rng.standard_normal((spec.n, spec.p))
    if spec.correlation != 0.0:
        idx = np.arange(spec.p)
        cov = spec.correlation ** np.abs(idx[:, None] - idx[None, :])
        X = X @ np.linalg.cholesky(cov).T
    if spec.n > 1:
        X = X - X.mean(axis=0)
        sd = X.std(axis=0)
        X = X / np.where(sd > 0, sd, 1.0)
    return X


def generate_dataset(spec: GeneratorSpec, beta=None) -> DataSet:
    """``y = X beta + eps`` with z-scored Gaussian columns and ``Var(eps) = m sum|beta|``."""
    beta = generate_beta(spec) if beta is None else beta
    b = np.asarray(getattr(beta, "values", beta), dtype=np.float64).ravel()
    if b.size != spec.p:
        raise InvalidArgumentError("beta length must equal p")
    X = generate_design(spec)
    y = X @ b
    var = noise_variance(spec, b)
    if var > 0:
        y = y + np.sqrt(var) * spec.seed.spawn(_NOISE_STREAM).rng().standard_normal(spec.n)
    return DataSet(X, y)


def generate_classification(
    n: int,
    p: int,
    informative: int,
    seed=0,
    beta_min: float = 1.0,
    beta_max: float = 2.0,
) -> tuple[DataSet, np.ndarray]:
    """Logistic model with ``informative`` nonzero weights among ``p`` standard-normal features."""
    seed = SeedSpec.coerce(seed)
    rng = seed.spawn(_BETA_STREAM).rng()
    beta = np.zeros(p)
    pos = np.sort(rng.choice(p, size=informative, replace=False))
    beta[pos] = rng.uniform(beta_min, beta_max, size=informative) * np.where(
        rng.uniform(size=informative) < 0.5, -1.0, 1.0
    )
    X = seed.spawn(_DESIGN_STREAM).rng().standard_normal((n, p))
    prob = 1.0 / (1.0 + np.exp(-(X @ beta)))
    y = (seed.spawn(_NOISE_STREAM).rng().uniform(size=n) < prob).astype(np.float64)
    return DataSet(X, y), beta


def generate_encoded_lowrank(m: int, n: int, rank: int, seed=0, zero_fraction: float = 0.2) -> np.ndarray:
    """A {-1, 0, 1} matrix obtained by thresholding a random rank-``rank`` product.

    Entries of ``U V'`` are replaced by their sign, and the ``zero_fraction``
    smallest in magnitude are set to 0.
    """
    seed = SeedSpec.coerce(seed)
    rng = seed.rng()
    L = rng.standard_normal((m, rank)) @ rng.standard_normal((rank, n))
    A = np.sign(L)
    if zero_fraction > 0:
        cut = np.quantile(np.abs(L), zero_fraction)
        A[np.abs(L) <= cut] = 0.0
    return A
