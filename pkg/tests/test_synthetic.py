import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uoi.exceptions import InvalidArgumentError
from uoi.resampling import SeedSpec
from uoi.solvers import DataSet
from uoi.synthetic import (
    DISTRIBUTIONS,
    GeneratorSpec,
    generate_beta,
    generate_classification,
    generate_dataset,
    generate_design,
    noise_variance,
    sample_magnitudes,
)


def test_k_zero():
    assert not np.any(generate_beta(GeneratorSpec(n=10, p=8, k=0)).values)


def test_degenerate_bounds_give_signs():
    b = generate_beta(GeneratorSpec(n=10, p=50, k=50, distribution="uniform", beta_min=1.0, beta_max=1.0)).values
    assert set(b) <= {-1.0, 1.0} and len(set(b)) == 2


def _hist(distribution, lo=0.1, hi=3.0):
    draws = sample_magnitudes(distribution, 100_000, lo, hi, np.random.default_rng(0))
    assert draws.min() >= lo and draws.max() <= hi
    return np.histogram(draws, bins=10, range=(lo, hi))[0]


def test_laplacian_density_decreases():
    assert np.all(np.diff(_hist("laplacian")) < 0)


def test_exponential_density_increases():
    assert np.all(np.diff(_hist("exponential")) > 0)


def test_uniform_density_flat():
    h = _hist("uniform")
    assert np.all(np.abs(h / h.mean() - 1) < 0.05)


def test_clustered_is_bimodal_and_positive():
    b = generate_beta(GeneratorSpec(n=10, p=4000, k=4000, distribution="clustered", beta_max=3.0)).values
    assert np.all(b > 0)
    near = (np.abs(b - 0.99) < 0.6) | (np.abs(b - 2.7) < 0.6)  # 4 sd
    assert near.mean() > 0.99
    assert 0.45 < np.mean(b < 1.8) < 0.55


def test_aliases():
    assert GeneratorSpec(distribution="laplacian-like-decay").distribution == "laplacian"
    with pytest.raises(InvalidArgumentError):
        GeneratorSpec(distribution="cauchy")


def test_zero_noise_is_exact():
    spec = GeneratorSpec(n=40, p=10, k=3, noise_multiplier=0.0, seed=SeedSpec(2))
    data = generate_dataset(spec)
    np.testing.assert_array_equal(data.response, data.features @ generate_beta(spec).values)


def test_zero_beta_gives_zero_response():
    spec = GeneratorSpec(n=40, p=10, k=0, noise_multiplier=5.0)
    assert noise_variance(spec, np.zeros(10)) == 0.0
    assert not np.any(generate_dataset(spec).response)


def test_noise_variance_monte_carlo():
    spec = GeneratorSpec(n=100_000, p=100, k=100, noise_multiplier=0.2, seed=SeedSpec(4))
    beta = generate_beta(spec).values
    data = generate_dataset(spec)
    resid = data.response - data.features @ beta
    assert np.var(resid, ddof=1) == pytest.approx(0.2 * np.abs(beta).sum(), rel=0.02)


@given(p=st.integers(1, 60), frac=st.floats(0, 1), seed=st.integers(0, 2**32), dist=st.sampled_from(DISTRIBUTIONS))
def test_exact_k_nonzeros(p, frac, seed, dist):
    k = int(round(frac * p))
    spec = GeneratorSpec(n=5, p=p, k=k, distribution=dist, seed=SeedSpec(seed))
    assert np.count_nonzero(generate_beta(spec).values) == k
    assert spec.sparsity == 1 - k / p


def test_design_is_z_scored():
    X = generate_design(GeneratorSpec(n=200, p=6, k=2, seed=SeedSpec(1)))
    np.testing.assert_allclose(X.mean(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(X.std(axis=0), 1, atol=1e-12)
    # dividing by sqrt(n) yields unit sums of squares
    DataSet(X / np.sqrt(200), np.zeros(200), column_standardized=True)


def test_correlated_design():
    X = generate_design(GeneratorSpec(n=20_000, p=3, k=1, correlation=0.6, seed=SeedSpec(3)))
    assert np.corrcoef(X.T)[0, 1] == pytest.approx(0.6, abs=0.02)
    assert np.corrcoef(X.T)[0, 2] == pytest.approx(0.36, abs=0.02)


def test_regeneration_bit_identical():
    spec = GeneratorSpec(n=50, p=20, k=5, seed=SeedSpec(9, (3,)))
    a, b = generate_dataset(spec), generate_dataset(spec)
    assert a.features.tobytes() == b.features.tobytes() and a.response.tobytes() == b.response.tobytes()
    assert spec.with_seed(10) != spec


@pytest.mark.parametrize("kw", [dict(k=11), dict(beta_min=2.0, beta_max=1.0), dict(noise_multiplier=-1.0),
                                dict(n=0), dict(correlation=1.0)])
def test_spec_validation(kw):
    base = dict(n=10, p=10, k=2)
    base.update(kw)
    with pytest.raises(InvalidArgumentError):
        GeneratorSpec(**base)


def test_classification_generator():
    data, beta = generate_classification(500, 10, 2, seed=1)
    assert np.count_nonzero(beta) == 2
    assert set(np.unique(data.response)) == {0.0, 1.0}
    # informative features predict the label better than chance
    margin = data.features @ beta
    assert np.mean((margin > 0) == (data.response == 1)) > 0.7
