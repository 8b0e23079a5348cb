import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def kkt_violation(X, y, values, intercept, lam, weights=None):
    """Largest violation of the Lasso subgradient conditions, computed directly."""
    r = y - X @ values - intercept
    grad = -2.0 * X.T @ r
    pen = lam * (np.ones(X.shape[1]) if weights is None else weights)
    viol = np.where(
        values != 0,
        np.abs(grad + pen * np.sign(values)),
        np.maximum(np.abs(grad) - pen, 0.0),
    )
    return float(max(np.max(viol, initial=0.0), abs(np.sum(r))))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
