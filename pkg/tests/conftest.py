import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

from orlicz_bounds import Gaussian, SymExponential, TabulatedSurvival
from scipy import special


@pytest.fixture(scope="session")
def gaussian():
    return Gaussian()


@pytest.fixture(scope="session")
def symexp():
    return SymExponential(rate=1.0)


@pytest.fixture(scope="session")
def gaussian_table_model():
    """Tabulated rendering of the standard Gaussian survival, dense and deep."""
    ts = np.linspace(0.0, 10.0, 401)
    fs = special.erfc(ts / np.sqrt(2.0))
    return TabulatedSurvival(ts, fs)


@pytest.fixture(scope="session")
def nonconvex_table_model():
    """A valid strictly-decreasing table whose -ln F is not convex."""
    ts = np.linspace(0.0, 25.0, 501)
    # N(t) = t + 0.8 sin(t): increasing (derivative >= 0.2) but with
    # oscillating curvature, so the convexity check must fail.
    n = ts + 0.8 * np.sin(ts)
    fs = np.exp(-n)
    fs[0] = 1.0
    return TabulatedSurvival(ts, fs)
