import numpy as np
import pytest

from bicopter_safe import ControlGains, ControllerConfig, PlantParams, SafeSet


@pytest.fixture
def params():
    """Plant constants of the reference experiment."""
    return PlantParams(m=1.0, J=0.2, l=0.2, g=9.81)


@pytest.fixture
def safe():
    return SafeSet(xbar1=[7.0, 5.0], xbar2=[0.5, 0.5])


@pytest.fixture
def cfg(safe):
    return ControllerConfig(gains=ControlGains(k1=1.0, k3=1.0, k4=1.0), safe=safe)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_interior_state(rng, safe, chi_max=0.8, f_range=(0.5, 15.0),
                          rate_max=2.0, theta_max=1.0):
    """Random plant state strictly inside the safe set."""
    from bicopter_safe import PlantState

    chi1 = rng.uniform(-chi_max, chi_max, 2)
    chi2 = rng.uniform(-chi_max, chi_max, 2)
    return PlantState(
        x1=chi1 * safe.xbar1,
        x2=chi2 * safe.xbar2,
        x3=np.array([rng.uniform(-theta_max, theta_max), rng.uniform(*f_range)]),
        x4=rng.uniform(-rate_max, rate_max, 2))
