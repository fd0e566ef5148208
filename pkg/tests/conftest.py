import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wvasim.waveguide import REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH, solve_te_modes

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def reference_modes():
    return solve_te_modes(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
