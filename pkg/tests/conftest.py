import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def atlas():
    """Cached polynomial atlases, keyed by ``(p, q)``."""
    from premodels.render import atlas_for
    return atlas_for


@pytest.fixture(scope="session")
def golden():
    from premodels.numkit import RotationTarget
    return RotationTarget.golden()


@pytest.fixture(scope="session")
def tau_golden(golden):
    from premodels.circle import solve_tau
    return solve_tau(golden, 1e-6)
