"""Shared fixtures: random valid parameter sets and small panels."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_params(rng: np.random.Generator, d: int, p: int = 1,
                  min_beta: float = 0.05):
    """Random valid parameter set with signed coefficients.

    Row masses are drawn from a Dirichlet so the constraint holds
    exactly up to rounding; beta is kept away from 0 so chains are
    irreducible (every oracle test needs that).
    """
    import gbvar

    weights = rng.dirichlet(np.ones(d * p + 1), size=d)
    beta = min_beta + (1.0 - min_beta) * weights[:, -1]
    coef_mass = weights[:, :-1].sum(axis=1)
    scale = np.where(coef_mass > 0, (1.0 - beta) / np.maximum(coef_mass, 1e-300), 0.0)
    mass = weights[:, :-1] * scale[:, None]
    signs = rng.choice([-1.0, 1.0], size=(d, d * p))
    coef = [mass[:, q * d:(q + 1) * d] * signs[:, q * d:(q + 1) * d]
            for q in range(p)]
    beta = 1.0 - np.abs(np.concatenate(coef, axis=1)).sum(axis=1)  # exact rows
    mu_e = rng.uniform(0.2, 0.8, size=d)
    return gbvar.validate_params(coef, beta, mu_e)


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


@pytest.fixture
def example1():
    import gbvar

    return gbvar.dgp_preset("example1")


@pytest.fixture
def small_panel(example1):
    import gbvar

    return gbvar.simulate(example1, gbvar.SimConfig(n=400, seed=101))
