import numpy as np
import pytest

import hysim as h


@pytest.fixture
def constant_model():
    """f = 1, g = 0.5, R_L = 6: every layer has a hand-solvable closed form."""
    return h.make_constant_model(1.0, 0.5, 6.0)


@pytest.fixture
def linear_model():
    return h.make_linear_family(1.0, 0.5, 0.3, 6.0)


@pytest.fixture
def power_model():
    return h.make_power_family(1.8, 0.8, 0.8, 1.0, 1.2, 0.6, 8.0)


def random_model(rng):
    """A random admissible model from one of the three analytic families."""
    family = rng.integers(0, 3)
    if family == 0:
        alpha1 = rng.uniform(0.5, 2.0)
        beta1 = rng.uniform(0.0, alpha1)
        beta2 = rng.uniform(0.1, 1.5)
        r_l = alpha1 + beta2 + rng.uniform(1.0, 6.0)
        return h.make_linear_family(alpha1, beta1, beta2, r_l)
    if family == 1:
        f_val = rng.uniform(0.2, 2.0)
        g_val = rng.uniform(0.0, 1.0)
        r_l = f_val + g_val + rng.uniform(1.0, 6.0)
        return h.make_constant_model(f_val, g_val, r_l)
    alpha1 = rng.uniform(0.8, 2.0)
    beta1 = rng.uniform(0.0, alpha1)
    alpha2 = rng.uniform(0.0, 1.0)
    beta2 = alpha2 + rng.uniform(0.05, 1.0)
    gamma1 = rng.uniform(0.3, 1.0)
    gamma2 = rng.uniform(0.3, 1.0)
    r_l = alpha1 + beta2 + rng.uniform(1.0, 6.0)
    return h.make_power_family(alpha1, beta1, gamma1, alpha2, beta2, gamma2, r_l)


def random_prices(model, rng):
    """Prices on a scale where all three services can plausibly win users."""
    s_b0 = float(model.s_b(0.0))
    p_l = rng.uniform(0.0, model.R_L - s_b0)
    p_a = rng.uniform(0.0, float(model.g(1.0)) + 0.2)
    return h.PriceVector(p_l, p_a)
