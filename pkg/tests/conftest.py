"""Shared fixtures: compile the integrator kernels once per session so that
timed tests measure physics, not JIT compilation."""

import numpy as np
import pytest

from kposim import IntegratorConfig, KpoParams, SdeConfig, integrate, integrate_sde


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    params = KpoParams(delta=0.0, g=0.6, u=0.01, gamma=1.0)
    J = np.zeros((2, 2))
    A0 = np.full(2, 0.01 + 0.01j)
    integrate(A0, params, J, IntegratorConfig(dt=0.05, t_max=0.5))
    integrate_sde(
        A0, params, J,
        SdeConfig(dt=0.01, t_final=0.5, sample_interval=0.1, n_repeats=1),
        seed=0,
    )
