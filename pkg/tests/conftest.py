"""Shared fixtures: reference optima and small reusable system specs."""

import numpy as np
import pytest

from qst.model import transfer_spec

# Optimal pulse parameters per coupling ratio for the default 51-mode
# channel, frozen from converged optimization runs: g_ratio -> (kappa,
# tau_d, infidelity).  Regenerate with optimize_transfer when the model
# changes; loose test tolerances absorb optimizer-level jitter.
REFERENCE_OPTIMA = {
    0.2: (1.8057, 0.0624, 2.018e-06),
    0.3: (2.8625, 0.1313, 4.13e-05),
    0.4: (4.1130, 0.1910, 2.43e-04),
    0.5: (5.8927, 0.2699, 3.68e-04),
    0.6: (8.1759, 0.3271, 8.27e-04),
    0.7: (11.2674, 0.3755, 8.49e-04),
    0.8: (14.8881, 0.4063, 8.56e-04),
}


@pytest.fixture(scope="session")
def reference_optima():
    return REFERENCE_OPTIMA


@pytest.fixture
def small_spec():
    """Cheap 5-mode system used where the mode count is irrelevant."""
    return transfer_spec(0.5, n_modes=5)


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)
