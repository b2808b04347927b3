import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from qshannon import channels as ch
from qshannon import linalg as la

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def density(seed: int, d: int = 2) -> np.ndarray:
    return la.random_density(d, np.random.default_rng(seed))


def random_qubit_channel(rng, n_kraus: int = 2):
    """Qubit channel from a random Stinespring isometry."""
    v = la.random_unitary(2 * n_kraus, rng)[:, :2].reshape(n_kraus, 2, 2)
    return ch.KrausChannel.from_ops(list(v))


def near_replacer_channel(rng, eps: float = 0.05):
    """(1 - eps) R_sigma + eps T for a random qubit channel T and full-rank sigma."""
    sigma = 0.5 * la.random_density(2, rng) + 0.25 * np.eye(2)
    ops = [np.sqrt(eps) * k for k in random_qubit_channel(rng).kraus_ops]
    ops += [np.sqrt(1 - eps) * k for k in ch.kraus_from_family(ch.Replacer(sigma)).kraus_ops]
    return ch.KrausChannel.from_ops(ops), sigma
