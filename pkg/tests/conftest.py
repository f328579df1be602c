import numpy as np
import pytest


def random_density(rng: np.random.Generator, n: int) -> np.ndarray:
    """A Haar-ish random full-rank density matrix (Wishart, normalized)."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = a @ a.conj().T
    return m / np.real(np.trace(m))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
