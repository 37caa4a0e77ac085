import numpy as np
import pytest

from qteleport.gates import Gate2x2


def random_unitary_2x2(rng: np.random.Generator) -> Gate2x2:
    """Haar-ish random 2x2 unitary via QR with phase fix."""
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return Gate2x2(q * (d / np.abs(d)))


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return a / np.linalg.norm(a)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
