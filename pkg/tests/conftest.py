import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_elliptic_b(rng, n=1):
    """Surface-elliptic curvature triples (b11, b12, b22), b11 > 0."""
    out = []
    for _ in range(n):
        b11 = rng.uniform(0.5, 2.5)
        b22 = rng.uniform(0.5, 2.5)
        b12 = rng.uniform(-0.6, 0.6) * np.sqrt(b11 * b22)
        out.append((b11, b12, b22))
    return out if n > 1 else out[0]


def random_spd_matrix(rng, ridge=0.3):
    w = rng.normal(size=(3, 3))
    return w.T @ w + ridge * np.eye(3)
