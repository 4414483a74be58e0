import numpy as np
import pytest

import spikekit as sk


@pytest.fixture(scope="session")
def ctx6():
    return sk.make_context(6)


@pytest.fixture(scope="session")
def ball6(ctx6):
    return sk.ball_kernel(ctx6, np.zeros(6), 1.0)


def interior_points(rng, count, n=6, scale=0.8):
    """Seeded points strictly inside the unit ball."""
    z = rng.standard_normal((count, n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    r = scale * rng.random(count) ** (1.0 / n)
    return z * r[:, None]
