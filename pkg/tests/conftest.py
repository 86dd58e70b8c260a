import numpy as np
import pytest

from sparse_ou import Trajectory, make_drift, sufficient_stats
from sparse_ou.sim import sample_trajectory


def random_stable_matrix(rng: np.random.Generator, d: int, margin: float = 0.3) -> np.ndarray:
    """Random matrix shifted so every eigenvalue real part exceeds ``margin``."""
    a = rng.normal(size=(d, d))
    shift = -min(np.linalg.eigvals(a).real.min(), 0.0) + margin
    return a + shift * np.eye(d)


def random_stats(rng: np.random.Generator, d: int):
    """Well-conditioned sufficient statistics from a short simulated path."""
    drift = make_drift(random_stable_matrix(rng, d))
    traj = sample_trajectory(drift, T=20.0, dt=0.02, seed=int(rng.integers(2**31)))
    return sufficient_stats(traj)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
