"""Exact sampling of multivariate mean-reverting Gaussian trajectories.

Over one step of size dt the process dX = -A X dt + dW has the exact
Gaussian transition

    X_{k+1} | X_k  ~  N( phi X_k , Q ),
    phi = exp(-A dt),     Q = C - phi C phi^T,

with C the stationary covariance of A.  Sampling through (phi, Q) is free
of discretization bias, so coarsening the observation grid (subsampling)
is the only source of time-step effects downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .linops import matrix_exponential
from .model import DriftMatrix

__all__ = [
    "Trajectory",
    "TransitionKernel",
    "transition_kernel",
    "sample_trajectory",
    "subsample",
    "save_trajectory_csv",
    "load_trajectory_csv",
    "derive_seed",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF


def derive_seed(seed: int, index: int) -> int:
    """Mix (seed, index) into an independent 64-bit stream seed.

    splitmix64 applied to seed + (index + 1) * golden-ratio increment; the
    derived seeds are independent of the order replications are scheduled.
    """
    z = (int(seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled path: ``states[k]`` is the state at time k * dt."""

    dt: float
    states: np.ndarray  # shape (n + 1, d)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim != 2 or states.shape[0] < 2:
            raise ValueError(f"states must be (n+1, d) with n >= 1, got {states.shape}")
        if not np.all(np.isfinite(states)):
            raise ValueError("states contain non-finite values")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def n_steps(self) -> int:
        return self.states.shape[0] - 1

    @property
    def horizon(self) -> float:
        return self.n_steps * self.dt


@dataclass(frozen=True)
class TransitionKernel:
    """One-step transition: mean map phi, noise covariance Q and its factor."""

    dt: float
    phi: np.ndarray
    noise_cov: np.ndarray
    noise_chol: np.ndarray


def transition_kernel(drift: DriftMatrix, dt: float) -> TransitionKernel:
    """Exact one-step kernel (phi, Q) for the given drift and step size."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    phi = matrix_exponential(drift.matrix, -dt)
    c_inf = drift.stationary_cov
    q = c_inf - phi @ c_inf @ phi.T
    q = 0.5 * (q + q.T)
    chol = _cholesky_psd(q)
    return TransitionKernel(dt=dt, phi=phi, noise_cov=q, noise_chol=chol)


def _cholesky_psd(q: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, with a tiny jitter retry for near-singular Q."""
    try:
        return np.linalg.cholesky(q)
    except np.linalg.LinAlgError:
        jittered = q + 1e-12 * np.eye(q.shape[0])
        try:
            return np.linalg.cholesky(jittered)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"noise covariance is not positive semidefinite: {exc}") from exc


def sample_trajectory(
    drift: DriftMatrix,
    T: float,
    dt: float,
    seed: int,
    init=None,
    kernel: TransitionKernel | None = None,
) -> Trajectory:
    """Sample a path of n = round(T / dt) exact transition steps.

    When ``init`` is omitted, X_0 is drawn from the stationary law
    N(0, C).  Passing a precomputed ``kernel`` skips rebuilding (phi, Q)
    in replication loops.  Deterministic given ``seed``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    n = int(round(T / dt))
    if n < 1:
        raise ValueError(f"need T >= dt, got T={T}, dt={dt}")
    if kernel is None:
        kernel = transition_kernel(drift, dt)
    d = drift.dim
    rng = np.random.default_rng(seed)
    if init is None:
        c_chol = _cholesky_psd(drift.stationary_cov)
        x0 = c_chol @ rng.standard_normal(d)
    else:
        x0 = np.asarray(init, dtype=float)
        if x0.shape != (d,):
            raise ValueError(f"init must have shape ({d},), got {x0.shape}")
    noise = rng.standard_normal((n, d)) @ kernel.noise_chol.T
    states = np.empty((n + 1, d))
    states[0] = x0
    phi = kernel.phi
    for k in range(n):
        states[k + 1] = phi @ states[k] + noise[k]
    if not np.all(np.isfinite(states)):
        raise NumericError("trajectory contains non-finite states")
    return Trajectory(dt=dt, states=states)


def subsample(traj: Trajectory, factor: int) -> Trajectory:
    """Keep every ``factor``-th state; an exact view onto the same path."""
    if factor < 1 or int(factor) != factor:
        raise ValueError(f"factor must be a positive integer, got {factor}")
    factor = int(factor)
    if traj.n_steps % factor != 0:
        raise ValueError(f"factor {factor} does not divide {traj.n_steps} steps")
    return Trajectory(dt=traj.dt * factor, states=traj.states[::factor])


def save_trajectory_csv(path, traj: Trajectory) -> None:
    """Write `t,x0,...,x{d-1}` rows at full double precision."""
    d = traj.dim
    header = "t," + ",".join(f"x{j}" for j in range(d))
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for k, row in enumerate(traj.states):
            t = k * traj.dt
            fh.write(repr(float(t)) + "," + ",".join(repr(float(x)) for x in row) + "\n")


def load_trajectory_csv(path) -> Trajectory:
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if len(lines) < 3:
        raise ValueError(f"trajectory file needs a header and >= 2 states: {path}")
    times = []
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        times.append(float(cells[0]))
        rows.append([float(x) for x in cells[1:]])
    times = np.asarray(times)
    steps = np.diff(times)
    dt = steps[0]
    if not np.allclose(steps, dt, rtol=1e-9, atol=0.0):
        raise ValueError("time column is not uniformly spaced")
    return Trajectory(dt=float(dt), states=np.asarray(rows))
