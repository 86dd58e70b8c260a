"""Sufficient statistics and the drift likelihood.

For a path X on [0, T] the negative log-likelihood of a drift candidate A
reduces to

    L(A) = <A, G> + 1/2 tr(A C A^T),

where C = (1/T) int X X^T dt is the empirical second-moment matrix and
G_ij = (1/T) int X^j dX^i collects the Ito cross-integrals.  On a discrete
grid both integrals are evaluated at the left endpoint: the Ito sum must
pair X_k with the increment X_{k+1} - X_k (a midpoint rule would bias the
drift estimate), and the Riemann sum for C uses the same convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sim import Trajectory

__all__ = [
    "SufficientStats",
    "LambdaConfig",
    "sufficient_stats",
    "neg_log_likelihood",
    "grad_neg_log_likelihood",
    "theoretical_lambda",
    "theta",
]


@dataclass(frozen=True)
class SufficientStats:
    """Pair (C, G) plus the horizon T; everything the likelihood needs."""

    c_hat: np.ndarray
    g_hat: np.ndarray
    horizon: float

    @property
    def dim(self) -> int:
        return self.c_hat.shape[0]


@dataclass(frozen=True)
class LambdaConfig:
    """Constants (gamma, epsilon0, tau) entering the theoretical penalty."""

    gamma: float = 2.0
    epsilon0: float = 0.1
    tau: float = 0.0

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not 0 < self.epsilon0 < 1:
            raise ValueError(f"epsilon0 must be in (0, 1), got {self.epsilon0}")
        if not 0 <= self.tau < self.gamma - 1:
            raise ValueError(f"tau must be in [0, gamma - 1), got {self.tau}")


def sufficient_stats(traj: Trajectory) -> SufficientStats:
    """Left-endpoint discretization of (C, G) from a sampled path."""
    if traj.states.shape[0] < 2:
        raise ValueError("trajectory must contain at least 2 states")
    x = traj.states[:-1]
    dx = np.diff(traj.states, axis=0)
    T = traj.horizon
    c = (x.T @ x) * (traj.dt / T)
    c = 0.5 * (c + c.T)
    g = (dx.T @ x) / T
    return SufficientStats(c_hat=c, g_hat=g, horizon=T)


def _check_dims(a: np.ndarray, stats: SufficientStats) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != stats.c_hat.shape:
        raise ValueError(f"drift shape {a.shape} does not match stats dim {stats.dim}")
    return a


def neg_log_likelihood(a, stats: SufficientStats) -> float:
    """<A, G> + 1/2 tr(A C A^T), dropping the A-independent constant."""
    a = _check_dims(a, stats)
    return float(np.sum(a * stats.g_hat) + 0.5 * np.sum((a @ stats.c_hat) * a))


def grad_neg_log_likelihood(a, stats: SufficientStats) -> np.ndarray:
    """Gradient G + A C of the negative log-likelihood."""
    a = _check_dims(a, stats)
    return stats.g_hat + a @ stats.c_hat


def theta(x: float, stats: SufficientStats) -> float:
    """Deviation scale sqrt(4e/T |diag C|_inf (x + log(2 + |log(T diag C)|_inf))).

    The inner log applies entrywise to T * diag(C); the sup-norm is the
    largest absolute entry.
    """
    if not x > 0:
        raise ValueError(f"x must be > 0, got {x}")
    diag = np.diag(stats.c_hat)
    if np.any(diag <= 0):
        raise ValueError("all diagonal entries of C must be strictly positive")
    T = stats.horizon
    d_max = float(np.max(diag))
    log_term = math.log(2.0 + float(np.max(np.abs(np.log(T * diag)))))
    return math.sqrt(4.0 * math.e * d_max / T * (x + log_term))


def theoretical_lambda(stats: SufficientStats, cfg: LambdaConfig) -> float:
    """Theory-driven penalty level gamma * theta(x) at x = 1/2 log(2 pi^2 d^2 / (3 eps0))."""
    d = stats.dim
    x = 0.5 * math.log(2.0 * math.pi**2 * d**2 / (3.0 * cfg.epsilon0))
    return cfg.gamma * theta(x, stats)
