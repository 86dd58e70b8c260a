"""Hold-out selection of the penalty level.

The first 80% of the path trains the estimator; the remaining 20% scores
it with its own negative log-likelihood.  The state at the split boundary
terminates the training integrals and initiates the validation
increments, mirroring how a continuous-time integral splits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .estimators import (
    WEIGHT_CAP,
    Estimate,
    SolverOptions,
    fit_sigma_model,
    lasso,
    mle,
)
from .sim import Trajectory
from .stats import SufficientStats, neg_log_likelihood, sufficient_stats

__all__ = [
    "CvResult",
    "default_lambda_grid",
    "split_trajectory",
    "cross_validate",
    "cross_validate_sigma",
    "save_cv_json",
]

METHODS = ("lasso", "adaptive_lasso")
TRAIN_FRACTION = 0.8


@dataclass(frozen=True)
class CvResult:
    lambda_grid: np.ndarray
    validation_scores: np.ndarray
    best_lambda: float
    best_estimate: Estimate


def default_lambda_grid(num: int = 40) -> np.ndarray:
    """40 log-spaced penalty levels between 1e-2 and 1e3."""
    return np.logspace(-2.0, 3.0, num)


def split_trajectory(traj: Trajectory) -> tuple[Trajectory, Trajectory]:
    """Split at step index floor(0.8 n); the boundary state is shared."""
    n = traj.n_steps
    k = int(math.floor(TRAIN_FRACTION * n))
    if k < 1 or n - k < 1:
        raise ValueError(f"trajectory too short to split: {n} steps")
    train = Trajectory(dt=traj.dt, states=traj.states[: k + 1])
    valid = Trajectory(dt=traj.dt, states=traj.states[k:])
    return train, valid


def _validate_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("lambda grid must be non-empty")
    if np.any(grid < 0):
        raise ValueError("lambda grid entries must be >= 0")
    return np.sort(grid)


def cross_validate(
    traj: Trajectory,
    method: str,
    gamma: float = 1.0,
    grid=None,
    opts: SolverOptions | None = None,
) -> CvResult:
    """Fit each grid point on the training segment, score on the held-out one.

    Fits run from the largest penalty down, warm-starting each solve at the
    previous solution.  Ties in the validation score resolve to the
    smallest penalty.  Deterministic: no randomness enters anywhere.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    grid = _validate_grid(default_lambda_grid() if grid is None else grid)
    train, valid = split_trajectory(traj)
    train_stats = sufficient_stats(train)
    valid_stats = sufficient_stats(valid)

    weights = None
    warm = None
    if method == "adaptive_lasso":
        mle_fit = mle(train_stats)
        with np.errstate(divide="ignore"):
            weights = np.minimum(np.abs(mle_fit.matrix) ** (-gamma), WEIGHT_CAP)
        warm = mle_fit.matrix

    fits: list[Estimate] = []
    for lam in grid[::-1]:
        fit = lasso(train_stats, float(lam), weights=weights, opts=opts, init=warm)
        if method == "adaptive_lasso":
            fit = replace(fit, gamma=float(gamma))
        fits.append(fit)
        warm = fit.matrix
    fits.reverse()

    scores = np.array([neg_log_likelihood(f.matrix, valid_stats) for f in fits])
    if not np.all(np.isfinite(scores)):
        raise ValueError("validation score is non-finite; data is degenerate")
    best_idx = int(np.argmin(scores))  # first minimum = smallest lambda on ties
    return CvResult(
        lambda_grid=grid,
        validation_scores=scores,
        best_lambda=float(grid[best_idx]),
        best_estimate=fits[best_idx],
    )


def cross_validate_sigma(
    traj: Trajectory,
    m,
    sigma,
    gamma: float | None = None,
    grid=None,
    opts: SolverOptions | None = None,
) -> CvResult:
    """Hold-out penalty selection for the Sigma-aware model.

    Scores each candidate with the Sigma-weighted likelihood of the
    validation segment.  With ``gamma`` set, weights come from the
    training-segment MLE as in the adaptive fit.
    """
    grid = _validate_grid(default_lambda_grid() if grid is None else grid)
    train, valid = split_trajectory(traj)
    m = np.asarray(m, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    s = sigma @ sigma.T
    p = np.linalg.solve(s, np.eye(traj.dim))

    weights = None
    if gamma is not None:
        train_mle = mle(sufficient_stats(Trajectory(dt=train.dt, states=train.states - m)))
        with np.errstate(divide="ignore"):
            weights = np.minimum(np.abs(train_mle.matrix) ** (-gamma), WEIGHT_CAP)

    valid_stats = sufficient_stats(Trajectory(dt=valid.dt, states=valid.states - m))

    def sigma_score(a: np.ndarray, stats: SufficientStats) -> float:
        return float(np.sum((p @ stats.g_hat) * a) + 0.5 * np.sum((p @ a @ stats.c_hat) * a))

    fits = []
    for lam in grid[::-1]:
        fits.append(fit_sigma_model(train, m, sigma, float(lam), weights=weights, opts=opts))
    fits.reverse()
    scores = np.array([sigma_score(f.matrix, valid_stats) for f in fits])
    best_idx = int(np.argmin(scores))
    return CvResult(
        lambda_grid=grid,
        validation_scores=scores,
        best_lambda=float(grid[best_idx]),
        best_estimate=fits[best_idx],
    )


def save_cv_json(path, result: CvResult) -> None:
    payload = {
        "lambda_grid": [float(x) for x in result.lambda_grid],
        "validation_scores": [float(x) for x in result.validation_scores],
        "best_lambda": result.best_lambda,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
