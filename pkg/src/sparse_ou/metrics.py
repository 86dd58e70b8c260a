"""Evaluation metrics and theory diagnostics.

Covers entrywise error norms (including the trajectory-weighted empirical
norm ||M X||_L^2 = tr(M C M^T)), precision/recall/F1 support scoring, the
rank-one deviation exponents H1/H2, a randomized probe of the restricted
eigenvalue constant, and Monte Carlo coverage of the empirical-norm
oracle bound.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .estimators import SolverOptions, lasso
from .model import DriftMatrix
from .sim import derive_seed, sample_trajectory, transition_kernel
from .stats import LambdaConfig, SufficientStats, sufficient_stats, theoretical_lambda

__all__ = [
    "ErrorReport",
    "SupportReport",
    "error_report",
    "support_report",
    "deviation_bounds",
    "re_constant",
    "restricted_sparse_min",
    "oracle_coverage",
    "dense_baseline_f1",
]

DEFAULT_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class ErrorReport:
    l1: float
    frobenius: float
    lq: dict
    empirical: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "l1": self.l1,
                "frobenius": self.frobenius,
                "lq": {str(q): v for q, v in self.lq.items()},
                "empirical": self.empirical,
            }
        )


@dataclass(frozen=True)
class SupportReport:
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f1: float

    def to_json(self) -> str:
        return json.dumps(self.__dict__)


def error_report(estimate, truth: DriftMatrix, stats: SufficientStats, qs=(1.0, 2.0)) -> ErrorReport:
    """Entrywise l1/Frobenius/lq errors plus the empirical norm of the gap."""
    delta = np.asarray(estimate, dtype=float) - truth.matrix
    if delta.shape != truth.matrix.shape:
        raise ValueError("estimate and truth dimensions differ")
    lq = {}
    for q in qs:
        if not 1.0 <= q <= 2.0:
            raise ValueError(f"q must lie in [1, 2], got {q}")
        lq[float(q)] = float(np.sum(np.abs(delta) ** q) ** (1.0 / q))
    emp_sq = float(np.sum((delta @ stats.c_hat) * delta))
    return ErrorReport(
        l1=float(np.sum(np.abs(delta))),
        frobenius=float(np.sqrt(np.sum(delta**2))),
        lq=lq,
        empirical=math.sqrt(max(emp_sq, 0.0)),
    )


def support_report(estimate, truth: DriftMatrix, zero_tol: float = DEFAULT_ZERO_TOL) -> SupportReport:
    """Score detected non-zeros against the true support.

    Entries with magnitude above ``zero_tol`` count as detections.  When
    there are no detections (or no true positives) the undefined
    precision/recall are reported as 0, hence F1 = 0.
    """
    if zero_tol < 0:
        raise ValueError(f"zero_tol must be >= 0, got {zero_tol}")
    detected = np.abs(np.asarray(estimate, dtype=float)) > zero_tol
    true_supp = truth.matrix != 0.0
    tp = int(np.sum(detected & true_supp))
    fp = int(np.sum(detected & ~true_supp))
    fn = int(np.sum(~detected & true_supp))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return SupportReport(
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
        precision=precision,
        recall=recall,
        f1=f1,
    )


def dense_baseline_f1(density: float) -> float:
    """F1 of an estimator that declares every entry non-zero: 2 rho / (1 + rho)."""
    if not 0 <= density <= 1:
        raise ValueError(f"density must be in [0, 1], got {density}")
    return 2.0 * density / (1.0 + density)


def deviation_bounds(R: float, u, c_inf) -> tuple[float, float]:
    """Exponents (H1, H2) governing upper/lower deviations of u^T C_hat u.

    With r = R / (u^T C u) and the rank-one identity
    det(I + x y^T) = 1 + y^T x these reduce to

        H1(R) = (r - log(1 + r)) / 8
        H2(R) = -(r + log(1 - r)) / 8   for r < 1, +inf otherwise.
    """
    if not R > 0:
        raise ValueError(f"R must be > 0, got {R}")
    u = np.asarray(u, dtype=float)
    if np.linalg.norm(u) > 1.0 + 1e-12:
        raise ValueError("u must satisfy ||u||_2 <= 1")
    c = np.asarray(c_inf, dtype=float)
    quad = float(u @ c @ u)
    if quad <= 0:
        raise ValueError("u^T C u must be > 0 (C SPD and u != 0)")
    r = R / quad
    h1 = (r - math.log1p(r)) / 8.0
    h2 = math.inf if r >= 1.0 else -(r + math.log1p(-r)) / 8.0
    return h1, h2


def _cone_probe(rng: np.random.Generator, d: int, s: int, c0: float) -> np.ndarray:
    """Unit vector near the boundary of the cone ||u||_1 <= (1+c0) ||u_top-s||_1."""
    support = rng.choice(d, size=s, replace=False)
    head = rng.standard_normal(s)
    head /= np.linalg.norm(head)
    u = np.zeros(d)
    u[support] = head
    if s < d:
        # dense tail of equal magnitudes, small enough to keep the head on top
        tail_mag = min(c0 * np.sum(np.abs(head)) / (d - s), 0.999 * np.min(np.abs(head)))
        mask = np.ones(d, dtype=bool)
        mask[support] = False
        u[mask] = tail_mag * rng.choice([-1.0, 1.0], size=d - s)
    return u / np.linalg.norm(u)


def re_constant(
    stats: SufficientStats, s: int, c0: float, n_probes: int = 200, seed: int = 0
) -> float:
    """Randomized upper estimate of the restricted-cone infimum of ||u^T X||_L / ||u||_2.

    Samples unit vectors sitting on (or inside) the cone boundary --
    an s-sparse Gaussian head plus a uniformly-signed dense tail --
    and returns the smallest sqrt(u^T C u).  Being a sampled infimum it
    can only overestimate the true cone constant.
    """
    if not 1 <= s <= stats.dim:
        raise ValueError(f"need 1 <= s <= d, got s={s}, d={stats.dim}")
    if not c0 > 0:
        raise ValueError(f"c0 must be > 0, got {c0}")
    rng = np.random.default_rng(seed)
    c = stats.c_hat
    best = math.inf
    for _ in range(n_probes):
        u = _cone_probe(rng, stats.dim, s, c0)
        best = min(best, float(u @ c @ u))
    return math.sqrt(max(best, 0.0))


def restricted_sparse_min(stats: SufficientStats, s: int) -> float:
    """Exact min of ||u^T X||_L over s-sparse unit vectors (enumerates supports).

    Exponential in d; restricted to d <= 12 where full enumeration is cheap.
    Serves as the lower-bound cross-check for :func:`re_constant`.
    """
    d = stats.dim
    if d > 12:
        raise ValueError(f"exact enumeration limited to d <= 12, got d={d}")
    if not 1 <= s <= d:
        raise ValueError(f"need 1 <= s <= d, got s={s}")
    c = stats.c_hat
    best = math.inf
    for support in combinations(range(d), s):
        idx = np.asarray(support)
        sub = c[np.ix_(idx, idx)]
        best = min(best, float(np.linalg.eigvalsh(sub)[0]))
    return math.sqrt(max(best, 0.0))


def oracle_coverage(
    truth: DriftMatrix,
    d: int,
    s: int,
    T: float,
    reps: int,
    cfg: LambdaConfig,
    seed: int,
    dt: float = 0.01,
) -> float:
    """Fraction of runs in which the empirical-norm bound holds at the theory penalty.

    Per replication: simulate, fit the l1-penalized estimator at the
    theoretical penalty, and test

        ||(A_hat - A0) X||_L <= (1 + gamma) / (gamma kappa) * lambda_T sqrt(d s)

    with kappa = sqrt(sigma_min(C_inf) / 2).  The guarantee is proved for
    symmetric truths; a non-symmetric input triggers a warning but runs.
    """
    if d != truth.dim:
        raise ValueError(f"d={d} does not match truth dimension {truth.dim}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if not np.allclose(truth.matrix, truth.matrix.T, atol=1e-12):
        warnings.warn("oracle coverage guarantee is proved for symmetric drifts only")
    kappa = math.sqrt(float(np.linalg.eigvalsh(truth.stationary_cov)[0]) / 2.0)
    kernel = transition_kernel(truth, dt)
    opts = SolverOptions(acceleration=True)
    hits = 0
    for rep in range(reps):
        traj = sample_trajectory(truth, T, dt, derive_seed(seed, rep), kernel=kernel)
        stats = sufficient_stats(traj)
        lam = theoretical_lambda(stats, cfg)
        fit = lasso(stats, lam, opts=opts)
        delta = fit.matrix - truth.matrix
        lhs = math.sqrt(max(float(np.sum((delta @ stats.c_hat) * delta)), 0.0))
        rhs = (1.0 + cfg.gamma) / (cfg.gamma * kappa) * lam * math.sqrt(d * s)
        hits += lhs <= rhs
    return hits / reps
