"""Dense linear-algebra primitives: matrix exponential, Lyapunov solve,
spectral diagnostics.

All routines operate on plain square ``numpy`` arrays and are pure
functions of their inputs, so they are safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericError, StabilityError

__all__ = [
    "SpectralInfo",
    "as_square_matrix",
    "matrix_exponential",
    "solve_lyapunov",
    "spectral_info",
]


@dataclass(frozen=True)
class SpectralInfo:
    """Eigenvalues, their minimal real part and the operator (spectral) norm."""

    eigenvalues: np.ndarray
    min_real_part: float
    operator_norm: float


def as_square_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a finite square float matrix."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"{name} must be a square 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def matrix_exponential(a, t: float = 1.0) -> np.ndarray:
    """Compute ``exp(a * t)`` by scaling-and-squaring with Pade approximants."""
    m = as_square_matrix(a)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    return scipy.linalg.expm(m * t)


def solve_lyapunov(a) -> np.ndarray:
    """Solve ``A C + C A^T = I`` for the stationary covariance C.

    Uses the d^2 x d^2 Kronecker vectorization, which is exact up to the
    dense solver's accuracy and entirely adequate at moderate dimensions.
    C equals the integral of ``exp(-A t) exp(-A^T t)`` over [0, inf), so A
    must be stable.

    Parameters
    ----------
    a : array of shape (d, d)
        Drift matrix whose spectrum has strictly positive real parts.

    Returns
    -------
    Symmetric positive-definite array of shape (d, d).
    """
    m = as_square_matrix(a)
    d = m.shape[0]
    info = spectral_info(m)
    if info.min_real_part <= 0.0:
        raise StabilityError(
            f"matrix is not stable: min eigenvalue real part {info.min_real_part:.6g} <= 0"
        )
    eye = np.eye(d)
    # row-major vec: vec(A C + C A^T) = (A (x) I + I (x) A) vec(C)
    kron = np.kron(m, eye) + np.kron(eye, m)
    try:
        c = np.linalg.solve(kron, eye.reshape(-1)).reshape(d, d)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular Kronecker system in Lyapunov solve: {exc}") from exc
    return 0.5 * (c + c.T)


def spectral_info(a) -> SpectralInfo:
    """Eigenvalues plus operator norm (largest singular value) of ``a``."""
    m = as_square_matrix(a)
    try:
        eigs = np.linalg.eigvals(m)
        op_norm = float(scipy.linalg.svdvals(m)[0])
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed to converge: {exc}") from exc
    return SpectralInfo(
        eigenvalues=eigs,
        min_real_part=float(np.min(eigs.real)),
        operator_norm=op_norm,
    )
