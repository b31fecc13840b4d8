"""Dense linear algebra kernels shared across the package.

Thin wrappers over numpy/scipy (LAPACK) that pin down the validation and
accuracy contracts the rest of the code relies on: symmetry gates, the
positive-definiteness threshold, and consistent error types.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "NotPositiveDefiniteError",
    "SYMMETRY_RTOL",
    "PD_RATIO_GATE",
    "mat_exp",
    "spectral_norm",
    "min_eig_sym",
    "solve_spd",
]

# Relative asymmetry tolerated before a matrix is rejected as non-symmetric.
SYMMETRY_RTOL = 1e-12

# Definiteness gate: lambda_min must exceed this fraction of lambda_max.
PD_RATIO_GATE = 1e-10


class NotPositiveDefiniteError(Exception):
    """A matrix required to be symmetric positive definite failed the gate."""


def _as_square(A, name="matrix"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def _symmetrized(W, name="matrix"):
    W = _as_square(W, name)
    scale = float(np.max(np.abs(W))) if W.size else 0.0
    if scale > 0.0 and float(np.max(np.abs(W - W.T))) > SYMMETRY_RTOL * scale:
        raise ValueError(f"{name} is not symmetric (relative asymmetry above {SYMMETRY_RTOL:g})")
    return 0.5 * (W + W.T)


def mat_exp(A, s=1.0):
    """Matrix exponential exp(s*A) of a square matrix."""
    A = _as_square(A, "A")
    return scipy.linalg.expm(float(s) * A)


def spectral_norm(A):
    """Largest singular value of A (operator 2-norm)."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def min_eig_sym(W):
    """Smallest eigenvalue of a symmetric matrix; rejects asymmetric input."""
    W = _symmetrized(W, "W")
    return float(np.linalg.eigvalsh(W)[0])


def solve_spd(W, rhs):
    """Solve W x = rhs for symmetric positive definite W via Cholesky.

    Raises NotPositiveDefiniteError when lambda_min(W) <= 1e-10 * lambda_max(W)
    or the factorization breaks down; upstream this signals an uncontrollable
    or numerically uncontrollable linear part. One step of iterative
    refinement keeps the residual near machine level even close to the gate.
    """
    W = _symmetrized(W, "W")
    rhs = np.asarray(rhs, dtype=float)
    evals = np.linalg.eigvalsh(W)
    lam_min, lam_max = float(evals[0]), float(evals[-1])
    if lam_min <= PD_RATIO_GATE * max(lam_max, 0.0):
        raise NotPositiveDefiniteError(
            f"matrix fails the definiteness gate: lambda_min={lam_min:.6e}, lambda_max={lam_max:.6e}"
        )
    try:
        cho = scipy.linalg.cho_factor(W, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"Cholesky factorization failed: {exc}") from exc
    x = scipy.linalg.cho_solve(cho, rhs)
    x = x + scipy.linalg.cho_solve(cho, rhs - W @ x)
    return x
