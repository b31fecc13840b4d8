"""Transition matrices, controllability Gramian, rank test, and norm bounds.

Everything here is exact LTI theory for the assembled pair (A, Psi): the
state transition Phi(t, tau) = exp(A (t - tau)), the Gramian

    W = int_{t0}^{t1} Phi(t1, tau) Psi Psi^T Phi(t1, tau)^T dtau,

the Kalman rank of [Psi, A Psi, ..., A^{n-1} Psi], and the scalar bounds
(alpha0, beta, gamma, delta) that feed the contraction constant of the
steering fixed-point map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import PD_RATIO_GATE, mat_exp, spectral_norm
from .quadrature import panel_simpson

__all__ = [
    "NotControllableError",
    "TimeHorizon",
    "TransitionTables",
    "BoundsEstimate",
    "state_transition",
    "transition_tables",
    "gramian",
    "gramian_drift",
    "kalman_rank",
    "compute_bounds",
]

# Kalman rank: singular values below this fraction of the largest column
# norm of the controllability matrix count as zero.
RANK_RTOL = 1e-10

# Gramians refined from K to 2K panels should agree to this relative level;
# larger drift means the grid is too coarse for the dynamics.
DRIFT_TOL = 1e-6


class NotControllableError(Exception):
    """The controllability Gramian failed the positive-definiteness gate."""


@dataclass(frozen=True)
class TimeHorizon:
    """Steering interval [t0, t1] discretized into K uniform panels (K even)."""

    t0: float
    t1: float
    K: int = 200

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise ValueError("t0 and t1 must be finite")
        if not self.t1 > self.t0:
            raise ValueError(f"need t1 > t0, got [{self.t0}, {self.t1}]")
        if self.K < 2 or self.K % 2 != 0:
            raise ValueError(f"K must be an even integer >= 2, got {self.K}")

    @property
    def span(self):
        return self.t1 - self.t0

    @property
    def step(self):
        return self.span / self.K

    def grid(self):
        return np.linspace(self.t0, self.t1, self.K + 1)

    def midpoints(self):
        return self.grid()[:-1] + 0.5 * self.step


@dataclass(frozen=True)
class TransitionTables:
    """Phi(t1, .) sampled at the grid nodes and at the panel midpoints.

    nodes[k] = Phi(t1, t_k) for k = 0..K (so nodes[K] is the identity) and
    midpoints[k] = Phi(t1, t_k + h/2) for k = 0..K-1.
    """

    nodes: np.ndarray
    midpoints: np.ndarray


@dataclass(frozen=True)
class BoundsEstimate:
    """Scalar norm bounds of the linear part over a horizon.

    alpha0 = ||Phi(t1, t0)||, beta = ||Psi Psi^T||, gamma = max_k
    ||Phi(t1, t_k)^T||, delta = 1 / lambda_min(W); grid_used records K.
    """

    alpha0: float
    beta: float
    gamma: float
    delta: float
    grid_used: int


def state_transition(sys, t, tau):
    """Transition matrix Phi(t, tau) = exp(A (t - tau)) of the linear part."""
    return mat_exp(sys.A, t - tau)


def transition_tables(sys, horizon):
    """Tabulate Phi(t1, .) on the grid by repeated one-step multiplication.

    nodes[K] = I and nodes[k] = nodes[k+1] @ exp(A h); midpoints reuse
    nodes[k+1] @ exp(A h/2). One exponential per step size instead of K+1
    independent ones; agreement with direct evaluation is covered by tests.
    """
    K, n = horizon.K, sys.n
    E = mat_exp(sys.A, horizon.step)
    Em = mat_exp(sys.A, 0.5 * horizon.step)
    nodes = np.empty((K + 1, n, n))
    nodes[K] = np.eye(n)
    for k in range(K - 1, -1, -1):
        nodes[k] = nodes[k + 1] @ E
    midpoints = np.empty((K, n, n))
    for k in range(K):
        midpoints[k] = nodes[k + 1] @ Em
    return TransitionTables(nodes=nodes, midpoints=midpoints)


def gramian(sys, horizon, tables=None):
    """Controllability Gramian of (A, Psi) over the horizon.

    Integrates Phi(t1,tau) Psi Psi^T Phi(t1,tau)^T with per-panel Simpson on
    the uniform grid and symmetrizes the accumulated result.
    """
    if tables is None:
        tables = transition_tables(sys, horizon)
    gn = tables.nodes @ sys.Psi
    gm = tables.midpoints @ sys.Psi
    wn = gn @ gn.transpose(0, 2, 1)
    wm = gm @ gm.transpose(0, 2, 1)
    W = panel_simpson(wn, wm, horizon.step)
    return 0.5 * (W + W.T)


def gramian_drift(sys, horizon):
    """Max-entry relative change of the Gramian when K is doubled."""
    W1 = gramian(sys, horizon)
    W2 = gramian(sys, TimeHorizon(horizon.t0, horizon.t1, 2 * horizon.K))
    scale = max(float(np.max(np.abs(W2))), np.finfo(float).tiny)
    return float(np.max(np.abs(W2 - W1))) / scale


def kalman_rank(sys):
    """Numerical rank of [Psi, A Psi, ..., A^{n-1} Psi].

    Rank is counted from the pivoted-QR R diagonal against a threshold of
    1e-10 times the largest column norm, so pure scaling of the system does
    not change the answer.
    """
    blocks = [sys.Psi]
    for _ in range(sys.n - 1):
        blocks.append(sys.A @ blocks[-1])
    ctrb = np.hstack(blocks)
    col_norms = np.linalg.norm(ctrb, axis=0)
    largest = float(col_norms.max()) if col_norms.size else 0.0
    if largest == 0.0:
        return 0
    _, R, _ = scipy.linalg.qr(ctrb, mode="economic", pivoting=True)
    return int(np.sum(np.abs(np.diag(R)) > RANK_RTOL * largest))


def compute_bounds(sys, horizon, tables=None):
    """Norm bounds (alpha0, beta, gamma, delta) of the linear part.

    Raises NotControllableError when the Gramian fails the gate
    lambda_min > 1e-10 * lambda_max, in which case delta = 1/lambda_min
    would be meaningless.
    """
    if tables is None:
        tables = transition_tables(sys, horizon)
    W = gramian(sys, horizon, tables)
    evals = np.linalg.eigvalsh(W)
    lam_min, lam_max = float(evals[0]), float(evals[-1])
    if lam_min <= PD_RATIO_GATE * max(lam_max, 0.0):
        raise NotControllableError(
            f"Gramian fails the definiteness gate: lambda_min={lam_min:.6e}, lambda_max={lam_max:.6e}"
        )
    alpha0 = spectral_norm(tables.nodes[0])
    gamma = max(spectral_norm(tables.nodes[k]) for k in range(horizon.K + 1))
    beta = spectral_norm(sys.Psi @ sys.Psi.T)
    return BoundsEstimate(alpha0=alpha0, beta=beta, gamma=gamma, delta=1.0 / lam_min, grid_used=horizon.K)
