"""Nonlinear perturbation families, Hölder constant estimation, and the
contraction condition of the steering fixed-point map.

Each node carries one perturbation f_i(t, x_i) from a small family of named
nonlinearities; the stacked F(t, X) applies them blockwise. The scalar pair
(alpha, rho) with ||F(t, X) - F(t, Y)|| <= alpha ||X - Y||^rho feeds the
contraction constant

    M = alpha * alpha0^2 * beta * gamma * delta * (t1 - t0) + alpha * alpha0

and the fixed-point iteration is justified whenever M t^rho < t for the
relevant distances t (the Boyd-Wong nonlinear-contraction condition).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FAMILY_PARAMS",
    "NodePerturbation",
    "Perturbation",
    "ContractionData",
    "zero_perturbation",
    "estimate_holder_constant",
    "compute_m",
    "check_boyd_wong",
]

# Family name -> exact parameter set. Families are elementwise maps except
# for the additive time term of affine-bounded:
#   zero            f(t, x) = 0
#   scaled-sine     f(t, x) = gain * sin(x)
#   saturation      f(t, x) = gain * limit * tanh(x / limit)
#   sqrt-sublinear  f(t, x) = gain * sqrt(|x|)      (Hölder with rho = 1/2)
#   affine-bounded  f(t, x) = gain * x + offset * cos(t)
FAMILY_PARAMS = {
    "zero": (),
    "scaled-sine": ("gain",),
    "saturation": ("gain", "limit"),
    "sqrt-sublinear": ("gain",),
    "affine-bounded": ("gain", "offset"),
}


@dataclass(frozen=True)
class NodePerturbation:
    """One node's nonlinearity: a family name plus its parameters."""

    family: str
    params: dict

    def __post_init__(self):
        if self.family not in FAMILY_PARAMS:
            raise ValueError(f"unknown family {self.family!r}, expected one of {sorted(FAMILY_PARAMS)}")
        required = set(FAMILY_PARAMS[self.family])
        got = set(self.params)
        if got != required:
            raise ValueError(
                f"family {self.family!r} takes parameters {sorted(required)}, got {sorted(got)}"
            )
        if self.family == "saturation" and not self.params["limit"] > 0:
            raise ValueError(f"saturation limit must be positive, got {self.params['limit']}")
        object.__setattr__(self, "params", dict(self.params))

    def evaluate(self, t, x):
        """f(t, x) for one node state x (1-D array)."""
        x = np.asarray(x, dtype=float)
        return self._apply(np.cos(t), x)

    def _apply(self, cos_t, x):
        if self.family == "zero":
            return np.zeros_like(x)
        if self.family == "scaled-sine":
            return self.params["gain"] * np.sin(x)
        if self.family == "saturation":
            limit = self.params["limit"]
            return self.params["gain"] * limit * np.tanh(x / limit)
        if self.family == "sqrt-sublinear":
            return self.params["gain"] * np.sqrt(np.abs(x))
        return self.params["gain"] * x + self.params["offset"] * cos_t


@dataclass(frozen=True)
class Perturbation:
    """Stacked blockwise perturbation F(t, X) with its Hölder data.

    dims gives the node state dimensions in stacking order; rho in (0, 1] is
    the Hölder exponent and alpha_declared an optional known constant with
    ||F(t,X) - F(t,Y)|| <= alpha ||X - Y||^rho on the region of interest.
    """

    per_node: tuple
    dims: tuple
    rho: float
    alpha_declared: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "per_node", tuple(self.per_node))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.per_node) != len(self.dims):
            raise ValueError(f"{len(self.per_node)} node perturbations for {len(self.dims)} blocks")
        if any(d < 1 for d in self.dims):
            raise ValueError(f"block dimensions must be >= 1, got {self.dims}")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")
        if self.alpha_declared is not None and self.alpha_declared < 0:
            raise ValueError(f"alpha_declared must be >= 0, got {self.alpha_declared}")

    @property
    def n(self):
        return sum(self.dims)

    @property
    def is_zero(self):
        return all(f.family == "zero" for f in self.per_node)

    def evaluate(self, t, X):
        """F(t, X) for one stacked state X of length n."""
        X = np.asarray(X, dtype=float)
        if X.shape != (self.n,):
            raise ValueError(f"state has shape {X.shape}, expected ({self.n},)")
        out = np.empty(self.n)
        cos_t = np.cos(t)
        start = 0
        for f, d in zip(self.per_node, self.dims):
            out[start:start + d] = f._apply(cos_t, X[start:start + d])
            start += d
        return out

    def evaluate_batch(self, ts, Xs):
        """F applied row by row: ts has shape (B,), Xs has shape (B, n)."""
        ts = np.asarray(ts, dtype=float)
        Xs = np.asarray(Xs, dtype=float)
        if Xs.shape != (ts.shape[0], self.n):
            raise ValueError(f"states have shape {Xs.shape}, expected ({ts.shape[0]}, {self.n})")
        out = np.empty_like(Xs)
        cos_t = np.cos(ts)[:, None]
        start = 0
        for f, d in zip(self.per_node, self.dims):
            out[:, start:start + d] = f._apply(cos_t, Xs[:, start:start + d])
            start += d
        return out


def zero_perturbation(dims):
    """The identically zero perturbation on the given block structure."""
    dims = tuple(int(d) for d in dims)
    return Perturbation(
        per_node=tuple(NodePerturbation("zero", {}) for _ in dims),
        dims=dims,
        rho=1.0,
        alpha_declared=0.0,
    )


def estimate_holder_constant(F, rho, box, samples, seed, t_span=(0.0, 1.0)):
    """Empirical lower bound on the Hölder constant of F by pair sampling.

    Draws ``samples`` triples (t, X, Y) with X, Y uniform over the box
    (a (low, high) pair of scalars or length-n arrays) and t uniform over
    t_span, and returns the largest ratio ||F(t,X) - F(t,Y)|| / ||X - Y||**rho.
    All draws come sequentially from one seeded generator, so a run with more
    samples extends a run with fewer and the estimate is nondecreasing in
    ``samples``.
    """
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    low = np.broadcast_to(np.asarray(box[0], dtype=float), (F.n,))
    high = np.broadcast_to(np.asarray(box[1], dtype=float), (F.n,))
    if not (np.isfinite(low).all() and np.isfinite(high).all() and (high > low).all()):
        raise ValueError("box must satisfy low < high componentwise")
    rng = np.random.default_rng(seed)
    t0, t1 = float(t_span[0]), float(t_span[1])
    best = 0.0
    for _ in range(samples):
        t = rng.uniform(t0, t1)
        X = rng.uniform(low, high)
        Y = rng.uniform(low, high)
        gap = float(np.linalg.norm(X - Y))
        if gap == 0.0:
            continue
        ratio = float(np.linalg.norm(F.evaluate(t, X) - F.evaluate(t, Y))) / gap**rho
        best = max(best, ratio)
    return best


def compute_m(bounds, alpha, horizon):
    """Contraction constant of the steering solution map.

    M = alpha * alpha0^2 * beta * gamma * delta * (t1 - t0) + alpha * alpha0,
    built from the linear-part bounds and the perturbation constant alpha.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    span = horizon.t1 - horizon.t0
    return (
        alpha * bounds.alpha0**2 * bounds.beta * bounds.gamma * bounds.delta * span
        + alpha * bounds.alpha0
    )


@dataclass(frozen=True)
class ContractionData:
    """Verdict of the nonlinear-contraction condition M t^rho < t.

    satisfied_globally means the condition holds for every t > 0;
    valid_interval is the open interval of distances t on which it holds
    (upper endpoint math.inf when unbounded), or None when it holds nowhere.
    """

    m: float
    rho: float
    satisfied_globally: bool
    valid_interval: tuple | None


def check_boyd_wong(m, rho):
    """Evaluate M t^rho < t for all t > 0 and locate where it holds.

    For rho = 1 the condition reduces to M < 1. For rho < 1 and M > 0 it
    always fails for small t and holds exactly on (M^(1/(1-rho)), inf);
    both facts are reported rather than glossed over. M = 0 satisfies the
    condition everywhere for any admissible rho.
    """
    if m < 0:
        raise ValueError(f"M must be >= 0, got {m}")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    if m == 0.0:
        return ContractionData(m=m, rho=rho, satisfied_globally=True, valid_interval=(0.0, math.inf))
    if rho == 1.0:
        if m < 1.0:
            return ContractionData(m=m, rho=rho, satisfied_globally=True, valid_interval=(0.0, math.inf))
        return ContractionData(m=m, rho=rho, satisfied_globally=False, valid_interval=None)
    threshold = m ** (1.0 / (1.0 - rho))
    return ContractionData(m=m, rho=rho, satisfied_globally=False, valid_interval=(threshold, math.inf))
