"""Composite Simpson quadrature over uniform panels with midpoint samples."""

from __future__ import annotations

import numpy as np

__all__ = ["panel_simpson"]


def panel_simpson(nodes, midpoints, h):
    """Integrate sampled values over K uniform panels of width h.

    ``nodes`` stacks f(t_0),...,f(t_K) along axis 0 (K+1 samples) and
    ``midpoints`` stacks f at the K panel midpoints. Each panel contributes
    (h/6)*(f_k + 4*f_mid + f_{k+1}). Panels are accumulated in ascending
    order with Kahan compensation, so the result is reproducible and does
    not depend on chunking or thread count.
    """
    nodes = np.asarray(nodes, dtype=float)
    midpoints = np.asarray(midpoints, dtype=float)
    if nodes.shape[0] != midpoints.shape[0] + 1:
        raise ValueError(
            f"need K+1 node samples and K midpoint samples, got {nodes.shape[0]} and {midpoints.shape[0]}"
        )
    terms = (h / 6.0) * (nodes[:-1] + 4.0 * midpoints + nodes[1:])
    total = np.zeros(nodes.shape[1:])
    comp = np.zeros_like(total)
    for term in terms:
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total
