"""Independent numerical oracles, deliberately different from the package's
own routines: a truncated Taylor matrix exponential with compensated
accumulation, and a brute-force Riemann Gramian."""

import numpy as np


def taylor_expm(A, s=1.0, terms=200):
    """exp(s*A) by direct Taylor summation with Kahan compensation."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    total = np.zeros((n, n))
    comp = np.zeros((n, n))
    term = np.eye(n)

    def add(x):
        nonlocal total, comp
        y = x - comp
        t = total + y
        comp = (t - total) - y
        total = t

    add(term)
    for k in range(1, terms + 1):
        term = (term @ A) * (s / k)
        add(term)
    return total


def riemann_gramian(A, Psi, t0, t1, steps=20000):
    """Midpoint-rule Gramian, independent of the package quadrature."""
    A = np.asarray(A, dtype=float)
    Psi = np.asarray(Psi, dtype=float)
    h = (t1 - t0) / steps
    total = np.zeros((A.shape[0], A.shape[0]))
    for i in range(steps):
        tau = t0 + (i + 0.5) * h
        Phi = taylor_expm(A, t1 - tau)
        G = Phi @ Psi
        total += G @ G.T
    return total * h
