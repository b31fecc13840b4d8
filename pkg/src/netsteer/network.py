"""Per-node dynamics, coupling topology, and assembly of the stacked system.

Node i evolves as

    dx_i/dt = A_i x_i + sum_j beta_ij H_i C_j x_j + delta_i B_i u_i + f_i(t, x_i)

where C_j reads the m-dimensional coupling output of node j, H_i injects it
into node i, beta_ij weights the directed edge j -> i, and delta_i in {0, 1}
marks whether node i is actuated. Stacking the node states gives

    dX/dt = A X + Psi U + F(t, X)

with A = blockdiag(A_i) + [beta_ij * H_i C_j] and Psi = blockdiag(delta_i * B_i);
the actuation pattern is folded into Psi rather than kept as a separate
selector matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Diagnostic",
    "NetworkValidationError",
    "NodeDynamics",
    "NetworkTopology",
    "NetworkedSystem",
    "validate",
    "assemble",
]


@dataclass(frozen=True)
class Diagnostic:
    """One human-readable validation finding, tied to a node or the topology."""

    node: int | None
    field: str
    message: str

    def __str__(self):
        where = f"node {self.node}" if self.node is not None else "topology"
        return f"{where}: {self.field}: {self.message}"


class NetworkValidationError(Exception):
    """Raised by assemble() when validation finds any diagnostic."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


def _frozen_matrix(value):
    arr = np.atleast_2d(np.asarray(value, dtype=float))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class NodeDynamics:
    """Matrices and dimensions of a single node.

    A is n x n, B is n x p, C is m x n, H is n x m, where n is the node state
    dimension, p its input dimension, and m the network-wide coupling output
    dimension. Arrays are stored read-only.
    """

    index: int
    n: int
    p: int
    m: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "C", "H"):
            object.__setattr__(self, name, _frozen_matrix(getattr(self, name)))

    @classmethod
    def from_matrices(cls, index, A, B, C, H, m=None):
        """Build a node, deriving n and p from A and B; m defaults to rows(C)."""
        A = _frozen_matrix(A)
        B = _frozen_matrix(B)
        C = _frozen_matrix(C)
        H = _frozen_matrix(H)
        if m is None:
            m = C.shape[0]
        return cls(index=int(index), n=A.shape[0], p=B.shape[1], m=int(m), A=A, B=B, C=C, H=H)


@dataclass(frozen=True)
class NetworkTopology:
    """Coupling weights beta (N x N), actuation flags delta (length N), and m."""

    beta: np.ndarray
    delta: np.ndarray
    m: int

    def __post_init__(self):
        object.__setattr__(self, "beta", _frozen_matrix(self.beta))
        delta = np.asarray(self.delta, dtype=float).reshape(-1)
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)

    @property
    def size(self):
        return self.delta.shape[0]


@dataclass(frozen=True)
class NetworkedSystem:
    """Assembled stacked system: dX/dt = A X + Psi U + F(t, X)."""

    n: int
    p: int
    A: np.ndarray
    Psi: np.ndarray
    block_offsets: tuple = field(default=((0, 0),))

    def __post_init__(self):
        object.__setattr__(self, "A", _frozen_matrix(self.A))
        object.__setattr__(self, "Psi", _frozen_matrix(self.Psi))
        object.__setattr__(self, "block_offsets", tuple(tuple(pair) for pair in self.block_offsets))


def _check_shape(diags, node_index, name, arr, expected):
    if arr.shape != expected:
        diags.append(Diagnostic(node_index, name, f"expected shape {expected}, got {arr.shape}"))
        return False
    if not np.isfinite(arr).all():
        diags.append(Diagnostic(node_index, name, "contains non-finite entries"))
        return False
    return True


def validate(nodes, topology):
    """Check node and topology consistency; returns a list of diagnostics.

    An empty list means the pair is assemblable. Every finding names the node
    (or the topology) and the offending field, so callers can surface all
    problems at once instead of stopping at the first.
    """
    diags = []
    nodes = list(nodes)
    if not nodes:
        diags.append(Diagnostic(None, "nodes", "at least one node is required"))
        return diags
    N = len(nodes)
    for node in nodes:
        idx = node.index
        if node.index < 1:
            diags.append(Diagnostic(idx, "index", f"node index must be >= 1, got {node.index}"))
        if node.n < 1:
            diags.append(Diagnostic(idx, "n", f"state dimension must be >= 1, got {node.n}"))
        if node.p < 1:
            diags.append(Diagnostic(idx, "p", f"input dimension must be >= 1, got {node.p}"))
        if node.m < 1:
            diags.append(Diagnostic(idx, "m", f"coupling dimension must be >= 1, got {node.m}"))
        if node.n < 1 or node.p < 1 or node.m < 1:
            continue
        _check_shape(diags, idx, "A", node.A, (node.n, node.n))
        _check_shape(diags, idx, "B", node.B, (node.n, node.p))
        _check_shape(diags, idx, "C", node.C, (node.m, node.n))
        _check_shape(diags, idx, "H", node.H, (node.n, node.m))
        if node.m != topology.m:
            diags.append(Diagnostic(idx, "m", f"coupling dimension {node.m} differs from topology m={topology.m}"))
    if topology.m < 1:
        diags.append(Diagnostic(None, "m", f"coupling dimension must be >= 1, got {topology.m}"))
    if topology.beta.shape != (N, N):
        diags.append(Diagnostic(None, "beta", f"expected shape {(N, N)}, got {topology.beta.shape}"))
    elif not np.isfinite(topology.beta).all():
        diags.append(Diagnostic(None, "beta", "contains non-finite entries"))
    if topology.delta.shape != (N,):
        diags.append(Diagnostic(None, "delta", f"expected {N} entries, got {topology.delta.shape[0]}"))
    else:
        bad = [i for i, d in enumerate(topology.delta) if d not in (0.0, 1.0)]
        if bad:
            diags.append(Diagnostic(None, "delta", f"entries must be 0 or 1, offending positions {bad}"))
    return diags


def assemble(nodes, topology):
    """Assemble the stacked (A, Psi) pair from validated nodes and topology.

    Raises NetworkValidationError carrying every diagnostic if validation
    fails. Off-diagonal block (i, j) of A equals beta_ij * H_i @ C_j exactly
    (same floating-point expression); diagonal blocks add A_i to the self
    coupling beta_ii * H_i @ C_i. Column block i of Psi is delta_i * B_i,
    so unactuated nodes contribute zero columns.
    """
    nodes = list(nodes)
    diags = validate(nodes, topology)
    if diags:
        raise NetworkValidationError(diags)
    state_dims = [node.n for node in nodes]
    input_dims = [node.p for node in nodes]
    n, p = sum(state_dims), sum(input_dims)
    s_off = np.concatenate(([0], np.cumsum(state_dims)))
    u_off = np.concatenate(([0], np.cumsum(input_dims)))
    A = np.zeros((n, n))
    Psi = np.zeros((n, p))
    for i, node in enumerate(nodes):
        rows = slice(s_off[i], s_off[i] + node.n)
        A[rows, rows] = node.A
        Psi[rows, u_off[i]:u_off[i] + node.p] = topology.delta[i] * node.B
        for j, other in enumerate(nodes):
            weight = topology.beta[i, j]
            if weight != 0.0:
                cols = slice(s_off[j], s_off[j] + other.n)
                A[rows, cols] += weight * (node.H @ other.C)
    offsets = tuple((int(s_off[i]), int(u_off[i])) for i in range(len(nodes)))
    return NetworkedSystem(n=n, p=p, A=A, Psi=Psi, block_offsets=offsets)
