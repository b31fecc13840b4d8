"""Controllability analysis and Gramian-based steering for networked LTI
systems with nonlinear per-node perturbations.

The package assembles a stacked system dX/dt = A X + Psi U + F(t, X) from
per-node matrices and a coupling topology, checks controllability and a
nonlinear-contraction condition on the steering fixed-point map, synthesizes
the Gramian-based steering control, solves for the steered trajectory by
Picard iteration, and verifies the result with an independent RK4 run.
"""

__version__ = "0.1.0"

from .controllability import (
    BoundsEstimate,
    NotControllableError,
    TimeHorizon,
    compute_bounds,
    gramian,
    gramian_drift,
    kalman_rank,
    state_transition,
)
from .linalg import NotPositiveDefiniteError, mat_exp, min_eig_sym, solve_spd, spectral_norm
from .network import (
    Diagnostic,
    NetworkTopology,
    NetworkValidationError,
    NetworkedSystem,
    NodeDynamics,
    assemble,
    validate,
)
from .perturbation import (
    ContractionData,
    NodePerturbation,
    Perturbation,
    check_boyd_wong,
    compute_m,
    estimate_holder_constant,
    zero_perturbation,
)
from .steering import (
    ContractionVerification,
    SteeringProblem,
    SteeringResult,
    Trajectory,
    apply_solution_map,
    initial_trajectory,
    picard_solve,
    simulate_verify,
    synthesize_control,
    verify_contraction,
)

__all__ = [
    "__version__",
    "BoundsEstimate",
    "NotControllableError",
    "TimeHorizon",
    "compute_bounds",
    "gramian",
    "gramian_drift",
    "kalman_rank",
    "state_transition",
    "NotPositiveDefiniteError",
    "mat_exp",
    "min_eig_sym",
    "solve_spd",
    "spectral_norm",
    "Diagnostic",
    "NetworkTopology",
    "NetworkValidationError",
    "NetworkedSystem",
    "NodeDynamics",
    "assemble",
    "validate",
    "ContractionData",
    "NodePerturbation",
    "Perturbation",
    "check_boyd_wong",
    "compute_m",
    "estimate_holder_constant",
    "zero_perturbation",
    "ContractionVerification",
    "SteeringProblem",
    "SteeringResult",
    "Trajectory",
    "apply_solution_map",
    "initial_trajectory",
    "picard_solve",
    "simulate_verify",
    "synthesize_control",
    "verify_contraction",
]
