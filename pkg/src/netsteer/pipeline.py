"""Orchestration from a validated RunConfig to report models.

The service endpoints (and through them the CLI) call analyze/steer/
contraction here. Config-level cross-field problems (wrong perturbation
count, missing steering block, endpoint length mismatches) are folded into
the same diagnostics stream as network validation, so callers see one
consistent validation failure mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .controllability import (
    NotControllableError,
    TimeHorizon,
    compute_bounds,
    gramian,
    gramian_drift,
    kalman_rank,
)
from .linalg import min_eig_sym
from .network import Diagnostic, NetworkTopology, NetworkValidationError, NodeDynamics, assemble, validate
from .perturbation import (
    NodePerturbation,
    Perturbation,
    check_boyd_wong,
    compute_m,
    estimate_holder_constant,
)
from .reports import (
    AnalysisReport,
    BoundsSection,
    BoydWongSection,
    ContractionReport,
    Dimensions,
    SteeringSection,
    ValidInterval,
)
from .steering import SteeringProblem, picard_solve, simulate_verify, verify_contraction

__all__ = ["CoreProblem", "SteerArtifacts", "build_core", "analyze", "steer", "contraction"]


@dataclass
class CoreProblem:
    """Config translated into core objects, ready for analysis."""

    nodes: list
    topology: NetworkTopology
    system: object
    perturbation: Perturbation
    horizon: TimeHorizon


@dataclass
class SteerArtifacts:
    """Raw steering arrays for CSV/plot output alongside the report."""

    grid: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    successive_deltas: list


def build_core(cfg, require_steering=False):
    """Translate a RunConfig into core objects, validating everything.

    Raises NetworkValidationError with the full diagnostics list on any
    dimensional or cross-field inconsistency.
    """
    nodes = [
        NodeDynamics.from_matrices(nc.index, nc.A, nc.B, nc.C, nc.H, m=cfg.topology.m)
        for nc in cfg.nodes
    ]
    topology = NetworkTopology(beta=cfg.topology.beta, delta=cfg.topology.delta, m=cfg.topology.m)
    diags = validate(nodes, topology)
    if len(cfg.perturbation.per_node) != len(nodes):
        diags.append(
            Diagnostic(
                None,
                "perturbation",
                f"per_node lists {len(cfg.perturbation.per_node)} entries for {len(nodes)} nodes",
            )
        )
    total_n = sum(node.n for node in nodes)
    if require_steering and cfg.steering is None:
        diags.append(Diagnostic(None, "steering", "a steering block with x0 and x1 is required"))
    if cfg.steering is not None:
        for name in ("x0", "x1"):
            vec = getattr(cfg.steering, name)
            if len(vec) != total_n:
                diags.append(
                    Diagnostic(None, f"steering.{name}", f"has length {len(vec)}, stacked state dimension is {total_n}")
                )
    if diags:
        raise NetworkValidationError(diags)
    system = assemble(nodes, topology)
    perturbation = Perturbation(
        per_node=tuple(NodePerturbation(fs.family, dict(fs.params)) for fs in cfg.perturbation.per_node),
        dims=tuple(node.n for node in nodes),
        rho=cfg.perturbation.rho,
        alpha_declared=cfg.perturbation.alpha_declared,
    )
    horizon = TimeHorizon(t0=cfg.horizon.t0, t1=cfg.horizon.t1, K=cfg.horizon.K)
    return CoreProblem(nodes=nodes, topology=topology, system=system, perturbation=perturbation, horizon=horizon)


def _resolve_alpha(cfg, core, seed_override, warnings):
    """Pick the Hölder constant: declared wins, sampled fills in or cross-checks."""
    pcfg = cfg.perturbation
    estimate = None
    if pcfg.estimation is not None:
        est = pcfg.estimation
        seed = est.seed if seed_override is None else seed_override
        estimate = estimate_holder_constant(
            core.perturbation,
            pcfg.rho,
            (est.box_low, est.box_high),
            est.samples,
            seed,
            t_span=(core.horizon.t0, core.horizon.t1),
        )
    if pcfg.alpha_declared is not None:
        if estimate is not None and estimate > 1.01 * pcfg.alpha_declared:
            warnings.append(
                f"sampled Hölder constant {estimate:.9g} exceeds declared {pcfg.alpha_declared:.9g} by more than 1%"
            )
        return float(pcfg.alpha_declared), "declared"
    return float(estimate), "estimated"


def _analysis_parts(cfg, core, quadrature_check, seed_override):
    """Shared analyze/steer front half; returns report fields plus bounds."""
    warnings = []
    rank = kalman_rank(core.system)
    W = gramian(core.system, core.horizon)
    min_eig = min_eig_sym(W)
    bounds = None
    controllable = False
    try:
        bounds = compute_bounds(core.system, core.horizon)
        controllable = True
    except NotControllableError:
        warnings.append(
            "controllability Gramian is numerically singular; steering bounds and the contraction constant are unavailable"
        )
    alpha_used, alpha_source = _resolve_alpha(cfg, core, seed_override, warnings)
    m = None
    bw_section = None
    if controllable:
        m = compute_m(bounds, alpha_used, core.horizon)
        verdict = check_boyd_wong(m, cfg.perturbation.rho)
        interval = None
        if verdict.valid_interval is not None:
            low, high = verdict.valid_interval
            interval = ValidInterval(low=low, high=None if high == float("inf") else high)
        bw_section = BoydWongSection(satisfied_globally=verdict.satisfied_globally, valid_interval=interval)
        if not verdict.satisfied_globally:
            if cfg.perturbation.rho < 1.0 and m > 0.0:
                warnings.append(
                    "contraction condition M*t**rho < t fails for small distances when rho < 1; it holds only on the reported interval"
                )
            else:
                warnings.append("contraction condition M*t**rho < t is not satisfied (M >= 1 with rho = 1)")
    drift = None
    if quadrature_check:
        drift = gramian_drift(core.system, core.horizon)
        if drift > 1e-6:
            warnings.append(
                f"Gramian drift {drift:.3g} between K={core.horizon.K} and K={2 * core.horizon.K} exceeds 1e-6; increase K"
            )
    dims = Dimensions(n=core.system.n, p=core.system.p, nodes=len(core.nodes))
    bounds_section = None
    if bounds is not None:
        bounds_section = BoundsSection(
            alpha0=bounds.alpha0, beta=bounds.beta, gamma=bounds.gamma, delta=bounds.delta, grid_used=bounds.grid_used
        )
    return {
        "dimensions": dims,
        "kalman_rank": rank,
        "gramian_min_eig": min_eig,
        "controllable": controllable,
        "bounds": bounds_section,
        "alpha_used": alpha_used,
        "alpha_source": alpha_source,
        "m": m,
        "rho": cfg.perturbation.rho,
        "boyd_wong": bw_section,
        "quadrature_drift": drift,
        "warnings": warnings,
    }, bounds


def analyze(cfg, quadrature_check=False, seed_override=None):
    """Controllability, bounds, contraction constant, and verdict for a config."""
    core = build_core(cfg)
    parts, _ = _analysis_parts(cfg, core, quadrature_check, seed_override)
    return AnalysisReport(steering=None, **parts)


def steer(cfg, quadrature_check=False, seed_override=None):
    """Full steering run: analysis, Picard iteration, and RK4 verification.

    Returns (report, artifacts); artifacts is None when the system is not
    controllable, in which case the report carries the verdict.
    """
    core = build_core(cfg, require_steering=True)
    parts, _ = _analysis_parts(cfg, core, quadrature_check, seed_override)
    if not parts["controllable"]:
        return AnalysisReport(steering=None, **parts), None
    scfg = cfg.steering
    prob = SteeringProblem(
        sys=core.system,
        perturbation=core.perturbation,
        horizon=core.horizon,
        x0=np.asarray(scfg.x0, dtype=float),
        x1=np.asarray(scfg.x1, dtype=float),
        fp_tolerance=scfg.fp_tolerance,
        max_iterations=scfg.max_iterations,
        sim_refinement=scfg.sim_refinement,
    )
    result = picard_solve(prob)
    simulate_verify(prob, result)
    if not result.converged:
        parts["warnings"].append(
            f"fixed-point iteration did not reach tolerance {scfg.fp_tolerance:g} within {scfg.max_iterations} iterations"
        )
    steering_section = SteeringSection(
        iterations=result.iterations,
        converged=result.converged,
        terminal_error_fixed_point=result.terminal_error_fixed_point,
        terminal_error_simulated=result.terminal_error_simulated,
        final_delta=result.successive_deltas[-1] if result.successive_deltas else 0.0,
    )
    report = AnalysisReport(steering=steering_section, **parts)
    artifacts = SteerArtifacts(
        grid=result.trajectory.grid,
        states=result.trajectory.states,
        controls=result.control_samples,
        successive_deltas=list(result.successive_deltas),
    )
    return report, artifacts


def contraction(cfg, pairs=200, seed_override=None):
    """Empirical contraction-ratio check over random trajectory pairs."""
    core = build_core(cfg, require_steering=True)
    warnings = []
    alpha_used, alpha_source = _resolve_alpha(cfg, core, None, warnings)
    scfg = cfg.steering
    prob = SteeringProblem(
        sys=core.system,
        perturbation=core.perturbation,
        horizon=core.horizon,
        x0=np.asarray(scfg.x0, dtype=float),
        x1=np.asarray(scfg.x1, dtype=float),
        fp_tolerance=scfg.fp_tolerance,
        max_iterations=scfg.max_iterations,
        sim_refinement=scfg.sim_refinement,
    )
    seed = 0 if seed_override is None else seed_override
    verification = verify_contraction(prob, pairs=pairs, seed=seed, alpha=alpha_used)
    return ContractionReport(
        pairs=verification.pairs,
        seed=verification.seed,
        alpha_used=alpha_used,
        alpha_source=alpha_source,
        m=verification.m,
        rho=verification.rho,
        max_ratio_sup=verification.max_ratio_sup,
        max_ratio_grid_l2=verification.max_ratio_grid_l2,
        within_bound=verification.within_bound,
    )
