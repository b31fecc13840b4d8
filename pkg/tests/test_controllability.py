import numpy as np
import pytest
from numpy.testing import assert_allclose

from netsteer.controllability import (
    NotControllableError,
    TimeHorizon,
    compute_bounds,
    gramian,
    gramian_drift,
    kalman_rank,
    state_transition,
    transition_tables,
)
from netsteer.linalg import spectral_norm
from oracles import riemann_gramian
from sysgen import (
    clearly_classified_system,
    make_system,
    random_stable_normal_system,
    random_system,
)

DOUBLE_INTEGRATOR = make_system([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]])


def test_horizon_validation():
    with pytest.raises(ValueError):
        TimeHorizon(1.0, 1.0, 200)
    with pytest.raises(ValueError):
        TimeHorizon(0.0, 1.0, 201)
    h = TimeHorizon(0.0, 2.0, 4)
    assert_allclose(h.grid(), [0.0, 0.5, 1.0, 1.5, 2.0])
    assert_allclose(h.midpoints(), [0.25, 0.75, 1.25, 1.75])


def test_state_transition_identity_at_equal_times():
    sys = make_system(np.array([[0.3, 1.0], [0.0, -0.2]]), np.eye(2))
    assert_allclose(state_transition(sys, 1.7, 1.7), np.eye(2), atol=1e-15)


def test_state_transition_nilpotent():
    assert_allclose(
        state_transition(DOUBLE_INTEGRATOR, 2.0, 1.0),
        [[1.0, 1.0], [0.0, 1.0]],
        atol=1e-15,
    )


def test_state_transition_semigroup():
    rng = np.random.default_rng(11)
    sys = make_system(rng.standard_normal((3, 3)) * 0.5, np.eye(3))
    lhs = state_transition(sys, 2.0, 1.2) @ state_transition(sys, 1.2, 0.3)
    assert_allclose(lhs, state_transition(sys, 2.0, 0.3), atol=1e-9)


def test_transition_tables_match_direct_evaluation():
    rng = np.random.default_rng(12)
    sys = make_system(rng.standard_normal((3, 3)) * 0.6, np.eye(3))
    horizon = TimeHorizon(0.0, 1.5, 60)
    tables = transition_tables(sys, horizon)
    grid = horizon.grid()
    for k in (0, 7, 30, 59, 60):
        assert_allclose(tables.nodes[k], state_transition(sys, horizon.t1, grid[k]), atol=1e-9)
    mids = horizon.midpoints()
    for k in (0, 29, 59):
        assert_allclose(tables.midpoints[k], state_transition(sys, horizon.t1, mids[k]), atol=1e-9)


def test_gramian_scalar_integrator():
    sys = make_system([[0.0]], [[1.0]])
    W = gramian(sys, TimeHorizon(0.0, 1.0, 200))
    assert_allclose(W, [[1.0]], rtol=1e-12)


def test_gramian_double_integrator_analytic():
    W = gramian(DOUBLE_INTEGRATOR, TimeHorizon(0.0, 1.0, 200))
    assert_allclose(W, [[1.0 / 3.0, 0.5], [0.5, 1.0]], atol=1e-8)


def test_gramian_matches_riemann_oracle():
    rng = np.random.default_rng(13)
    sys = make_system(rng.standard_normal((3, 3)) * 0.5, rng.standard_normal((3, 2)))
    W = gramian(sys, TimeHorizon(0.0, 1.0, 200))
    ref = riemann_gramian(sys.A, sys.Psi, 0.0, 1.0, steps=4000)
    assert np.max(np.abs(W - ref)) <= 1e-6 * np.max(np.abs(ref))


def test_gramian_input_scaling():
    rng = np.random.default_rng(14)
    A = rng.standard_normal((3, 3)) * 0.5
    Psi = rng.standard_normal((3, 2))
    horizon = TimeHorizon(0.0, 1.0, 40)
    W1 = gramian(make_system(A, Psi), horizon)
    W2 = gramian(make_system(A, 2.0 * Psi), horizon)
    assert_allclose(W2, 4.0 * W1, rtol=1e-14)


def test_gramian_drift_small_on_smooth_systems():
    rng = np.random.default_rng(15)
    for _ in range(10):
        sys = random_stable_normal_system(rng)
        assert gramian_drift(sys, TimeHorizon(0.0, 1.0, 200)) <= 1e-6


def test_kalman_rank_examples():
    assert kalman_rank(DOUBLE_INTEGRATOR) == 2
    assert kalman_rank(make_system(np.eye(2), [[1.0], [0.0]])) == 1
    assert kalman_rank(make_system(np.zeros((3, 3)), np.zeros((3, 1)))) == 0


def test_kalman_rank_scale_invariant():
    rng = np.random.default_rng(16)
    for _ in range(20):
        sys = random_system(rng)
        scaled = make_system(sys.A, 1e-6 * sys.Psi)
        assert kalman_rank(scaled) == kalman_rank(sys)


def test_compute_bounds_scalar_integrator():
    sys = make_system([[0.0]], [[1.0]])
    b = compute_bounds(sys, TimeHorizon(0.0, 1.0, 200))
    assert_allclose([b.alpha0, b.beta, b.gamma, b.delta], [1.0, 1.0, 1.0, 1.0], rtol=1e-12)
    assert b.grid_used == 200


def test_compute_bounds_input_scaling():
    sys = make_system([[0.0]], [[2.0]])
    b = compute_bounds(sys, TimeHorizon(0.0, 1.0, 200))
    assert_allclose([b.beta, b.delta], [4.0, 0.25], rtol=1e-12)


def test_compute_bounds_gamma_dominates_alpha0():
    rng = np.random.default_rng(17)
    for _ in range(10):
        sys = random_system(rng, n_max=4, scale=0.8)
        b = compute_bounds(sys, TimeHorizon(0.0, 1.0, 100))
        assert b.gamma >= b.alpha0 - 1e-12
        tables = transition_tables(sys, TimeHorizon(0.0, 1.0, 100))
        direct = max(spectral_norm(tables.nodes[k].T) for k in range(101))
        assert_allclose(b.gamma, direct, rtol=1e-12)


def test_compute_bounds_uncontrollable_raises():
    sys = make_system(np.eye(2), [[1.0], [0.0]])
    with pytest.raises(NotControllableError):
        compute_bounds(sys, TimeHorizon(0.0, 1.0, 100))


def test_rank_and_gramian_gate_agree():
    rng = np.random.default_rng(18)
    horizon = TimeHorizon(0.0, 1.0, 200)
    disagreements = 0
    for case in range(60):
        sys = clearly_classified_system(rng, horizon, uncontrollable=case % 3 == 0)
        full_rank = kalman_rank(sys) == sys.n
        W = gramian(sys, horizon)
        evals = np.linalg.eigvalsh(W)
        positive = evals[0] > 1e-10 * max(evals[-1], 0.0)
        disagreements += full_rank != positive
    assert disagreements == 0
