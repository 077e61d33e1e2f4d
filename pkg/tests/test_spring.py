"""Spring forward model: hand oracles, dense-solve cross-checks, FD Jacobians."""

import numpy as np
import pytest

from samplewise.forward import (
    SpringModel,
    spring_jacobian,
    spring_solve,
    spring_stiffness,
    spring_stiffness_matrix,
)


def test_stiffness_exp_at_zero_parameters():
    k1, k2 = spring_stiffness([0.5, 0.5], [0.0, 0.0], "exp")
    assert k1 == pytest.approx(0.6)
    assert k2 == pytest.approx(1.0)


def test_stiffness_offsets_survive_zero_design():
    k1, k2 = spring_stiffness([0.0, 0.0], [1.3, -2.0], "exp")
    assert k1 == pytest.approx(0.1)
    assert k2 == pytest.approx(0.5)


def test_stiffness_square_law():
    k1, k2 = spring_stiffness([1.0, 1.0], [1.0, 1.0], "square")
    assert k1 == pytest.approx(1.1)
    assert k2 == pytest.approx(1.5)


def test_solve_hand_value():
    # k1=0.6, k2=1.0, f=(1,1): u2 = 2/1, u1 = u2 + 1/0.6 = 11/3
    u = spring_solve(0.6, 1.0)
    assert u[0] == pytest.approx(11.0 / 3.0, abs=1e-14)
    assert u[1] == pytest.approx(2.0, abs=1e-14)


def test_closed_form_matches_dense_solve():
    rng = np.random.default_rng(42)
    for _ in range(50):
        x = rng.uniform(0.05, 2.0, 2)
        m = rng.uniform(-2.0, 2.0, 2)
        k1, k2 = spring_stiffness(x, m, "exp")
        u = spring_solve(k1, k2)
        K = spring_stiffness_matrix(k1, k2)
        u_dense = np.linalg.solve(K, np.array([1.0, 1.0]))
        assert np.max(np.abs(u - u_dense)) <= 1e-12


def test_stiff_first_spring_limit():
    # k1 -> inf pins the two masses together: u1 -> u2
    u = spring_solve(1e12, 1.0)
    assert abs(u[0] - u[1]) <= 1e-10


def test_nonpositive_stiffness_raises():
    with pytest.raises(ValueError):
        spring_solve(-0.2, 1.0)
    with pytest.raises(ValueError):
        # square law with negative design can push k below zero
        SpringModel("square").evaluate([-1.0, 0.5], [1.0, 0.0])


def _fd_jacobian(model, x, m, h=1e-6):
    J = np.zeros((2, 2))
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        J[:, i] = (model.evaluate(x, m + e) - model.evaluate(x, m - e)) / (2 * h)
    return J


@pytest.mark.parametrize("g", ["exp", "square"])
def test_jacobian_matches_finite_differences(g):
    rng = np.random.default_rng(7)
    model = SpringModel(g)
    worst = 0.0
    for _ in range(100):
        x = rng.uniform(0.2, 1.5, 2)
        m = rng.uniform(-1.5, 1.5, 2) if g == "exp" else rng.uniform(0.2, 1.5, 2)
        J = model.jacobian(x, m)
        worst = max(worst, np.max(np.abs(J - _fd_jacobian(model, x, m))))
    assert worst <= 1e-6


def test_square_growth_zero_jacobian_at_origin():
    J = spring_jacobian([0.7, 0.9], [0.0, 0.0], "square")
    assert np.all(J == 0.0)


def test_jacobian_lower_left_entry_always_zero():
    # u2 depends only on k2, so dm1 never reaches it
    rng = np.random.default_rng(3)
    for _ in range(20):
        J = spring_jacobian(rng.uniform(0.1, 1.0, 2), rng.uniform(-1, 1, 2), "exp")
        assert J[1, 0] == 0.0


def test_batch_paths_match_per_sample():
    rng = np.random.default_rng(11)
    model = SpringModel("exp")
    X = rng.uniform(0.2, 1.0, (40, 2))
    M = rng.uniform(-2.0, 2.0, (40, 2))
    U = model.evaluate_batch(X, M)
    J = model.jacobian_batch(X, M)
    for i in range(40):
        assert np.array_equal(U[i], model.evaluate(X[i], M[i]))
        assert np.array_equal(J[i], model.jacobian(X[i], M[i]))


def test_evaluate_deterministic():
    model = SpringModel("exp")
    a = model.evaluate([0.4, 0.6], [0.3, -0.4])
    b = model.evaluate([0.4, 0.6], [0.3, -0.4])
    assert np.array_equal(a, b)
