import math

import numpy as np
import pytest

from voterctl.meanfield import (
    MeanFieldSystem,
    control_length,
    critical_noise,
    iterate,
    iterate_trajectory,
    matrix_power,
    mean_density,
    stationary,
    steady_state_time,
)


def test_iterate_zero_steps_identity():
    system = MeanFieldSystem(n=5, epsilon=0.1)
    p0 = np.array([0.1, 0.2, 0.3, 0.4, 0.5])
    assert np.allclose(iterate(system, p0, 0), p0)


def test_iterate_rejects_bad_probabilities():
    system = MeanFieldSystem(n=3, epsilon=0.1)
    with pytest.raises(ValueError):
        iterate(system, np.array([0.1, 1.2, 0.0]), 1)
    with pytest.raises(ValueError):
        iterate(system, np.array([0.1, 0.2]), 1)


def test_iterate_matches_matrix_route():
    # P(t) = A^t P0 + sum_{j<t} A^j B, with the powers from the closed form
    system = MeanFieldSystem(n=6, epsilon=0.07)
    p0 = np.linspace(0.05, 0.9, 6)
    b = system.affine_term()
    for t in (1, 2, 5, 11):
        direct = iterate(system, p0, t)
        via_powers = matrix_power(system, t) @ p0
        for j in range(t):
            via_powers += matrix_power(system, j) @ b
        assert np.allclose(direct, via_powers, atol=1e-12)


def test_zero_noise_iterate_closed_form():
    # at eps=0 the first free agent obeys p_1(t) = 1 - 2^-t from a zero start
    system = MeanFieldSystem(n=4, epsilon=0.0)
    p = np.zeros(4)
    for t in (1, 2, 3, 6):
        out = iterate(system, np.zeros(4), t)
        assert out[0] == pytest.approx(1.0 - 2.0**-t, abs=1e-14)
    long = iterate(system, np.zeros(4), 200)
    assert np.allclose(long, 1.0, atol=1e-10)


def test_matrix_power_base_cases():
    system = MeanFieldSystem(n=4, epsilon=0.05)
    assert np.allclose(matrix_power(system, 0), np.eye(4))
    assert np.allclose(matrix_power(system, 1), system.matrix())


def test_matrix_power_against_naive_multiplication():
    system = MeanFieldSystem(n=5, epsilon=0.01)
    a = system.matrix()
    naive = np.eye(5)
    for _ in range(7):
        naive = naive @ a
    assert np.allclose(matrix_power(system, 7), naive, rtol=1e-12, atol=1e-15)


def test_matrix_power_sweep_regimes():
    # both displayed regimes (p >= n-1 and p < n-1) against repeated multiply
    for n, eps in ((3, 0.2), (12, 0.01), (20, 0.001)):
        system = MeanFieldSystem(n=n, epsilon=eps)
        a = system.matrix()
        naive = np.eye(n)
        for p in range(1, 61):
            naive = naive @ a
            closed = matrix_power(system, p)
            scale = max(np.abs(naive).max(), 1e-300)
            assert np.abs(closed - naive).max() / scale < 1e-10


def test_matrix_power_half_noise():
    system = MeanFieldSystem(n=3, epsilon=0.5)
    assert np.allclose(matrix_power(system, 0), np.eye(3))
    assert np.allclose(matrix_power(system, 4), 0.0)


def test_stationary_first_agent_value():
    pi = stationary(MeanFieldSystem(n=50, epsilon=0.01)).pi
    assert pi[0] == pytest.approx(0.9803921568627451, abs=1e-12)


def test_stationary_is_fixed_point():
    for eps in (0.001, 0.01, 0.05, 0.3):
        system = MeanFieldSystem(n=30, epsilon=eps)
        pi = stationary(system).pi
        residual = system.matrix() @ pi + system.affine_term() - pi
        assert np.abs(residual).max() < 1e-12


def test_stationary_zero_noise_limit():
    result = stationary(MeanFieldSystem(n=10, epsilon=0.0))
    assert result.limit_case
    assert np.allclose(result.pi, 1.0)


def test_stationary_monotone_toward_half():
    pi = stationary(MeanFieldSystem(n=40, epsilon=0.02)).pi
    assert (np.diff(pi) < 0).all()
    assert (pi > 0.5).all()
    assert (pi <= 1.0).all()


def test_control_length_values():
    assert control_length(0.01) == pytest.approx(24.996666311036567, abs=1e-9)
    assert control_length(0.0) == math.inf
    assert control_length(0.5) == 0.0
    with pytest.raises(ValueError):
        control_length(0.6)


def test_control_length_monotone_decreasing():
    eps = np.linspace(0.001, 0.499, 200)
    vals = [control_length(e) for e in eps]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_mean_density_matches_stationary_average():
    for n, eps in ((50, 0.001), (50, 0.01), (500, 0.05), (7, 0.3)):
        system = MeanFieldSystem(n=n, epsilon=eps)
        s = mean_density(system).value
        assert s == pytest.approx(stationary(system).pi.mean(), abs=1e-12)


def test_mean_density_zero_noise_limit_flag():
    result = mean_density(MeanFieldSystem(n=50, epsilon=0.0))
    assert result.limit_case
    assert result.value == 1.0


def test_smaller_systems_easier_to_control():
    for eps in (0.001, 0.01, 0.05):
        s_small = mean_density(MeanFieldSystem(n=50, epsilon=eps)).value
        s_large = mean_density(MeanFieldSystem(n=500, epsilon=eps)).value
        assert s_small > s_large


def test_steady_state_time_threshold_boundary():
    system = MeanFieldSystem(n=20, epsilon=0.01)
    t_star = steady_state_time(system, threshold=1e-4)
    p0 = np.full(20, 0.5)
    at = matrix_power(system, t_star) @ p0
    before = matrix_power(system, t_star - 1) @ p0
    assert np.abs(at).max() < 1e-4
    assert np.abs(before).max() >= 1e-4


def test_iterate_trajectory_shape_and_consistency():
    system = MeanFieldSystem(n=4, epsilon=0.1)
    p0 = np.full(4, 0.5)
    traj = iterate_trajectory(system, p0, 9)
    assert traj.shape == (10, 4)
    assert np.allclose(traj[9], iterate(system, p0, 9))


def test_critical_noise_behaves_like_a_threshold():
    eps_c = critical_noise(100, threshold=0.01)
    s_at = mean_density(MeanFieldSystem(n=100, epsilon=eps_c)).value
    assert s_at - 0.5 == pytest.approx(0.01, abs=1e-6)
    assert critical_noise(1000, threshold=0.01) < eps_c
