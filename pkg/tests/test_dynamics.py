import numpy as np
import pytest

from conftest import reference_step
from voterctl import oracle
from voterctl.dynamics import (
    ForcingPlan,
    NoiseResponse,
    StateTrajectory,
    density,
    simulate,
    step,
)
from voterctl.ensemble import EnsembleSpec, run_ensemble
from voterctl.topology import make_line, make_scale_free


def test_noise_response_endpoints():
    f = NoiseResponse(0.05)
    assert f.probability_of_one(0.0) == pytest.approx(0.05)
    assert f.probability_of_one(1.0) == pytest.approx(0.95)
    rho = np.linspace(0, 1, 11)
    assert np.allclose(f.probability_of_one(rho), 0.9 * rho + 0.05)


def test_noise_response_degenerate_half():
    f = NoiseResponse(0.5)
    assert np.allclose(f.probability_of_one(np.array([0.0, 0.3, 1.0])), 0.5)


def test_noise_response_bounds():
    with pytest.raises(ValueError):
        NoiseResponse(-0.01)
    with pytest.raises(ValueError):
        NoiseResponse(0.51)


def test_forcing_plan_validation():
    with pytest.raises(ValueError):
        ForcingPlan(((0, 2),))
    with pytest.raises(ValueError):
        ForcingPlan(((0, 0), (0, 1)))
    plan = ForcingPlan(((2, 1), (0, 0), (2, 1)))
    assert plan.forced == ((0, 0), (2, 1))


def test_step_certain_at_zero_noise():
    g = make_line(3)
    state = np.ones(4, dtype=np.uint8)
    out = step(g, state, NoiseResponse(0.0), ForcingPlan.none(), np.random.default_rng(0))
    assert (out == 1).all()


def test_step_dimension_error():
    g = make_line(3)
    with pytest.raises(ValueError):
        step(g, np.ones(3, dtype=np.uint8), NoiseResponse(0.1), ForcingPlan.none(),
             np.random.default_rng(0))


def test_step_forced_overwrite_and_stream_alignment():
    # forced agents still consume a draw, so free agents see identical
    # uniforms with or without the forcing
    g = make_line(5)
    state = np.array([0, 1, 0, 1, 0, 1], dtype=np.uint8)
    noise = NoiseResponse(0.2)
    free = step(g, state, noise, ForcingPlan.none(), np.random.default_rng(42))
    forced = step(g, state, noise, ForcingPlan(((0, 1), (3, 0))), np.random.default_rng(42))
    assert forced[0] == 1 and forced[3] == 0
    keep = [1, 2, 4, 5]
    assert (forced[keep] == free[keep]).all()


def test_step_synchronous_any_evaluation_order():
    g = make_scale_free(12, 2, 4)
    rng = np.random.default_rng(7)
    state = (rng.random(12) < 0.5).astype(np.uint8)
    noise = NoiseResponse(0.15)
    forcing = ForcingPlan(((3, 1),))
    draws = np.random.default_rng(99).random(12)
    engine = step(g, state, noise, forcing, np.random.default_rng(99))
    for order_seed in range(4):
        order = np.random.default_rng(order_seed).permutation(12)
        ref = reference_step(g, state, noise, forcing, draws, order)
        assert (engine == ref).all()


def test_simulate_zero_horizon_identity():
    g = make_line(4)
    init = np.array([1, 0, 1, 0, 1], dtype=np.uint8)
    traj = simulate(g, init, NoiseResponse(0.1), ForcingPlan.none(), 0, 5)
    assert traj.horizon == 0
    assert (traj.state(0) == init).all()


def test_simulate_deterministic_per_seed():
    g = make_line(10)
    a = simulate(g, None, NoiseResponse(0.1), ForcingPlan(((0, 1),)), 50, 123)
    b = simulate(g, None, NoiseResponse(0.1), ForcingPlan(((0, 1),)), 50, 123)
    assert (a.dense() == b.dense()).all()


def test_wavefront_exact_without_self_loop():
    # pure relay: each agent copies its left neighbor, so the pinned 1
    # advances exactly one site per step
    n = 12
    g = make_line(n, self_loop=False)
    init = np.zeros(n + 1, dtype=np.uint8)
    traj = simulate(g, init, NoiseResponse(0.0), ForcingPlan(((0, 1),)), n + 2, 0)
    dense = traj.dense()
    for t in range(n + 3):
        for i in range(n + 1):
            assert dense[t, i] == (1 if t >= i else 0)


def test_zero_noise_line_reaches_all_ones_and_holds():
    g = make_line(30)
    traj = simulate(g, None, NoiseResponse(0.0), ForcingPlan(((0, 1),)), 400, 7)
    dense = traj.dense()
    hit = np.nonzero(dense.sum(axis=1) == 31)[0]
    assert hit.size > 0
    first = hit[0]
    assert (dense[first:] == 1).all()


def test_all_ones_not_absorbing_with_noise():
    g = make_line(10)
    traj = simulate(g, np.ones(11, dtype=np.uint8), NoiseResponse(0.2),
                    ForcingPlan.none(), 100, 3)
    assert traj.dense().min() == 0


def test_absorbing_states_at_zero_noise():
    g = make_line(10)
    for value in (0, 1):
        init = np.full(11, value, dtype=np.uint8)
        traj = simulate(g, init, NoiseResponse(0.0), ForcingPlan.none(), 30, 1)
        assert (traj.dense() == value).all()


def test_density_examples():
    states = np.array([[0, 0, 0], [1, 1, 1], [1, 0, 1]], dtype=np.uint8)
    traj = StateTrajectory.from_dense(states)
    assert traj.density(0) == 0.0
    assert traj.density(1) == 1.0
    assert traj.density(2) == pytest.approx(2.0 / 3.0)
    assert density(traj, 2, exclude=(0,)) == pytest.approx(0.5)
    with pytest.raises(IndexError):
        traj.density(3)
    with pytest.raises(ValueError):
        traj.density(0, exclude=(0, 1, 2))


def test_trajectory_round_trip_packed():
    rng = np.random.default_rng(0)
    states = (rng.random((7, 13)) < 0.4).astype(np.uint8)
    traj = StateTrajectory.from_dense(states)
    assert (traj.dense() == states).all()
    assert (traj.state(3) == states[3]).all()


def test_simulate_initial_validation():
    g = make_line(3)
    with pytest.raises(ValueError):
        simulate(g, np.array([0, 1, 2, 0], dtype=np.uint8), NoiseResponse(0.1),
                 ForcingPlan.none(), 1, 0)
    with pytest.raises(ValueError):
        simulate(g, np.zeros(2, dtype=np.uint8), NoiseResponse(0.1),
                 ForcingPlan.none(), 1, 0)
    with pytest.raises(ValueError):
        simulate(g, None, NoiseResponse(0.1), ForcingPlan.none(), -1, 0)


def test_marginals_match_exact_enumeration(chain3):
    # spec-level check: 3-node chain, eps=0.1, node 0 forced, t=5
    graph, noise, forcing = chain3
    chain = oracle.build_chain(graph, noise, forcing)
    mu0 = oracle.initial_distribution(chain, bias=0.5)
    exact = oracle.exact_marginals(chain, mu0, 5)
    summary = run_ensemble(
        EnsembleSpec(graph=graph, noise=noise, forcing=forcing, horizon=5,
                     n_runs=100_000, base_seed=77)
    )
    measured = summary.marginal_one_prob(5)
    assert np.abs(measured - exact).max() < 0.01


def test_zero_one_mirror_symmetry(chain3):
    # relabeling 0<->1 in forcing and initial bias mirrors the marginals
    graph, noise, _ = chain3
    up = oracle.build_chain(graph, noise, ForcingPlan(((0, 1),)))
    down = oracle.build_chain(graph, noise, ForcingPlan(((0, 0),)))
    mu_up = oracle.initial_distribution(up, bias=0.3)
    mu_down = oracle.initial_distribution(down, bias=0.7)
    for t in (1, 3, 8):
        a = oracle.exact_marginals(up, mu_up, t)
        b = oracle.exact_marginals(down, mu_down, t)
        assert np.allclose(a, 1.0 - b, atol=1e-12)
