import math

import numpy as np
import pytest

from voterctl import oracle
from voterctl.dynamics import ForcingPlan, NoiseResponse
from voterctl.ensemble import EnsembleSpec, default_burn_in, precision, run_ensemble
from voterctl.errors import InsufficientDataError
from voterctl.infotheory import distance_delay_profile
from voterctl.influence import (
    estimator_floor,
    fit_exponential_decay,
    influence_by_forcing,
    multi_information_scores,
    rank_agents,
    spaced_forcing_experiment,
    spaced_forcing_plan,
)
from voterctl.topology import make_line, make_scale_free


def test_rank_agents_examples():
    assert rank_agents({0: 0.5, 1: 0.7, 2: 0.9}) == [2, 1, 0]
    assert rank_agents({0: 1.0, 1: 1.0, 2: 1.0}) == [0, 1, 2]


def test_rank_agents_invariant_under_monotone_transform():
    rng = np.random.default_rng(1)
    values = {i: float(v) for i, v in enumerate(rng.random(20))}
    transformed = {i: math.exp(3 * v) + 1 for i, v in values.items()}
    assert rank_agents(values) == rank_agents(transformed)


def test_fit_recovers_exact_exponential():
    profile = [(j, 0.5 * math.exp(-0.2 * (j - 1))) for j in range(2, 12)]
    fit = fit_exponential_decay(profile, 1)
    assert fit.rate == pytest.approx(0.2, abs=1e-12)
    assert fit.amplitude == pytest.approx(0.5, abs=1e-12)
    assert fit.correlation == pytest.approx(-1.0, abs=1e-12)
    assert fit.decaying


def test_fit_flat_profile_flagged():
    profile = [(j, 0.25) for j in range(2, 10)]
    fit = fit_exponential_decay(profile, 1)
    assert fit.rate == pytest.approx(0.0, abs=1e-12)
    assert not fit.decaying
    assert fit.correlation == 0.0


def test_fit_requires_three_positive_points():
    with pytest.raises(InsufficientDataError):
        fit_exponential_decay([(2, 0.5), (3, 0.4)], 1)
    with pytest.raises(InsufficientDataError):
        fit_exponential_decay([(2, 0.5), (3, 0.0), (4, 0.0), (5, -0.1)], 1)


def test_fit_counts_excluded_nonpositive():
    profile = [(2, 0.5), (3, 0.3), (4, 0.0), (5, 0.2), (6, -0.01)]
    fit = fit_exponential_decay(profile, 1)
    assert fit.points_used == 3
    assert fit.excluded_nonpositive == 2


def test_fit_ignores_points_left_of_agent():
    profile = [(0, 9.9), (1, 9.9)] + [(j, 0.4 * math.exp(-0.3 * (j - 1))) for j in (2, 3, 4, 5)]
    fit = fit_exponential_decay(profile, 1)
    assert fit.rate == pytest.approx(0.3, abs=1e-12)


def test_maximal_noise_destroys_influence():
    graph = make_line(9)
    score = influence_by_forcing(graph, NoiseResponse(0.5), 3, 4000, base_seed=2,
                                 measure_time=12, mode="transient")
    assert abs(score.mean_density - 0.5) < 3 * precision(4000, 0.05)


def test_influence_matches_exact_enumeration(chain3):
    graph, noise, _ = chain3
    t_meas, _ = default_burn_in(graph, noise)
    score = influence_by_forcing(graph, noise, 0, 50_000, base_seed=31)
    chain = oracle.build_chain(graph, noise, ForcingPlan(((0, 1),)))
    mu0 = oracle.initial_distribution(chain, bias=0.5)
    exact_free_density = oracle.exact_marginals(chain, mu0, t_meas)[1:].mean()
    assert score.t_measure == t_meas
    assert abs(score.mean_density - exact_free_density) < 3 * precision(50_000, 0.05)
    assert score.stationary_ok


def test_decay_rates_stabilize_away_from_boundary():
    # the decay steepens right next to the pinned agent and settles deeper
    # into the chain; fits stay near-perfect exponentials throughout
    n_agents, eps, n_runs = 50, 0.01, 20_000
    graph = make_line(n_agents)
    noise = NoiseResponse(eps)
    t_meas, _ = default_burn_in(graph, noise)
    d_max = 12
    record = tuple(range(t_meas, t_meas + d_max + 1))
    summary = run_ensemble(
        EnsembleSpec(graph=graph, noise=noise, forcing=ForcingPlan(((0, 1),)),
                     horizon=t_meas + d_max, n_runs=n_runs, base_seed=77,
                     record_states_at=record)
    )
    floor = estimator_floor(n_runs)
    rates = {}
    for agent in (1, 5, 8, 11):
        profile = distance_delay_profile(summary.samples, agent, t_meas, d_max)
        pts = [(j, w) for j, w in profile if w >= floor]
        fit = fit_exponential_decay(pts, agent)
        assert fit.correlation <= -0.97
        rates[agent] = fit.rate
    assert rates[1] > rates[5] > 0.0
    interior = [rates[5], rates[8], rates[11]]
    assert max(interior) - min(interior) <= 0.25 * np.mean(interior)


def test_spaced_forcing_plan_nodes():
    plan = spaced_forcing_plan(10, 3)
    assert tuple(plan.nodes) == (0, 3, 6, 9)
    assert set(plan.bits) == {1}
    with pytest.raises(ValueError):
        spaced_forcing_plan(10, 0)


def test_spacing_one_forces_everyone():
    result = spaced_forcing_experiment(6, 0.2, 1, n_runs=40, base_seed=3,
                                       burn_in=5, window=4)
    assert result.controlled_count == 7
    assert np.allclose(result.density_spaced, 1.0)
    assert result.steady_spaced == 1.0


def test_spacing_beyond_chain_reduces_to_single():
    result = spaced_forcing_experiment(8, 0.1, 50, n_runs=60, base_seed=4,
                                       burn_in=10, window=5)
    assert result.forced_spaced == (0,)
    assert np.allclose(result.density_single, result.density_spaced)


def test_spaced_density_decreases_with_spacing():
    steadies = []
    for d in (2, 5, 12):
        result = spaced_forcing_experiment(48, 0.02, d, n_runs=400, base_seed=11,
                                           window=60)
        steadies.append(result.steady_spaced)
    slack = 3 * precision(400, 0.05)
    assert steadies[0] > steadies[1] - slack
    assert steadies[1] > steadies[2] - slack
    assert steadies[0] > steadies[2]


def test_transient_multi_information_highlights_hubs():
    graph = make_scale_free(40, 1, 7)
    scores = multi_information_scores(graph, NoiseResponse(0.001), 2, 20_000,
                                      base_seed=5, mode="transient")
    values = np.array([scores[i] for i in range(40)])
    top = rank_agents(scores)[0]
    degrees = graph.degrees()
    assert degrees[top] >= np.sort(degrees)[-3]  # peak agent is a hub
    assert values.max() >= 3 * np.median(values)  # pronounced peak


def test_steady_multi_information_saturates_at_consensus():
    # after burn-in every agent mostly reflects the global consensus mode,
    # so the per-agent spread collapses (observability, not controllability)
    graph = make_scale_free(40, 1, 7)
    scores = multi_information_scores(graph, NoiseResponse(0.001), 2, 5000,
                                      base_seed=5, mode="steady")
    values = np.array([scores[i] for i in range(40)])
    assert values.min() > 0.5
    assert values.max() / np.median(values) < 1.2


def test_influence_mode_validation():
    graph = make_line(3)
    with pytest.raises(ValueError):
        influence_by_forcing(graph, NoiseResponse(0.1), 1, 10, mode="warp")
    with pytest.raises(ValueError):
        influence_by_forcing(graph, NoiseResponse(0.1), 1, 10, mode="transient")
