"""Influence measurement and control strategies.

Intrusive influence pins one agent's vote and records the shift of the
ensemble-mean free-agent density.  Non-intrusive rankings come from the
delayed multi-information (module infotheory); this module also fits the
exponential decay of mutual-information profiles along the line, relates
the fitted rate to the inverse control length, and runs the spaced-forcing
strategy that the decay analysis suggests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ForcingPlan, NoiseResponse
from .ensemble import EnsembleSpec, default_burn_in, precision, run_ensemble
from .errors import InsufficientDataError
from .infotheory import delayed_multi_information, distance_delay_profile
from .meanfield import control_length
from .topology import Graph, make_line


@dataclass(frozen=True)
class InfluenceScore:
    """Ensemble-mean free-agent density with one agent pinned.

    The density is re-measured at a later check time; ``stationary_ok``
    records whether the two agree within three precision bounds, i.e.
    whether the measurement time was past the transient.
    """

    agent: int
    forced_value: int
    mean_density: float
    n_runs: int
    t_measure: int
    check_density: float
    t_check: int
    stationary_ok: bool


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of ln w against distance: w ~ amplitude * exp(-rate * d)."""

    agent: int
    amplitude: float
    rate: float
    correlation: float
    points_used: int
    excluded_nonpositive: int
    decaying: bool


@dataclass(frozen=True)
class LambdaRegression:
    """Linear relation between fitted decay rates and the inverse control
    length across noise levels: rate = slope / ell_c + intercept."""

    slope: float
    intercept: float
    correlation: float
    points: tuple[tuple[float, float, float], ...]  # (epsilon, 1/ell_c, rate)
    fits: tuple[DecayFit, ...]
    low_confidence: bool


@dataclass(frozen=True)
class StrategyResult:
    """Single-agent forcing versus forcing every ``spacing``-th agent."""

    epsilon: float
    spacing: int
    horizon: int
    burn_in: int
    forced_single: tuple[int, ...]
    forced_spaced: tuple[int, ...]
    density_single: np.ndarray  # per-step ensemble-mean free density
    density_spaced: np.ndarray
    steady_single: float
    steady_spaced: float
    controlled_count: int


def influence_by_forcing(
    graph: Graph,
    noise: NoiseResponse,
    agent: int,
    n_runs: int,
    mode: str = "steady",
    base_seed: int = 0,
    forced_value: int = 1,
    measure_time: int | None = None,
    window: int = 1,
    check_gap: int | None = None,
) -> InfluenceScore:
    """Pin ``agent`` and measure the ensemble-mean free-agent density.

    ``steady`` measures at the burn-in time of the topology's measurement
    rule; ``transient`` measures at an explicit (small) ``measure_time``
    from the i.i.d. Bernoulli(1/2) start.  ``window`` > 1 averages the
    density over that many consecutive steps.
    """
    if mode not in ("steady", "transient"):
        raise ValueError(f"mode must be 'steady' or 'transient', got {mode!r}")
    if measure_time is None:
        if mode == "transient":
            raise ValueError("transient mode needs an explicit measure_time")
        measure_time, _ = default_burn_in(graph, noise)
    if check_gap is None:
        check_gap = max(10, measure_time // 5)
    t_check = measure_time + check_gap
    horizon = t_check + window - 1
    summary = run_ensemble(
        EnsembleSpec(
            graph=graph,
            noise=noise,
            forcing=ForcingPlan(((agent, forced_value),)),
            horizon=horizon,
            n_runs=n_runs,
            base_seed=base_seed,
        )
    )
    dens = summary.mean_density(free_only=True)
    measured = float(dens[measure_time : measure_time + window].mean())
    check = float(dens[t_check : t_check + window].mean())
    tol = 3.0 * precision(n_runs, summary.alpha)
    return InfluenceScore(
        agent=agent,
        forced_value=forced_value,
        mean_density=measured,
        n_runs=n_runs,
        t_measure=measure_time,
        check_density=check,
        t_check=t_check,
        stationary_ok=bool(abs(measured - check) <= tol),
    )


def baseline_mean_density(
    graph: Graph,
    noise: NoiseResponse,
    n_runs: int,
    base_seed: int = 0,
    measure_time: int | None = None,
    window: int = 1,
) -> float:
    """Unforced ensemble-mean density at the measurement time; the reference
    the intrusive influence is measured against."""
    if measure_time is None:
        measure_time, _ = default_burn_in(graph, noise)
    summary = run_ensemble(
        EnsembleSpec(
            graph=graph,
            noise=noise,
            horizon=measure_time + window - 1,
            n_runs=n_runs,
            base_seed=base_seed,
        )
    )
    dens = summary.mean_density(free_only=False)
    return float(dens[measure_time : measure_time + window].mean())


def influence_scores(
    graph: Graph,
    noise: NoiseResponse,
    n_runs: int,
    base_seed: int = 0,
    mode: str = "steady",
    measure_time: int | None = None,
    window: int = 1,
) -> dict[int, float]:
    """Influence of every agent: shift of the mean density above the
    unforced baseline when that agent alone is pinned to 1.  Each agent's
    ensemble gets its own seed block so cells are independent."""
    baseline = baseline_mean_density(
        graph, noise, n_runs, base_seed=base_seed, measure_time=measure_time,
        window=window,
    )
    scores: dict[int, float] = {}
    for agent in range(graph.node_count):
        score = influence_by_forcing(
            graph,
            noise,
            agent,
            n_runs,
            mode=mode,
            base_seed=base_seed + (agent + 1) * n_runs,
            measure_time=measure_time,
            window=window,
        )
        scores[agent] = score.mean_density - baseline
    return scores


def multi_information_scores(
    graph: Graph,
    noise: NoiseResponse,
    tau: int,
    n_runs: int,
    base_seed: int = 0,
    mode: str = "transient",
    measure_time: int | None = None,
) -> dict[int, float]:
    """Delayed multi-information of every agent from one unforced ensemble.

    ``transient`` measures from the i.i.d. initial state (t = 0), where the
    score tracks controllability; ``steady`` measures after burn-in, where
    proxies of influential neighbors score high too (observability).
    """
    if mode not in ("steady", "transient"):
        raise ValueError(f"mode must be 'steady' or 'transient', got {mode!r}")
    if measure_time is None:
        measure_time = 0 if mode == "transient" else default_burn_in(graph, noise)[0]
    summary = run_ensemble(
        EnsembleSpec(
            graph=graph,
            noise=noise,
            horizon=measure_time + tau,
            n_runs=n_runs,
            base_seed=base_seed,
            record_states_at=(measure_time, measure_time + tau),
        )
    )
    return {
        agent: delayed_multi_information(summary.samples, agent, measure_time, tau).value
        for agent in range(graph.node_count)
    }


def rank_agents(values: dict[int, float]) -> list[int]:
    """Agents ordered by descending score; ties broken by ascending index."""
    return sorted(values, key=lambda agent: (-values[agent], agent))


def fit_exponential_decay(profile: list[tuple[int, float]], agent: int) -> DecayFit:
    """Ordinary least squares of ln w against distance j - agent.

    Points at or left of the agent and nonpositive w values are excluded
    (the latter are counted); fewer than three usable points is an error.
    """
    xs, ys = [], []
    excluded = 0
    for j, w in profile:
        if j <= agent:
            continue
        if w <= 0.0:
            excluded += 1
            continue
        xs.append(float(j - agent))
        ys.append(math.log(w))
    if len(xs) < 3:
        raise InsufficientDataError(
            f"need >= 3 positive profile points right of agent {agent}, got {len(xs)}"
        )
    x = np.array(xs)
    y = np.array(ys)
    slope, intercept = np.polyfit(x, y, 1)
    if np.allclose(y, y[0]):
        corr = 0.0  # flat profile: correlation undefined, decay absent
    else:
        corr = float(np.corrcoef(x, y)[0, 1])
    rate = -float(slope)
    return DecayFit(
        agent=agent,
        amplitude=float(math.exp(intercept)),
        rate=rate,
        correlation=corr,
        points_used=len(xs),
        excluded_nonpositive=excluded,
        decaying=rate > 1e-12,
    )


def fit_window(epsilon: float, agent: int, n_agents: int) -> int:
    """Distance cap for decay scans: three control lengths, clipped to the
    chain end (the whole chain when the control length is effectively
    infinite)."""
    ell = control_length(epsilon)
    d_max = n_agents - agent
    if math.isfinite(ell):
        d_max = min(d_max, max(3, math.ceil(3.0 * ell)))
    return d_max


def estimator_floor(n_runs: int, floor_factor: float = 10.0) -> float:
    """Values below this are indistinguishable from the plug-in estimator's
    independence bias ~ 1/(2 N ln 2); fitting into that floor flattens the
    tail and wrecks the measured decay."""
    return floor_factor / (2.0 * n_runs * math.log(2.0))


def measure_decay_rate(
    epsilon: float,
    n_agents: int = 50,
    n_runs: int = 10_000,
    base_seed: int = 0,
    agent: int = 1,
    floor_factor: float = 10.0,
) -> tuple[DecayFit, list[tuple[int, float]]]:
    """Full pipeline for one noise level: run the controlled line to its
    measurement time, scan w_{agent,agent+d}(d), and fit the decay over the
    points that stand above the estimator floor."""
    graph = make_line(n_agents)
    noise = NoiseResponse(epsilon)
    t_meas, _ = default_burn_in(graph, noise)
    d_max = fit_window(epsilon, agent, n_agents)
    record = tuple(range(t_meas, t_meas + d_max + 1))
    summary = run_ensemble(
        EnsembleSpec(
            graph=graph,
            noise=noise,
            forcing=ForcingPlan(((0, 1),)),
            horizon=t_meas + d_max,
            n_runs=n_runs,
            base_seed=base_seed,
            record_states_at=record,
        )
    )
    profile = distance_delay_profile(summary.samples, agent, t_meas, d_max)
    floor = estimator_floor(n_runs, floor_factor)
    fit_points = [(j, w) for j, w in profile if w >= floor]
    if len(fit_points) < 3:
        fit_points = sorted(profile, key=lambda p: -p[1])[:3]
        fit_points.sort()
    return fit_exponential_decay(fit_points, agent), profile


def lambda_vs_control_length(
    epsilons: list[float],
    n_agents: int = 50,
    n_runs: int = 10_000,
    base_seed: int = 0,
    agent: int = 1,
) -> LambdaRegression:
    """Fit rate(eps) = a / ell_c(eps) + b across noise levels."""
    if len(epsilons) < 2:
        raise InsufficientDataError("need at least two noise levels")
    points = []
    fits = []
    for k, eps in enumerate(epsilons):
        fit, _ = measure_decay_rate(
            eps, n_agents=n_agents, n_runs=n_runs,
            base_seed=base_seed + k * (n_runs + 1), agent=agent,
        )
        fits.append(fit)
        points.append((eps, 1.0 / control_length(eps), fit.rate))
    x = np.array([p[1] for p in points])
    y = np.array([p[2] for p in points])
    slope, intercept = np.polyfit(x, y, 1)
    corr = float(np.corrcoef(x, y)[0, 1]) if len(points) > 2 else math.copysign(1.0, slope)
    return LambdaRegression(
        slope=float(slope),
        intercept=float(intercept),
        correlation=corr,
        points=tuple(points),
        fits=tuple(fits),
        low_confidence=len(points) < 3,
    )


def spaced_forcing_plan(n_agents: int, spacing: int) -> ForcingPlan:
    """Pin agents 0, d, 2d, ... along a line of n_agents free positions."""
    if spacing < 1:
        raise ValueError("spacing must be >= 1")
    return ForcingPlan(tuple((k, 1) for k in range(0, n_agents + 1, spacing)))


def spaced_forcing_experiment(
    n_agents: int,
    epsilon: float,
    spacing: int,
    n_runs: int = 400,
    base_seed: int = 0,
    burn_in: int | None = None,
    window: int = 100,
) -> StrategyResult:
    """Compare forcing agent 0 alone against forcing every ``spacing``-th
    agent on the same line with the same seeds.

    Densities are over each ensemble's own free agents; when spacing = 1
    pins everyone, the spaced density is reported over all agents (it is
    identically 1).  spacing > n_agents degenerates to single-agent forcing.
    """
    graph = make_line(n_agents)
    noise = NoiseResponse(epsilon)
    if burn_in is None:
        burn_in, _ = default_burn_in(graph, noise)
    horizon = burn_in + window - 1
    single = ForcingPlan(((0, 1),))
    spaced = spaced_forcing_plan(n_agents, spacing)

    curves = {}
    for name, plan in (("single", single), ("spaced", spaced)):
        summary = run_ensemble(
            EnsembleSpec(
                graph=graph,
                noise=noise,
                forcing=plan,
                horizon=horizon,
                n_runs=n_runs,
                base_seed=base_seed,
            )
        )
        free_only = summary.free_mask().any()
        curves[name] = np.asarray(summary.mean_density(free_only=free_only))
    steady = {name: float(c[burn_in:].mean()) for name, c in curves.items()}
    return StrategyResult(
        epsilon=epsilon,
        spacing=spacing,
        horizon=horizon,
        burn_in=burn_in,
        forced_single=(0,),
        forced_spaced=tuple(int(i) for i in spaced.nodes),
        density_single=curves["single"],
        density_spaced=curves["spaced"],
        steady_single=steady["single"],
        steady_spaced=steady["spaced"],
        controlled_count=len(spaced.forced),
    )
