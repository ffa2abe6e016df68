"""Named, reproducible experiments emitting figure-level datasets.

Every experiment writes a CSV dataset, a JSON metadata sidecar that fully
records its configuration (rerunning a config overwrites with identical
bytes, timestamp aside), and a rendered PNG figure unless plotting is
switched off.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, plots
from .channel import capacity_profile
from .dynamics import ForcingPlan, NoiseResponse, simulate
from .ensemble import EnsembleSpec, default_burn_in, precision, run_ensemble
from .control import (
    build_system,
    lyapunov_gramian,
    observability_gramian,
    observation_energy_bounds,
    reachability_gramian,
)
from .infotheory import delayed_multi_information, mutual_information_profile
from .influence import (
    influence_scores,
    lambda_vs_control_length,
    multi_information_scores,
    spaced_forcing_experiment,
)
from .meanfield import (
    MeanFieldSystem,
    control_length,
    iterate_trajectory,
    mean_density,
)
from .topology import Graph, is_line_chain, load_graph, make_line, make_scale_free


@dataclass
class ExperimentConfig:
    """Flat bag of experiment knobs; unset fields fall back to per-experiment
    defaults.  The full resolved config lands in the metadata sidecar."""

    experiment: str = ""
    out: str = "voterctl-out"
    line: int | None = None
    scale_free: tuple[int, int, int] | None = None
    graph_path: str | None = None
    eps: tuple[float, ...] = ()
    eps_range: tuple[float, float, int] | None = None
    runs: int | None = None
    info_runs: int | None = None
    tau: tuple[int, ...] = ()
    seed: int = 0
    alpha: float = 0.05
    burn_in: int | None = None  # None -> topology rule
    horizon: int | None = None
    mode: str = "transient"
    spacing: int | None = None  # None -> floor(control length)
    m_max: int = 50
    n_list: tuple[int, ...] = ()
    tol: float = 1e-10
    agents: tuple[int, ...] = ()
    no_plot: bool = False

    def resolve_graph(self, default_line: int | None = None,
                      default_scale_free: tuple[int, int, int] | None = None) -> Graph:
        chosen = [x is not None for x in (self.line, self.scale_free, self.graph_path)]
        if sum(chosen) > 1:
            raise ValueError("give at most one of --line / --scale-free / --graph")
        if self.line is not None:
            return make_line(self.line)
        if self.scale_free is not None:
            n, m, s = self.scale_free
            return make_scale_free(n, m, s)
        if self.graph_path is not None:
            return load_graph(self.graph_path)
        if default_line is not None:
            return make_line(default_line)
        if default_scale_free is not None:
            return make_scale_free(*default_scale_free)
        raise ValueError("experiment needs a topology (--line / --scale-free / --graph)")

    def to_metadata(self) -> dict:
        d = dataclasses.asdict(self)
        d["graph_path"] = str(d["graph_path"]) if d["graph_path"] else None
        return d


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(float(x))  # shortest exact round-trip representation
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def write_metadata(path: Path, config: ExperimentConfig, extra: dict) -> None:
    payload = {
        "experiment": config.experiment,
        "config": config.to_metadata(),
        "package_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    payload.update(extra)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _eps_list(cfg: ExperimentConfig, default: tuple[float, ...]) -> tuple[float, ...]:
    return cfg.eps if cfg.eps else default


def _measure_time(cfg: ExperimentConfig, graph: Graph, noise: NoiseResponse) -> tuple[int, str]:
    if cfg.burn_in is not None:
        return cfg.burn_in, "explicit"
    return default_burn_in(graph, noise)


def run_control_length(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    start, stop, count = cfg.eps_range or (0.001, 0.49, 100)
    eps = np.linspace(start, stop, count)
    rows = [(e, control_length(float(e))) for e in eps]
    csv = outdir / "control-length.csv"
    write_csv(csv, ["eps", "ell_c"], rows)
    meta = outdir / "control-length.meta.json"
    write_metadata(meta, cfg, {"eps_range": [start, stop, count]})
    files = [csv, meta]
    if not cfg.no_plot:
        files.append(plots.control_length_curve(rows, outdir / "control-length.png"))
    return files


def run_capacity(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    eps_values = _eps_list(cfg, (0.01, 0.05, 0.1))
    rows = []
    for eps in eps_values:
        for m, eps_m, c_m in capacity_profile(eps, cfg.m_max):
            rows.append((eps, m, eps_m, c_m))
    csv = outdir / "capacity.csv"
    write_csv(csv, ["eps", "m", "eps_m", "capacity_bits"], rows)
    meta = outdir / "capacity.meta.json"
    write_metadata(meta, cfg, {"m_max": cfg.m_max})
    files = [csv, meta]
    if not cfg.no_plot:
        files.append(plots.capacity_curves(rows, outdir / "capacity.png"))
    return files


def run_density_trace(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    graph = cfg.resolve_graph(default_line=50)
    eps_values = _eps_list(cfg, (0.001, 0.01, 0.05))
    n_runs = cfg.runs or 2000
    is_line = is_line_chain(graph)
    forcing = ForcingPlan(((0, 1),)) if is_line else ForcingPlan.none()
    rows = []
    burn_ins = {}
    for eps in eps_values:
        noise = NoiseResponse(eps)
        t_meas, rule = _measure_time(cfg, graph, noise)
        horizon = cfg.horizon or (t_meas + max(20, t_meas // 5))
        burn_ins[str(eps)] = {"steps": t_meas, "rule": rule}
        summary = run_ensemble(
            EnsembleSpec(graph=graph, noise=noise, forcing=forcing,
                         horizon=horizon, n_runs=n_runs, base_seed=cfg.seed,
                         alpha=cfg.alpha)
        )
        dens = summary.mean_density(free_only=is_line)
        if is_line:
            system = MeanFieldSystem(n=graph.node_count - 1, epsilon=eps)
            pred = iterate_trajectory(system, np.full(system.n, 0.5), horizon).mean(axis=1)
            s_inf = mean_density(system).value
            for t in range(horizon + 1):
                rows.append((eps, t, float(dens[t]), float(pred[t]), s_inf))
        else:
            for t in range(horizon + 1):
                rows.append((eps, t, float(dens[t]), "", ""))
    header = ["eps", "t", "mean_density", "prediction", "asymptotic_mean"]
    csv = outdir / "density-trace.csv"
    write_csv(csv, header, rows)
    meta = outdir / "density-trace.meta.json"
    write_metadata(meta, cfg, {
        "n_runs": n_runs,
        "precision_bound": precision(n_runs, cfg.alpha),
        "burn_in": burn_ins,
        "forced": [int(i) for i in forcing.nodes] if not forcing.is_empty else [],
    })
    files = [csv, meta]
    if not cfg.no_plot:
        files.append(plots.density_traces(rows, outdir / "density-trace.png"))
    return files


def run_spacetime(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    graph = cfg.resolve_graph(default_line=500)
    eps = (cfg.eps or (0.01,))[0]
    horizon = cfg.horizon or 500
    trajectory = simulate(
        graph, None, NoiseResponse(eps), ForcingPlan(((0, 1),)), horizon, cfg.seed
    )
    dense = trajectory.dense()
    txt = outdir / "spacetime.txt"
    txt.write_text("\n".join("".join(str(int(b)) for b in row) for row in dense) + "\n")
    meta = outdir / "spacetime.meta.json"
    write_metadata(meta, cfg, {"eps": eps, "horizon": horizon,
                               "node_count": graph.node_count})
    files = [txt, meta]
    if not cfg.no_plot:
        files.append(plots.spacetime_raster(dense, outdir / "spacetime.png"))
    return files


def run_multi_info_scan(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    graph = cfg.resolve_graph(default_scale_free=(40, 1, cfg.seed))
    eps = (cfg.eps or (0.001,))[0]
    tau = (cfg.tau or (2,))[0]
    n_runs = cfg.runs or 20000
    noise = NoiseResponse(eps)
    mode = cfg.mode
    if mode == "steady":
        t_meas, rule = _measure_time(cfg, graph, noise)
    else:
        t_meas, rule = 0, "initial-state"
    summary = run_ensemble(
        EnsembleSpec(graph=graph, noise=noise, horizon=t_meas + tau,
                     n_runs=n_runs, base_seed=cfg.seed, alpha=cfg.alpha,
                     record_states_at=(t_meas, t_meas + tau))
    )
    rows = []
    for i in range(graph.node_count):
        res = delayed_multi_information(summary.samples, i, t_meas, tau)
        rows.append((i, "ALL", t_meas, tau, res.value, n_runs))
    csv = outdir / "multi-info-scan.csv"
    write_csv(csv, ["i", "j", "t", "tau", "value_bits", "n_runs"], rows)
    meta = outdir / "multi-info-scan.meta.json"
    write_metadata(meta, cfg, {
        "eps": eps, "tau": tau, "n_runs": n_runs, "mode": mode,
        "burn_in": {"steps": t_meas, "rule": rule},
        "precision_bound": precision(n_runs, cfg.alpha),
    })
    files = [csv, meta]
    if not cfg.no_plot:
        files.append(plots.multi_info_scan(rows, outdir / "multi-info-scan.png"))
    return files


def run_graph_coloring_data(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    graph = cfg.resolve_graph(default_scale_free=(40, 1, cfg.seed))
    eps = (cfg.eps or (0.001,))[0]
    tau = (cfg.tau or (4,))[0]
    n_runs = cfg.runs or 2000
    info_runs = cfg.info_runs or max(n_runs, 20000)
    noise = NoiseResponse(eps)
    mode = cfg.mode
    # the transient/steady split applies to the information measurement;
    # intrusive influence is always read after the density has settled
    influence = influence_scores(
        graph, noise, n_runs, base_seed=cfg.seed, mode="steady",
        measure_time=cfg.burn_in, window=10,
    )
    multi = multi_information_scores(
        graph, noise, tau, info_runs, base_seed=cfg.seed + 999_983, mode=mode,
    )
    degrees = graph.degrees()
    rows = [
        (i, int(degrees[i]), influence[i], multi[i]) for i in range(graph.node_count)
    ]
    csv = outdir / "graph-coloring-data.csv"
    write_csv(csv, ["node", "degree", "influence", "multi_info_bits"], rows)
    meta = outdir / "graph-coloring-data.meta.json"
    write_metadata(meta, cfg, {
        "eps": eps, "tau": tau, "mode": mode,
        "influence_runs": n_runs, "info_runs": info_runs,
        "precision_bound": precision(n_runs, cfg.alpha),
    })
    files = [csv, meta]
    if not cfg.no_plot:
        files.append(plots.influence_vs_multi_info(rows, outdir / "graph-coloring-data.png"))
    return files


def run_mi_profile(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    graph = cfg.resolve_graph(default_line=50)
    eps = (cfg.eps or (0.01,))[0]
    taus = cfg.tau or (1, 3, 5)
    agents = cfg.agents or (1, 2, 5, 10, 20, 40)
    n_runs = cfg.runs or 20000
    noise = NoiseResponse(eps)
    t_meas, rule = _measure_time(cfg, graph, noise)
    record = tuple(sorted({t_meas} | {t_meas + tau for tau in taus}))
    summary = run_ensemble(
        EnsembleSpec(graph=graph, noise=noise, forcing=ForcingPlan(((0, 1),)),
                     horizon=max(record), n_runs=n_runs, base_seed=cfg.seed,
                     alpha=cfg.alpha, record_states_at=record)
    )
    rows = []
    for tau in taus:
        for i in agents:
            for j, value in mutual_information_profile(summary.samples, i, t_meas, tau):
                rows.append((i, j, t_meas, tau, value, n_runs))
    csv = outdir / "mi-profile.csv"
    write_csv(csv, ["i", "j", "t", "tau", "value_bits", "n_runs"], rows)
    meta = outdir / "mi-profile.meta.json"
    write_metadata(meta, cfg, {
        "eps": eps, "taus": list(taus), "agents": list(agents), "n_runs": n_runs,
        "burn_in": {"steps": t_meas, "rule": rule},
        "precision_bound": precision(n_runs, cfg.alpha),
    })
    files = [csv, meta]
    if not cfg.no_plot:
        files.append(plots.mi_profiles(rows, outdir / "mi-profile.png"))
    return files


def run_lambda_lc(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    eps_values = _eps_list(cfg, (0.005, 0.01, 0.02, 0.05))
    n_agents = cfg.line or 50
    n_runs = cfg.runs or 10000
    agent = (cfg.agents or (1,))[0]
    reg = lambda_vs_control_length(
        list(eps_values), n_agents=n_agents, n_runs=n_runs,
        base_seed=cfg.seed, agent=agent,
    )
    rows = [
        (eps, inv_lc, rate, fit.amplitude, fit.correlation, fit.points_used)
        for (eps, inv_lc, rate), fit in zip(reg.points, reg.fits)
    ]
    csv = outdir / "lambda-lc.csv"
    write_csv(csv, ["eps", "inv_ell_c", "lambda", "alpha", "fit_correlation", "points"], rows)
    summary_path = outdir / "lambda-lc.summary.json"
    summary_path.write_text(json.dumps({
        "a": reg.slope, "b": reg.intercept, "r": reg.correlation,
        "low_confidence": reg.low_confidence,
    }, sort_keys=True, indent=2) + "\n")
    meta = outdir / "lambda-lc.meta.json"
    write_metadata(meta, cfg, {
        "eps_values": list(eps_values), "n_agents": n_agents, "n_runs": n_runs,
        "agent": agent,
        "regression": {"a": reg.slope, "b": reg.intercept, "r": reg.correlation},
    })
    files = [csv, summary_path, meta]
    if not cfg.no_plot:
        files.append(plots.lambda_vs_inverse_length(rows, reg.slope, reg.intercept,
                                                    outdir / "lambda-lc.png"))
    return files


def run_strategy(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    eps_values = _eps_list(cfg, (0.001, 0.01, 0.05))
    n_agents = cfg.line or 1000
    n_runs = cfg.runs or 400
    rows = []
    steady = {}
    for eps in eps_values:
        spacing = cfg.spacing or max(1, int(control_length(eps)))
        result = spaced_forcing_experiment(
            n_agents, eps, spacing, n_runs=n_runs, base_seed=cfg.seed,
            burn_in=cfg.burn_in,
        )
        for t in range(result.horizon + 1):
            rows.append((eps, result.spacing, t,
                         float(result.density_single[t]),
                         float(result.density_spaced[t])))
        steady[str(eps)] = {
            "spacing": result.spacing,
            "steady_single": result.steady_single,
            "steady_spaced": result.steady_spaced,
            "controlled_count": result.controlled_count,
        }
    csv = outdir / "strategy.csv"
    write_csv(csv, ["eps", "spacing", "t", "density_single", "density_spaced"], rows)
    meta = outdir / "strategy.meta.json"
    write_metadata(meta, cfg, {
        "n_agents": n_agents, "n_runs": n_runs, "steady": steady,
        "precision_bound": precision(n_runs, cfg.alpha),
    })
    files = [csv, meta]
    if not cfg.no_plot:
        files.append(plots.strategy_curves(rows, outdir / "strategy.png"))
    return files


def run_gramian_bounds(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    n_values = cfg.n_list or (3, 5, 10)
    eps_values = _eps_list(cfg, (0.01, 0.05, 0.1))
    rows = []
    certificates = {}
    for n in n_values:
        for eps in eps_values:
            system = build_system(n, eps)
            gram = observability_gramian(system, tol=cfg.tol)
            energy = float(gram.matrix[0, 0])
            bounds = observation_energy_bounds(n, eps)
            lyap = lyapunov_gramian(system, "observability")
            residual = float(np.abs(gram.matrix - lyap).max())
            rows.append((n, eps, energy, bounds.lower, bounds.upper,
                         bounds.log_lower, bounds.log_upper,
                         gram.truncation_k, gram.tail_bound, residual))
            certificates[f"n={n},eps={eps}"] = {
                "truncation_k": gram.truncation_k,
                "tail_bound": gram.tail_bound,
                "lyapunov_max_abs_diff": residual,
            }
    csv = outdir / "gramian-bounds.csv"
    write_csv(csv, ["n", "eps", "energy", "lower_bound", "upper_bound",
                    "log_lower", "log_upper", "truncation_k", "tail_bound",
                    "lyapunov_residual"], rows)
    meta = outdir / "gramian-bounds.meta.json"
    write_metadata(meta, cfg, {"tol": cfg.tol, "certificates": certificates})
    files = [csv, meta]
    if not cfg.no_plot:
        files.append(plots.energy_bounds(rows, outdir / "gramian-bounds.png"))
    return files


EXPERIMENTS = {
    "density-trace": run_density_trace,
    "multi-info-scan": run_multi_info_scan,
    "graph-coloring-data": run_graph_coloring_data,
    "spacetime": run_spacetime,
    "mi-profile": run_mi_profile,
    "lambda-lc": run_lambda_lc,
    "strategy": run_strategy,
    "capacity": run_capacity,
    "gramian-bounds": run_gramian_bounds,
    "control-length": run_control_length,
}


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    if cfg.experiment not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ValueError(f"unknown experiment {cfg.experiment!r}; known: {known}")
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    return EXPERIMENTS[cfg.experiment](cfg, outdir)
