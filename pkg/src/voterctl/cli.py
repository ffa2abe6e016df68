"""Command-line interface.

Subcommands mirror the library: ``run`` executes the named figure-level
experiments (CSV + JSON metadata + PNG), and the per-module commands
(simulate, ensemble, info, meanfield, capacity, gramian, oracle, influence,
fit, strategy) emit their datasets to stdout or files.

Exit codes: 0 success, 1 usage error, 2 numeric failure (non-convergence),
3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, oracle as oracle_mod
from .channel import capacity_profile
from .control import (
    build_system,
    observability_gramian,
    observation_energy_bounds,
    reachability_gramian,
)
from .dynamics import ForcingPlan, NoiseResponse, simulate
from .ensemble import EnsembleSpec, default_burn_in, precision, run_ensemble
from .errors import BudgetError, ConvergenceError
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment, write_csv
from .infotheory import (
    delayed_multi_information,
    delayed_mutual_information,
    mutual_information_profile,
)
from .influence import fit_exponential_decay, influence_by_forcing, influence_scores, rank_agents
from .meanfield import MeanFieldSystem, control_length, iterate, mean_density, stationary
from .topology import load_graph, make_line, make_scale_free

USAGE_EXIT = 1
NUMERIC_EXIT = 2
BUDGET_EXIT = 3


class CliError(Exception):
    """Usage-level problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.print_usage(sys.stderr)
        raise CliError(message)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x != "")


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x != "")


def _forcing(text: str | None) -> ForcingPlan:
    if not text:
        return ForcingPlan.none()
    pairs = []
    for item in text.split(","):
        node, _, bit = item.partition("=")
        pairs.append((int(node), int(bit) if bit else 1))
    return ForcingPlan(tuple(pairs))


def _add_topology(parser: _Parser) -> None:
    parser.add_argument("--line", type=int, help="line chain with N free agents (N+1 nodes)")
    parser.add_argument("--scale-free", nargs="+",
                        help="scale-free graph: n m seed (or 'n,m,seed')")
    parser.add_argument("--graph", help="path to an edge-list graph file")


def _resolve_graph(args, default_line: int | None = None):
    given = [x for x in (args.line, args.scale_free, args.graph) if x is not None]
    if len(given) > 1:
        raise CliError("give at most one of --line / --scale-free / --graph")
    if args.line is not None:
        return make_line(args.line)
    if args.scale_free is not None:
        n, m, s = _ints(",".join(args.scale_free))
        return make_scale_free(n, m, s)
    if args.graph is not None:
        return load_graph(args.graph)
    if default_line is not None:
        return make_line(default_line)
    raise CliError("a topology is required: --line / --scale-free / --graph")


def _emit(rows, header, out: str | None, name: str) -> None:
    text = ",".join(header) + "\n" + "\n".join(
        ",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row)
        for row in rows
    ) + "\n"
    if out:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / name).write_text(text)
        print(outdir / name)
    else:
        sys.stdout.write(text)


def _burn_in_arg(value: str | None, graph, noise) -> int:
    if value in (None, "auto"):
        return default_burn_in(graph, noise)[0]
    return int(value)


def _cmd_run(args) -> int:
    if args.experiment is None:
        raise CliError("an experiment name is required")
    cfg = ExperimentConfig(
        experiment=args.experiment,
        out=args.out,
        line=args.line,
        scale_free=_ints(",".join(args.scale_free)) if args.scale_free else None,
        graph_path=args.graph,
        eps=_floats(args.eps) if args.eps else (),
        eps_range=tuple(float(x) for x in args.eps_range.split(":")[:2])
        + (int(args.eps_range.split(":")[2]),) if args.eps_range else None,
        runs=args.runs,
        info_runs=args.info_runs,
        tau=_ints(args.tau) if args.tau else (),
        seed=args.seed,
        alpha=args.alpha,
        burn_in=None if args.burn_in in (None, "auto") else int(args.burn_in),
        horizon=args.horizon,
        mode=args.mode,
        spacing=None if args.spacing in (None, "auto") else int(args.spacing),
        m_max=args.m_max,
        n_list=_ints(args.n_list) if args.n_list else (),
        tol=args.tol,
        agents=_ints(args.agents) if args.agents else (),
        no_plot=args.no_plot,
    )
    try:
        files = run_experiment(cfg)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    for f in files:
        print(f)
    return 0


def _cmd_simulate(args) -> int:
    graph = _resolve_graph(args)
    noise = NoiseResponse(args.eps)
    forcing = _forcing(args.force)
    trajectory = simulate(graph, None, noise, forcing, args.horizon, args.seed)
    if args.dump_trajectory:
        dense = trajectory.dense()
        header = ["t"] + [f"s_{i}" for i in range(graph.node_count)]
        rows = [(t, *dense[t]) for t in range(trajectory.horizon + 1)]
        path = Path(args.dump_trajectory)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_csv(path, header, rows)
        print(path)
    if args.spacetime:
        path = Path(args.spacetime)
        path.parent.mkdir(parents=True, exist_ok=True)
        dense = trajectory.dense()
        path.write_text(
            "\n".join("".join(str(int(b)) for b in row) for row in dense) + "\n"
        )
        print(path)
    exclude = tuple(int(i) for i in forcing.nodes) if not forcing.is_empty else ()
    final = trajectory.density(trajectory.horizon, exclude=exclude if exclude else ())
    print(f"final_density,{final:.12g}")
    return 0


def _cmd_ensemble(args) -> int:
    graph = _resolve_graph(args)
    noise = NoiseResponse(args.eps)
    forcing = _forcing(args.force)
    t_meas = _burn_in_arg(args.burn_in, graph, noise)
    times = _ints(args.times) if args.times else (t_meas,)
    horizon = args.horizon if args.horizon is not None else max(times)
    summary = run_ensemble(
        EnsembleSpec(graph=graph, noise=noise, forcing=forcing, horizon=horizon,
                     n_runs=args.runs, base_seed=args.seed, alpha=args.alpha,
                     budget_bytes=args.budget_bytes)
    )
    rows = []
    for t in times:
        probs = summary.marginal_one_prob(t)
        for node in range(graph.node_count):
            rows.append((node, t, float(probs[node]), args.runs))
    _emit(rows, ["node", "t", "p_one", "n_runs"], args.out, "ensemble.csv")
    if args.out:
        meta = {
            "runs": args.runs, "alpha": args.alpha, "seed": args.seed,
            "burn_in": t_meas, "times": list(times), "eps": args.eps,
            "precision_bound": precision(args.runs, args.alpha),
            "forced": [int(i) for i in forcing.nodes] if not forcing.is_empty else [],
            "package_version": __version__,
        }
        path = Path(args.out) / "ensemble.meta.json"
        path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
        print(path)
    return 0


def _cmd_info(args) -> int:
    graph = _resolve_graph(args)
    noise = NoiseResponse(args.eps)
    forcing = _forcing(args.force)
    tau = args.tau
    t_meas = _burn_in_arg(args.measure_time, graph, noise)
    summary = run_ensemble(
        EnsembleSpec(graph=graph, noise=noise, forcing=forcing,
                     horizon=t_meas + tau, n_runs=args.runs, base_seed=args.seed,
                     record_states_at=(t_meas, t_meas + tau))
    )
    rows = []
    if args.pair:
        i, j = args.pair
        res = delayed_mutual_information(summary.samples, i, j, t_meas, tau)
        rows.append((i, j, t_meas, tau, res.value, args.runs))
    elif args.multi is not None:
        res = delayed_multi_information(summary.samples, args.multi, t_meas, tau)
        rows.append((args.multi, "ALL", t_meas, tau, res.value, args.runs))
    elif args.profile is not None:
        for j, value in mutual_information_profile(summary.samples, args.profile, t_meas, tau):
            rows.append((args.profile, j, t_meas, tau, value, args.runs))
    else:
        raise CliError("choose one of --pair i,j / --multi i / --profile i")
    _emit(rows, ["i", "j", "t", "tau", "value_bits", "n_runs"], args.out, "info.csv")
    return 0


def _cmd_meanfield(args) -> int:
    system = MeanFieldSystem(n=args.n, epsilon=args.eps)
    pi = stationary(system).pi
    header = ["i", "pi_i"]
    columns = [pi]
    if args.t is not None:
        p_t = iterate(system, np.full(args.n, 0.5), args.t)
        header.append(f"p_t{args.t}")
        columns.append(p_t)
    if args.compare_ensemble:
        graph = make_line(args.n)
        noise = NoiseResponse(args.eps)
        t_meas = _burn_in_arg(args.burn_in, graph, noise)
        summary = run_ensemble(
            EnsembleSpec(graph=graph, noise=noise, forcing=ForcingPlan(((0, 1),)),
                         horizon=t_meas, n_runs=args.compare_ensemble,
                         base_seed=args.seed)
        )
        header.append("mc_p_one")
        columns.append(summary.marginal_one_prob(t_meas)[1:])
    rows = [(i + 1, *(float(c[i]) for c in columns)) for i in range(args.n)]
    _emit(rows, header, args.out, "meanfield.csv")
    scalars = {
        "ell_c": control_length(args.eps),
        "S": mean_density(system).value,
        "limit_case": mean_density(system).limit_case,
    }
    sys.stdout.write(json.dumps(scalars, sort_keys=True) + "\n")
    return 0


def _cmd_capacity(args) -> int:
    rows = []
    for eps in _floats(args.eps):
        for m, eps_m, c_m in capacity_profile(eps, args.m_max):
            rows.append((eps, m, eps_m, c_m))
    _emit(rows, ["eps", "m", "eps_m", "capacity_bits"], args.out, "capacity.csv")
    return 0


def _cmd_gramian(args) -> int:
    system = build_system(args.n, args.eps)
    which = "reachability" if args.reach else "observability"
    gram = (reachability_gramian if args.reach else observability_gramian)(
        system, tol=args.tol
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    matrix_path = outdir / f"gramian-{which}.csv"
    write_csv(matrix_path, [f"col_{j}" for j in range(args.n)],
              [tuple(row) for row in gram.matrix])
    eig_path = outdir / f"gramian-{which}.eigenvalues.csv"
    write_csv(eig_path, ["eigenvalue"], [(float(v),) for v in
                                         sorted(np.linalg.eigvalsh(gram.matrix))])
    payload = {
        "kind": which, "n": args.n, "eps": args.eps, "tol": args.tol,
        "truncation_k": gram.truncation_k, "tail_bound": gram.tail_bound,
        "package_version": __version__,
    }
    if not args.reach:
        bounds = observation_energy_bounds(args.n, args.eps)
        payload["energy"] = float(gram.matrix[0, 0])
        payload["energy_lower_bound"] = bounds.lower
        payload["energy_upper_bound"] = bounds.upper
        payload["log_energy_lower_bound"] = bounds.log_lower
        payload["log_energy_upper_bound"] = bounds.log_upper
    json_path = outdir / f"gramian-{which}.json"
    json_path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    for p in (matrix_path, eig_path, json_path):
        print(p)
    return 0


def _cmd_oracle(args) -> int:
    graph = make_line(args.n) if args.n is not None else _resolve_graph(args)
    noise = NoiseResponse(args.eps)
    forcing = _forcing(args.force)
    chain = oracle_mod.build_chain(graph, noise, forcing)
    mu0 = oracle_mod.initial_distribution(chain, bias=args.bias)
    if args.check == "marginals":
        marg = oracle_mod.exact_marginals(chain, mu0, args.t)
        rows = [(i, float(marg[i])) for i in range(graph.node_count)]
        _emit(rows, ["i", "p_one"], args.out, "oracle.csv")
    elif args.check == "stationary":
        mu = oracle_mod.exact_stationary(chain)
        marg = oracle_mod.state_bits(chain.n).T @ mu
        rows = [(i, float(marg[i])) for i in range(graph.node_count)]
        _emit(rows, ["i", "p_one"], args.out, "oracle.csv")
    elif args.check == "mi":
        if args.j is not None:
            value = oracle_mod.exact_delayed_mi(chain, mu0, args.i, args.j, args.t, args.tau)
            rows = [(args.i, args.j, args.t, args.tau, value)]
        else:
            value = oracle_mod.exact_delayed_multi_info(chain, mu0, args.i, args.t, args.tau)
            rows = [(args.i, "ALL", args.t, args.tau, value)]
        _emit(rows, ["i", "j", "t", "tau", "value_bits"], args.out, "oracle.csv")
    else:
        raise CliError(f"unknown check {args.check!r}")
    return 0


def _cmd_influence(args) -> int:
    graph = _resolve_graph(args)
    noise = NoiseResponse(args.eps)
    measure_time = None if args.measure_time in (None, "auto") else int(args.measure_time)
    if args.force is not None:
        score = influence_by_forcing(
            graph, noise, args.force, args.runs, mode=args.mode,
            base_seed=args.seed, measure_time=measure_time, window=args.window,
        )
        rows = [(score.agent, score.forced_value, score.mean_density,
                 score.n_runs, score.t_measure, int(score.stationary_ok))]
        _emit(rows, ["agent", "forced_value", "mean_density", "n_runs",
                     "t_measure", "stationary_ok"], args.out, "influence.csv")
    elif args.rank:
        scores = influence_scores(
            graph, noise, args.runs, base_seed=args.seed, mode=args.mode,
            measure_time=measure_time, window=args.window,
        )
        order = rank_agents(scores)
        rows = [(pos, agent, scores[agent]) for pos, agent in enumerate(order)]
        _emit(rows, ["rank", "agent", "influence"], args.out, "influence.csv")
    else:
        raise CliError("choose --force AGENT or --rank")
    return 0


def _cmd_fit(args) -> int:
    path = Path(args.profile_from)
    if not path.exists():
        raise CliError(f"profile file not found: {path}")
    lines = path.read_text().strip().splitlines()
    header = [h.strip() for h in lines[0].split(",")]
    j_col = header.index("j") if "j" in header else 0
    candidates = [c for c in ("value_bits", "w", "value") if c in header]
    v_col = header.index(candidates[0]) if candidates else 1
    profile = []
    for line in lines[1:]:
        parts = line.split(",")
        profile.append((int(float(parts[j_col])), float(parts[v_col])))
    fit = fit_exponential_decay(profile, args.agent)
    sys.stdout.write(json.dumps({
        "agent": fit.agent, "amplitude": fit.amplitude, "rate": fit.rate,
        "correlation": fit.correlation, "points_used": fit.points_used,
        "excluded_nonpositive": fit.excluded_nonpositive, "decaying": fit.decaying,
    }, sort_keys=True) + "\n")
    return 0


def _cmd_strategy(args) -> int:
    cfg = ExperimentConfig(
        experiment="strategy",
        out=args.out,
        line=args.line,
        eps=_floats(args.eps) if args.eps else (),
        runs=args.runs,
        seed=args.seed,
        spacing=None if args.spacing in (None, "auto") else int(args.spacing),
        burn_in=None if args.burn_in in (None, "auto") else int(args.burn_in),
        no_plot=args.no_plot,
    )
    for f in run_experiment(cfg):
        print(f)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="voterctl", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    def common(p, topology=True, eps_single=False):
        if topology:
            _add_topology(p)
        if eps_single:
            p.add_argument("--eps", type=float, default=0.01)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="flat key=value config file; flags win")

    run_p = sub.add_parser("run", help="run a named experiment")
    run_p.add_argument("experiment", nargs="?", choices=sorted(EXPERIMENTS), metavar="experiment")
    _add_topology(run_p)
    run_p.add_argument("--eps", help="comma-separated noise levels")
    run_p.add_argument("--eps-range", help="start:stop:count grid of noise levels")
    run_p.add_argument("--runs", type=int)
    run_p.add_argument("--info-runs", type=int)
    run_p.add_argument("--tau", help="comma-separated delays")
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--alpha", type=float, default=0.05)
    run_p.add_argument("--burn-in", default="auto")
    run_p.add_argument("--horizon", type=int)
    run_p.add_argument("--mode", choices=("transient", "steady"), default="transient")
    run_p.add_argument("--spacing", default="auto")
    run_p.add_argument("--m-max", type=int, default=50)
    run_p.add_argument("--n-list", help="comma-separated state dimensions")
    run_p.add_argument("--tol", type=float, default=1e-10)
    run_p.add_argument("--agents", help="comma-separated probe agents")
    run_p.add_argument("--out", default="voterctl-out")
    run_p.add_argument("--no-plot", action="store_true")
    run_p.add_argument("--config", help="flat key=value config file; flags win")
    run_p.set_defaults(func=_cmd_run)

    sim_p = sub.add_parser("simulate", help="one realization, optional dumps")
    common(sim_p, eps_single=True)
    sim_p.add_argument("--horizon", type=int, default=100)
    sim_p.add_argument("--force", help="forcing plan 'node=bit,...'")
    sim_p.add_argument("--dump-trajectory", help="write CSV t,s_0..s_{n-1}")
    sim_p.add_argument("--spacetime", help="write rows of 0/1 characters")
    sim_p.set_defaults(func=_cmd_simulate)

    ens_p = sub.add_parser("ensemble", help="marginal summary of N runs")
    common(ens_p, eps_single=True)
    ens_p.add_argument("--runs", type=int, default=1000)
    ens_p.add_argument("--alpha", type=float, default=0.05)
    ens_p.add_argument("--burn-in", default="auto")
    ens_p.add_argument("--times", help="comma-separated report times")
    ens_p.add_argument("--horizon", type=int)
    ens_p.add_argument("--force", help="forcing plan 'node=bit,...'")
    ens_p.add_argument("--budget-bytes", type=int, default=2 << 30)
    ens_p.add_argument("--out")
    ens_p.set_defaults(func=_cmd_ensemble)

    info_p = sub.add_parser("info", help="delayed information estimates")
    common(info_p, eps_single=True)
    info_p.add_argument("--runs", type=int, default=10000)
    info_p.add_argument("--tau", type=int, default=1)
    info_p.add_argument("--measure-time", default="auto", dest="measure_time")
    info_p.add_argument("--pair", nargs=2, type=int, metavar=("I", "J"),
                        help="agents i and j")
    info_p.add_argument("--multi", type=int, help="agent i vs all others")
    info_p.add_argument("--profile", type=int, help="agent i against every j")
    info_p.add_argument("--force", help="forcing plan 'node=bit,...'")
    info_p.add_argument("--out")
    info_p.set_defaults(func=_cmd_info)

    mf_p = sub.add_parser("meanfield", help="line-chain analytics")
    mf_p.add_argument("--n", type=int, required=True)
    mf_p.add_argument("--eps", type=float, required=True)
    mf_p.add_argument("--t", type=int)
    mf_p.add_argument("--compare-ensemble", type=int, metavar="RUNS")
    mf_p.add_argument("--burn-in", default="auto")
    mf_p.add_argument("--seed", type=int, default=0)
    mf_p.add_argument("--out")
    mf_p.add_argument("--config", help="flat key=value config file; flags win")
    mf_p.set_defaults(func=_cmd_meanfield)

    cap_p = sub.add_parser("capacity", help="influence-channel capacity table")
    cap_p.add_argument("--eps", required=True, help="comma-separated noise levels")
    cap_p.add_argument("--m-max", type=int, default=50)
    cap_p.add_argument("--out")
    cap_p.add_argument("--config", help="flat key=value config file; flags win")
    cap_p.set_defaults(func=_cmd_capacity)

    gram_p = sub.add_parser("gramian", help="observability/reachability Gramian")
    gram_p.add_argument("--n", type=int, required=True)
    gram_p.add_argument("--eps", type=float, required=True)
    gram_p.add_argument("--tol", type=float, default=1e-10)
    mode = gram_p.add_mutually_exclusive_group()
    mode.add_argument("--obs", action="store_true")
    mode.add_argument("--reach", action="store_true")
    gram_p.add_argument("--out", default="voterctl-out")
    gram_p.add_argument("--config", help="flat key=value config file; flags win")
    gram_p.set_defaults(func=_cmd_gramian)

    orc_p = sub.add_parser("oracle", help="exact small-system reference values")
    common(orc_p, eps_single=True)
    orc_p.add_argument("--n", type=int, help="shorthand for --line N")
    orc_p.add_argument("--check", required=True, choices=("mi", "marginals", "stationary"))
    orc_p.add_argument("--t", type=int, default=0)
    orc_p.add_argument("--tau", type=int, default=1)
    orc_p.add_argument("--i", type=int, default=1)
    orc_p.add_argument("--j", type=int)
    orc_p.add_argument("--bias", type=float, default=0.5)
    orc_p.add_argument("--force", help="forcing plan 'node=bit,...'")
    orc_p.add_argument("--out")
    orc_p.set_defaults(func=_cmd_oracle)

    inf_p = sub.add_parser("influence", help="intrusive influence by forcing")
    common(inf_p, eps_single=True)
    inf_p.add_argument("--runs", type=int, default=2000)
    inf_p.add_argument("--force", type=int, help="agent to pin")
    inf_p.add_argument("--rank", action="store_true")
    inf_p.add_argument("--mode", choices=("transient", "steady"), default="steady")
    inf_p.add_argument("--measure-time", default="auto", dest="measure_time")
    inf_p.add_argument("--window", type=int, default=1)
    inf_p.add_argument("--out")
    inf_p.set_defaults(func=_cmd_influence)

    fit_p = sub.add_parser("fit", help="exponential decay fit of a profile CSV")
    fit_p.add_argument("--profile-from", required=True)
    fit_p.add_argument("--agent", type=int, default=1)
    fit_p.add_argument("--config", help="flat key=value config file; flags win")
    fit_p.set_defaults(func=_cmd_fit)

    strat_p = sub.add_parser("strategy", help="spaced forcing vs single forcing")
    strat_p.add_argument("--line", type=int, default=1000)
    strat_p.add_argument("--eps", help="comma-separated noise levels")
    strat_p.add_argument("--runs", type=int, default=400)
    strat_p.add_argument("--spacing", default="auto")
    strat_p.add_argument("--burn-in", default="auto")
    strat_p.add_argument("--seed", type=int, default=0)
    strat_p.add_argument("--out", default="voterctl-out")
    strat_p.add_argument("--no-plot", action="store_true")
    strat_p.add_argument("--config", help="flat key=value config file; flags win")
    strat_p.set_defaults(func=_cmd_strategy)

    return parser


def _load_config_args(path: str) -> list[str]:
    """Turn a flat key=value file into pseudo-flags (inserted before the
    user's flags, so explicit flags win)."""
    tokens: list[str] = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        key = key.strip().replace("_", "-")
        value = value.strip()
        if value.lower() in ("true", "yes", "1") and key in ("no-plot", "rank", "obs", "reach"):
            tokens.append(f"--{key}")
        elif value.lower() in ("false", "no", "0") and key in ("no-plot", "rank", "obs", "reach"):
            continue
        else:
            tokens.extend((f"--{key}", value))
    return tokens


def _apply_config(argv: list[str]) -> list[str]:
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise CliError("--config needs a file path")
    config_tokens = _load_config_args(argv[idx + 1])
    rest = argv[:idx] + argv[idx + 2 :]
    if not rest:
        raise CliError("--config alone does not select a subcommand")
    # insert right after the subcommand token so flags given later override
    return [rest[0]] + config_tokens + rest[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(argv)
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_usage(sys.stderr)
            return USAGE_EXIT
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET_EXIT
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_EXIT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
