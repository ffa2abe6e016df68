"""Monte-Carlo ensemble engine.

Runs N independent realizations with per-run seeded streams (seeds
base_seed .. base_seed+N-1), aggregates exact integer counts of ones per
(time, agent), and retains raw states at the time slices the information
estimators need.  Results are bit-identical for a fixed spec regardless of
how the runs are chunked internally, because every run owns its stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import ForcingPlan, NoiseResponse
from .errors import BudgetError
from .meanfield import MeanFieldSystem, steady_state_time
from .topology import Graph, is_line_chain

# Acklam's rational approximation of the inverse standard normal CDF.
# Absolute error below 1.2e-9 over (0, 1); no table lookup, any alpha works.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_quantile(q: float) -> float:
    """Inverse standard normal CDF by rational approximation."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile argument must lie in (0, 1), got {q}")
    if q < _P_LOW:
        u = math.sqrt(-2.0 * math.log(q))
        return (((((_C[0] * u + _C[1]) * u + _C[2]) * u + _C[3]) * u + _C[4]) * u + _C[5]) / \
               ((((_D[0] * u + _D[1]) * u + _D[2]) * u + _D[3]) * u + 1.0)
    if q > 1.0 - _P_LOW:
        u = math.sqrt(-2.0 * math.log(1.0 - q))
        return -(((((_C[0] * u + _C[1]) * u + _C[2]) * u + _C[3]) * u + _C[4]) * u + _C[5]) / \
                ((((_D[0] * u + _D[1]) * u + _D[2]) * u + _D[3]) * u + 1.0)
    u = q - 0.5
    r = u * u
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * u / \
           (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def precision(n_runs: int, alpha: float = 0.05) -> float:
    """Worst-case half-width of the (1-alpha) confidence interval for an
    empirical probability from n_runs samples: z_{1-alpha/2} / (2 sqrt(N)).
    The p(1-p) <= 1/4 bound makes it valid for every true probability."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return normal_quantile(1.0 - alpha / 2.0) / (2.0 * math.sqrt(n_runs))


@dataclass(frozen=True)
class EnsembleSpec:
    """Everything needed to reproduce an ensemble bit-for-bit."""

    graph: Graph
    noise: NoiseResponse
    forcing: ForcingPlan = field(default_factory=ForcingPlan.none)
    horizon: int = 0
    n_runs: int = 1
    base_seed: int = 0
    initial: tuple[int, ...] | None = None  # None -> i.i.d. Bernoulli(1/2)
    record_states_at: tuple[int, ...] = ()
    alpha: float = 0.05
    budget_bytes: int = 2 << 30

    def __post_init__(self):
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        self.forcing.validate_for(self.graph)
        for t in self.record_states_at:
            if not 0 <= t <= self.horizon:
                raise ValueError(f"recorded time {t} outside [0, {self.horizon}]")
        if self.initial is not None:
            if len(self.initial) != self.graph.node_count:
                raise ValueError("initial state length must match node count")
            if any(b not in (0, 1) for b in self.initial):
                raise ValueError("initial state entries must be 0 or 1")

    def retained_bytes(self) -> int:
        per_slice = self.n_runs * ((self.graph.node_count + 7) // 8)
        counts = (self.horizon + 1) * self.graph.node_count * 8
        return len(set(self.record_states_at)) * per_slice + counts


class StateSamples:
    """Raw ensemble states retained at selected times, bit-packed per run."""

    def __init__(self, node_count: int, n_runs: int, packed: dict[int, np.ndarray]):
        self.node_count = node_count
        self.n_runs = n_runs
        self._packed = packed

    @property
    def times(self) -> tuple[int, ...]:
        return tuple(sorted(self._packed))

    def at(self, t: int) -> np.ndarray:
        """States of all runs at time t as an (n_runs, node_count) 0/1 array."""
        if t not in self._packed:
            raise KeyError(f"states were not recorded at time {t}")
        return np.unpackbits(self._packed[t], axis=1, count=self.node_count).astype(np.uint8)


@dataclass
class EnsembleSummary:
    """Aggregated ensemble output: exact integer one-counts per (time, agent),
    the sampling precision bound, and the retained raw slices."""

    n_runs: int
    node_count: int
    horizon: int
    alpha: float
    one_counts: np.ndarray  # (horizon+1, node_count) int64
    precision_bound: float
    samples: StateSamples
    forced_nodes: tuple[int, ...]
    burn_in: int | None = None

    def marginal_one_prob(self, t: int | None = None) -> np.ndarray:
        """Empirical P(s_i(t) = 1); full (T+1, n) array when t is None."""
        if t is None:
            return self.one_counts / self.n_runs
        return self.one_counts[t] / self.n_runs

    def free_mask(self) -> np.ndarray:
        mask = np.ones(self.node_count, dtype=bool)
        if self.forced_nodes:
            mask[list(self.forced_nodes)] = False
        return mask

    def mean_density(self, t: int | None = None, free_only: bool = True):
        """Ensemble-mean one-density; by convention over free agents only,
        matching the analytics (pass free_only=False to include forced)."""
        mask = self.free_mask() if free_only else np.ones(self.node_count, dtype=bool)
        if not mask.any():
            raise ValueError("no agents left after excluding forced ones")
        probs = self.one_counts[:, mask] / self.n_runs
        if t is None:
            return probs.mean(axis=1)
        return float(probs[t].mean())


def default_burn_in(graph: Graph, noise: NoiseResponse, threshold: float = 1e-4) -> tuple[int, str]:
    """Measurement-time rule: on the controlled line iterate the closed-form
    deviation until it drops below ``threshold``; for any other topology no
    closed form exists so use 10 * node_count.  Returns (steps, rule_name)."""
    if is_line_chain(graph) and graph.node_count > 1:
        system = MeanFieldSystem(n=graph.node_count - 1, epsilon=noise.epsilon)
        return steady_state_time(system, threshold=threshold), "line-deviation"
    return 10 * graph.node_count, "ten-times-n"


def run_ensemble(spec: EnsembleSpec, window_bytes: int = 64 << 20) -> EnsembleSummary:
    """Execute the ensemble.

    Every run r consumes its own stream seeded base_seed + r exactly as
    dynamics.simulate does (initial draw first when the start is random,
    then one uniform per agent per step in node-index order), so a run's
    trajectory is independent of N and of the internal chunking.
    """
    if spec.retained_bytes() > spec.budget_bytes:
        raise BudgetError(
            f"ensemble needs {spec.retained_bytes()} bytes of retained state, "
            f"budget is {spec.budget_bytes}; lower n_runs or recorded slices"
        )
    graph, noise, forcing = spec.graph, spec.noise, spec.forcing
    n, n_runs, horizon = graph.node_count, spec.n_runs, spec.horizon
    operator = graph.mean_operator
    record_set = frozenset(spec.record_states_at)

    counts = np.zeros((horizon + 1, n), dtype=np.int64)
    retained: dict[int, list[np.ndarray]] = {t: [] for t in record_set}

    # chunk many runs per vectorized step; window limits the uniform block
    window = max(1, min(horizon, 128))
    chunk = max(16, min(n_runs, window_bytes // (8 * n * window)))
    fixed_initial = (
        None if spec.initial is None else np.array(spec.initial, dtype=np.float64)
    )

    for start in range(0, n_runs, chunk):
        rows = min(chunk, n_runs - start)
        gens = [np.random.default_rng(spec.base_seed + start + r) for r in range(rows)]
        if fixed_initial is None:
            states = np.empty((rows, n))
            for k, g in enumerate(gens):
                states[k] = g.random(n)
            states = (states < 0.5).astype(np.float64)
        else:
            states = np.tile(fixed_initial, (rows, 1))
        forcing.clamp(states)
        counts[0] += states.sum(axis=0).astype(np.int64)
        if 0 in record_set:
            retained[0].append(np.packbits(states.astype(bool), axis=1))

        t = 0
        u_block = np.empty((rows, window, n))
        while t < horizon:
            w = min(window, horizon - t)
            for k, g in enumerate(gens):
                u_block[k, :w] = g.random((w, n))
            for s in range(w):
                rho = operator @ states.T
                probs = noise.probability_of_one(rho.T)
                states = (u_block[:, s, :] < probs).astype(np.float64)
                forcing.clamp(states)
                t += 1
                counts[t] += states.sum(axis=0).astype(np.int64)
                if t in record_set:
                    retained[t].append(np.packbits(states.astype(bool), axis=1))

    packed = {t: np.vstack(parts) for t, parts in retained.items()}
    return EnsembleSummary(
        n_runs=n_runs,
        node_count=n,
        horizon=horizon,
        alpha=spec.alpha,
        one_counts=counts,
        precision_bound=precision(n_runs, spec.alpha),
        samples=StateSamples(n, n_runs, packed),
        forced_nodes=tuple(int(i) for i in forcing.nodes) if not forcing.is_empty else (),
    )
