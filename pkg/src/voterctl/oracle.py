"""Exact brute-force reference for small systems.

Enumerates the full 2^n-state Markov chain induced by the synchronous voter
update on a given graph, propagates exact distributions, and computes exact
marginals, delayed joint laws, mutual/multi-information and the stationary
distribution.  This is the ground truth the Monte-Carlo estimators are
checked against; it never imports the estimator code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ForcingPlan, NoiseResponse
from .errors import ConvergenceError
from .topology import Graph

MAX_NODES = 14
_DENSE_MATRIX_LIMIT = 10


@dataclass
class ExactChain:
    """The induced chain: per-state per-agent probabilities of voting 1.

    States are integers whose bit i is agent i's vote.  The synchronous
    update factorizes over agents, so a full 2^n x 2^n matrix is never
    needed: rows are product measures generated on the fly.
    """

    graph: Graph
    noise: NoiseResponse
    forcing: ForcingPlan
    prob_one: np.ndarray  # (2^n, n): P(next bit_i = 1 | current state)

    @property
    def n(self) -> int:
        return self.graph.node_count

    @property
    def n_states(self) -> int:
        return 1 << self.n


def state_bits(n: int) -> np.ndarray:
    """(2^n, n) table of agent votes per enumerated state."""
    states = np.arange(1 << n, dtype=np.int64)
    return ((states[:, None] >> np.arange(n)) & 1).astype(np.float64)


def build_chain(graph: Graph, noise: NoiseResponse, forcing: ForcingPlan) -> ExactChain:
    if graph.node_count > MAX_NODES:
        raise ValueError(
            f"exact enumeration is capped at {MAX_NODES} agents, got {graph.node_count}"
        )
    forcing.validate_for(graph)
    bits = state_bits(graph.node_count)
    rho = bits @ graph.mean_operator.T.toarray()
    q = noise.probability_of_one(rho)
    if not forcing.is_empty:
        q[:, forcing.nodes] = forcing.bits.astype(np.float64)
    return ExactChain(graph=graph, noise=noise, forcing=forcing, prob_one=q)


def initial_distribution(
    chain: ExactChain, bias: float = 0.5, fixed: tuple[int, ...] | None = None
) -> np.ndarray:
    """Product initial law: every agent i.i.d. Bernoulli(bias), or the point
    mass on ``fixed``; forced agents are pinned to their value either way."""
    n = chain.n
    if fixed is not None:
        p_one = np.array(fixed, dtype=np.float64)
    else:
        p_one = np.full(n, bias)
    if not chain.forcing.is_empty:
        p_one[chain.forcing.nodes] = chain.forcing.bits
    bits = state_bits(n)
    return np.prod(np.where(bits > 0, p_one, 1.0 - p_one), axis=1)


def apply(chain: ExactChain, mu: np.ndarray, chunk: int = 256) -> np.ndarray:
    """One exact propagation step of a (possibly unnormalized) measure."""
    mu = np.asarray(mu, dtype=np.float64)
    out = np.zeros(chain.n_states)
    for start in range(0, chain.n_states, chunk):
        stop = min(start + chunk, chain.n_states)
        w = mu[start:stop]
        live = w != 0.0
        if not live.any():
            continue
        r = w[live][:, None]
        q = chain.prob_one[start:stop][live]
        for i in range(chain.n):
            qi = q[:, i : i + 1]
            r = np.concatenate([r * (1.0 - qi), r * qi], axis=1)
        out += r.sum(axis=0)
    return out


def propagate(chain: ExactChain, mu: np.ndarray, steps: int) -> np.ndarray:
    for _ in range(steps):
        mu = apply(chain, mu)
    return mu


def transition_matrix(chain: ExactChain) -> np.ndarray:
    """Dense row-stochastic transition matrix; only for n <= 10."""
    if chain.n > _DENSE_MATRIX_LIMIT:
        raise ValueError(f"dense matrix capped at {_DENSE_MATRIX_LIMIT} agents")
    rows = np.empty((chain.n_states, chain.n_states))
    for s in range(chain.n_states):
        point = np.zeros(chain.n_states)
        point[s] = 1.0
        rows[s] = apply(chain, point)
    return rows


def exact_marginals(chain: ExactChain, mu0: np.ndarray, t: int) -> np.ndarray:
    """Per-agent P(s_i(t) = 1) under exact propagation."""
    mu = propagate(chain, mu0, t)
    return state_bits(chain.n).T @ mu


def exact_joint(
    chain: ExactChain, mu0: np.ndarray, i: int, j: int, t: int, tau: int
) -> np.ndarray:
    """Exact 2x2 law of (X_i(t), X_j(t+tau)): propagate to t, split the
    measure on bit i, propagate each part tau more steps, read off bit j."""
    mu_t = propagate(chain, mu0, t)
    bits = state_bits(chain.n)
    law = np.empty((2, 2))
    for x in (0, 1):
        part = mu_t * (bits[:, i] == x)
        nu = propagate(chain, part, tau)
        ones = float(nu @ bits[:, j])
        law[x, 1] = ones
        law[x, 0] = float(nu.sum()) - ones
    return law


def _mi_bits(law: np.ndarray) -> float:
    p = law / law.sum()
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    nz = p > 0
    return float(np.sum(p[nz] * np.log2(p[nz] / (px @ py)[nz])))


def exact_delayed_mi(
    chain: ExactChain, mu0: np.ndarray, i: int, j: int, t: int, tau: int
) -> float:
    return _mi_bits(exact_joint(chain, mu0, i, j, t, tau))


def exact_delayed_multi_info(
    chain: ExactChain, mu0: np.ndarray, i: int, t: int, tau: int
) -> float:
    """Exact mutual information between X_i(t) and the number of ones among
    the other agents at t+tau."""
    mu_t = propagate(chain, mu0, t)
    bits = state_bits(chain.n)
    others = (bits.sum(axis=1) - bits[:, i]).astype(np.int64)
    law = np.zeros((2, chain.n))
    for x in (0, 1):
        part = mu_t * (bits[:, i] == x)
        nu = propagate(chain, part, tau)
        law[x] = np.bincount(others, weights=nu, minlength=chain.n)
    return _mi_bits(law)


def exact_stationary(
    chain: ExactChain, tol: float = 1e-12, max_iter: int = 1_000_000
) -> np.ndarray:
    """Stationary law by power iteration; the chain is ergodic for eps > 0."""
    mu = np.full(chain.n_states, 1.0 / chain.n_states)
    if not chain.forcing.is_empty:
        mu = initial_distribution(chain, bias=0.5)
    for _ in range(max_iter):
        nxt = apply(chain, mu)
        if np.abs(nxt - mu).sum() < tol:
            return nxt
        mu = nxt
    raise ConvergenceError(f"stationary distribution not reached within {max_iter} steps")
