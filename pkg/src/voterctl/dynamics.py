"""Synchronous stochastic voter update.

Each agent counts the fraction rho of ones in its in-neighborhood and votes
1 next step with probability f(rho) = (1-2*eps)*rho + eps.  All agents
update simultaneously from the pre-step state; forced agents are overwritten
with their pinned value after every synchronous step (and at t = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .topology import Graph


@dataclass(frozen=True)
class NoiseResponse:
    """Affine probability response with noise level epsilon in [0, 1/2].

    f(0) = eps and f(1) = 1 - eps: eps is the chance of voting against a
    unanimous neighborhood.  eps = 1/2 degenerates to a fair coin.
    """

    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 0.5:
            raise ValueError(f"epsilon must lie in [0, 1/2], got {self.epsilon}")

    def probability_of_one(self, rho):
        return (1.0 - 2.0 * self.epsilon) * np.asarray(rho, dtype=float) + self.epsilon


@dataclass(frozen=True)
class ForcingPlan:
    """Agents whose vote is pinned to a fixed bit for the whole run."""

    forced: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen = {}
        for node, bit in self.forced:
            node, bit = int(node), int(bit)
            if bit not in (0, 1):
                raise ValueError(f"forced value for agent {node} must be 0 or 1")
            if node in seen and seen[node] != bit:
                raise ValueError(f"agent {node} forced to both 0 and 1")
            seen[node] = bit
        object.__setattr__(
            self, "forced", tuple(sorted((n, b) for n, b in seen.items()))
        )

    @classmethod
    def from_dict(cls, mapping: dict[int, int]) -> "ForcingPlan":
        return cls(tuple(mapping.items()))

    @classmethod
    def none(cls) -> "ForcingPlan":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.forced

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.array([n for n, _ in self.forced], dtype=np.int64)

    @cached_property
    def bits(self) -> np.ndarray:
        return np.array([b for _, b in self.forced], dtype=np.int64)

    def validate_for(self, graph: Graph) -> None:
        if self.forced and (self.nodes.min() < 0 or self.nodes.max() >= graph.node_count):
            raise ValueError("forcing plan names an agent outside the graph")

    def clamp(self, states: np.ndarray) -> None:
        """Overwrite forced columns in-place; states is (n,) or (runs, n)."""
        if self.is_empty:
            return
        if states.ndim == 1:
            states[self.nodes] = self.bits.astype(states.dtype)
        else:
            states[:, self.nodes] = self.bits.astype(states.dtype)


class StateTrajectory:
    """Bit states over time for one realization, bit-packed per time slice."""

    def __init__(self, node_count: int, packed: np.ndarray):
        self.node_count = int(node_count)
        self.packed = packed

    @classmethod
    def from_dense(cls, states: np.ndarray) -> "StateTrajectory":
        states = np.asarray(states)
        if not np.isin(states, (0, 1)).all():
            raise ValueError("trajectory entries must be 0 or 1")
        packed = np.packbits(states.astype(bool), axis=1)
        return cls(states.shape[1], packed)

    @property
    def horizon(self) -> int:
        """Number of steps T; the trajectory holds T+1 states."""
        return self.packed.shape[0] - 1

    def state(self, t: int) -> np.ndarray:
        if not 0 <= t <= self.horizon:
            raise IndexError(f"time {t} outside [0, {self.horizon}]")
        return np.unpackbits(self.packed[t], count=self.node_count).astype(np.uint8)

    def dense(self) -> np.ndarray:
        return np.unpackbits(self.packed, axis=1, count=self.node_count).astype(np.uint8)

    def density(self, t: int, exclude: tuple[int, ...] = ()) -> float:
        """Fraction of ones at time t; pass the forced agents in ``exclude``
        to get the free-agent density."""
        s = self.state(t)
        if exclude:
            mask = np.ones(self.node_count, dtype=bool)
            mask[list(exclude)] = False
            s = s[mask]
        if s.size == 0:
            raise ValueError("density undefined: every agent excluded")
        return float(s.mean())


def density(trajectory: StateTrajectory, t: int, exclude: tuple[int, ...] = ()) -> float:
    return trajectory.density(t, exclude)


def step(
    graph: Graph,
    state: np.ndarray,
    noise: NoiseResponse,
    forcing: ForcingPlan,
    rng: np.random.Generator,
) -> np.ndarray:
    """One synchronous update.

    Draws one uniform per agent in node-index order (forced agents consume
    a draw too, so free agents see the same stream with or without forcing)
    and realizes bit 1 where u < f(rho).
    """
    state = np.asarray(state)
    if state.shape != (graph.node_count,):
        raise ValueError(
            f"state has shape {state.shape}, expected ({graph.node_count},)"
        )
    forcing.validate_for(graph)
    rho = graph.mean_operator @ state.astype(np.float64)
    probs = noise.probability_of_one(rho)
    nxt = (rng.random(graph.node_count) < probs).astype(np.uint8)
    forcing.clamp(nxt)
    return nxt


def simulate(
    graph: Graph,
    initial: np.ndarray | None,
    noise: NoiseResponse,
    forcing: ForcingPlan,
    horizon: int,
    rng: np.random.Generator | int,
) -> StateTrajectory:
    """Run one realization for ``horizon`` steps.

    ``initial=None`` draws each agent i.i.d. Bernoulli(1/2) (consuming one
    uniform per agent before any step draws); forced agents are overwritten
    already at t = 0.  Deterministic for a fixed seed.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    forcing.validate_for(graph)
    n = graph.node_count
    if initial is None:
        state = (rng.random(n) < 0.5).astype(np.uint8)
    else:
        state = np.asarray(initial).astype(np.uint8)
        if state.shape != (n,):
            raise ValueError(f"initial state has shape {state.shape}, expected ({n},)")
        if not np.isin(state, (0, 1)).all():
            raise ValueError("initial state entries must be 0 or 1")
    forcing.clamp(state)
    frames = np.empty((horizon + 1, n), dtype=np.uint8)
    frames[0] = state
    for t in range(horizon):
        state = step(graph, state, noise, forcing, rng)
        frames[t + 1] = state
    return StateTrajectory.from_dense(frames)
