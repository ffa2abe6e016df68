"""Interaction graphs for the voter dynamics.

Two topologies are provided: the directed line chain (agent i looks at its
left neighbor and, optionally, itself) and undirected scale-free networks
grown by preferential attachment.  Graphs are immutable after construction
and can be shared freely across concurrent ensemble workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class Graph:
    """Directed interaction structure.

    ``in_neighbors[i]`` holds the agents agent i looks at when updating;
    a self-loop (i in its own list) is allowed and counted once.  Every
    agent needs at least one in-neighbor, otherwise its neighborhood
    density is undefined.
    """

    node_count: int
    in_neighbors: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("graph needs at least one node")
        if len(self.in_neighbors) != self.node_count:
            raise ValueError(
                f"in_neighbors has {len(self.in_neighbors)} entries "
                f"for {self.node_count} nodes"
            )
        normalized = []
        for i, nbrs in enumerate(self.in_neighbors):
            uniq = tuple(sorted(set(int(j) for j in nbrs)))
            if not uniq:
                raise ValueError(f"agent {i} has no in-neighbors")
            if uniq[0] < 0 or uniq[-1] >= self.node_count:
                raise ValueError(f"agent {i} has an out-of-range neighbor")
            normalized.append(uniq)
        object.__setattr__(self, "in_neighbors", tuple(normalized))
        if self.labels is not None:
            if len(self.labels) != self.node_count:
                raise ValueError("labels length must match node_count")
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    def in_degree(self, i: int) -> int:
        return len(self.in_neighbors[i])

    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.in_neighbors], dtype=np.int64)

    @cached_property
    def mean_operator(self) -> sp.csr_matrix:
        """Row-stochastic sparse operator; row i averages the states in N_i."""
        rows, cols, vals = [], [], []
        for i, nbrs in enumerate(self.in_neighbors):
            w = 1.0 / len(nbrs)
            for j in nbrs:
                rows.append(i)
                cols.append(j)
                vals.append(w)
        return sp.csr_matrix(
            (vals, (rows, cols)), shape=(self.node_count, self.node_count)
        )


def make_line(n: int, self_loop: bool = True) -> Graph:
    """Directed chain of n+1 agents indexed 0..n.

    Node 0 looks only at itself (it is the one experiments force); node
    i >= 1 looks at {i-1, i}, or just {i-1} when ``self_loop`` is False.
    Information can only travel left to right.
    """
    if n < 1:
        raise ValueError("line size n must be >= 1")
    neighbors: list[tuple[int, ...]] = [(0,)]
    for i in range(1, n + 1):
        neighbors.append((i - 1, i) if self_loop else (i - 1,))
    return Graph(node_count=n + 1, in_neighbors=tuple(neighbors))


def is_line_chain(graph: Graph) -> bool:
    """True when the graph has the controlled-chain shape made by make_line."""
    if graph.in_neighbors[0] != (0,):
        return False
    return all(
        graph.in_neighbors[i] in ((i - 1, i), (i - 1,))
        for i in range(1, graph.node_count)
    )


def make_scale_free(n: int, attachment_count: int = 1, seed: int = 0) -> Graph:
    """Random scale-free graph grown by preferential attachment.

    Linearized-chord-diagram-style growth restricted to simple edges: the
    seed is a star on ``attachment_count + 1`` nodes and every later node
    attaches to ``attachment_count`` distinct existing nodes drawn with
    probability proportional to degree.  The result is undirected (encoded
    as symmetric neighbor sets), connected, and deterministic for a fixed
    seed.
    """
    if n < 1:
        raise ValueError("node count n must be >= 1")
    if not 1 <= attachment_count < n:
        raise ValueError(
            f"attachment_count must satisfy 1 <= m < n, got m={attachment_count} n={n}"
        )
    rng = np.random.default_rng(seed)
    m = attachment_count
    adjacency: list[set[int]] = [set() for _ in range(n)]

    def add_edge(a: int, b: int) -> None:
        adjacency[a].add(b)
        adjacency[b].add(a)

    # one multiset entry per edge endpoint; sampling it is degree-proportional
    repeated: list[int] = []
    for leaf in range(1, m + 1):
        add_edge(0, leaf)
        repeated.extend((0, leaf))
    for source in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(repeated[int(rng.integers(len(repeated)))])
        for t in sorted(targets):
            add_edge(source, t)
            repeated.extend((source, t))
    return Graph(
        node_count=n,
        in_neighbors=tuple(tuple(sorted(nbrs)) for nbrs in adjacency),
    )


def save_graph(graph: Graph, path: str | Path) -> None:
    """Write the plain-text edge list: header '# nodes=<n>', then one
    'i j' line per directed edge meaning i is an in-neighbor of j."""
    lines = [f"# nodes={graph.node_count}"]
    if graph.labels is not None:
        for i, lab in enumerate(graph.labels):
            lines.append(f"# label {i} {lab}")
    for j, nbrs in enumerate(graph.in_neighbors):
        for i in nbrs:
            lines.append(f"{i} {j}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_graph(path: str | Path) -> Graph:
    """Read a graph written by save_graph."""
    node_count = None
    labels: dict[int, str] = {}
    edges: list[tuple[int, int]] = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("nodes="):
                node_count = int(body.split("=", 1)[1])
            elif body.startswith("label "):
                _, idx, text = body.split(" ", 2)
                labels[int(idx)] = text
            continue
        a, b = line.split()
        edges.append((int(a), int(b)))
    if node_count is None:
        raise ValueError(f"{path}: missing '# nodes=<n>' header")
    neighbors: list[list[int]] = [[] for _ in range(node_count)]
    for i, j in edges:
        neighbors[j].append(i)
    label_tuple = None
    if labels:
        label_tuple = tuple(labels.get(i, "") for i in range(node_count))
    return Graph(
        node_count=node_count,
        in_neighbors=tuple(tuple(nbrs) for nbrs in neighbors),
        labels=label_tuple,
    )
