import numpy as np
import pytest

from voterctl.dynamics import ForcingPlan, NoiseResponse
from voterctl.topology import make_line


@pytest.fixture(scope="session")
def chain3():
    """3-node controlled chain: node 0 pinned to 1, free agents 1 and 2."""
    return make_line(2), NoiseResponse(0.1), ForcingPlan(((0, 1),))


def brute_force_pair_counts(x, y):
    """Reference counting loop for the four joint outcomes."""
    n00 = n01 = n10 = n11 = 0
    for a, b in zip(x, y):
        if a == 0 and b == 0:
            n00 += 1
        elif a == 0 and b == 1:
            n01 += 1
        elif a == 1 and b == 0:
            n10 += 1
        else:
            n11 += 1
    return n00, n01, n10, n11


def reference_step(graph, state, noise, forcing, draws, order):
    """Voter step evaluated one agent at a time in an arbitrary order,
    consuming the uniform draw assigned to each agent's index."""
    nxt = np.empty(graph.node_count, dtype=np.uint8)
    for i in order:
        nbrs = graph.in_neighbors[i]
        rho = sum(state[j] for j in nbrs) / len(nbrs)
        nxt[i] = 1 if draws[i] < noise.probability_of_one(rho) else 0
    for node, bit in forcing.forced:
        nxt[node] = bit
    return nxt
