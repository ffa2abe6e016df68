"""Binary-symmetric-channel view of influence along the line.

The relay of m agents between i and i+m composes to a binary symmetric
channel whose flip probability depends only on the length m and the noise:
eps_m = (1 - (1-2*eps)^m) / 2.  Its capacity 1 - H2(eps_m) upper-bounds the
measurable delayed mutual information between the endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ChannelSpec:
    """Influence channel of length m at noise level epsilon."""

    epsilon: float
    m: int

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 0.5:
            raise ValueError(f"epsilon must lie in [0, 1/2], got {self.epsilon}")
        if self.m < 1:
            raise ValueError("channel length m must be >= 1")


def binary_entropy(p: float) -> float:
    """H2(p) in bits with the 0*log 0 = 0 endpoint convention."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def error_probability(spec: ChannelSpec) -> float:
    """Composite flip probability (1 - (1-2*eps)^m) / 2 in [0, 1/2]."""
    return 0.5 * (1.0 - (1.0 - 2.0 * spec.epsilon) ** spec.m)


def capacity(spec: ChannelSpec) -> float:
    """Channel capacity C_m = 1 - H2(eps_m) in bits.  The symmetric channel
    attains the supremum at the uniform input, so no optimization is run.
    Values inside double-precision cancellation noise collapse to 0."""
    value = 1.0 - binary_entropy(error_probability(spec))
    return value if value > 1e-15 else 0.0


def capacity_profile(epsilon: float, m_max: int) -> list[tuple[int, float, float]]:
    """(m, eps_m, C_m) for m = 1..m_max."""
    out = []
    for m in range(1, m_max + 1):
        spec = ChannelSpec(epsilon=epsilon, m=m)
        out.append((m, error_probability(spec), capacity(spec)))
    return out
