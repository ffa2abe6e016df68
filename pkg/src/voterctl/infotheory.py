"""Plug-in estimators for delayed mutual and multi-information.

All estimates are maximum-likelihood (raw counting, 0*log 0 = 0, no bias
correction) in base-2 logarithms.  The pair estimator counts the four joint
outcomes of (X_i(t), X_j(t+tau)) across runs; the multi-information
estimator pairs X_i(t) with the integer count of ones among all other
agents at t+tau, kept unbinned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import StateSamples


@dataclass(frozen=True)
class PairCounts:
    """Joint occurrence counts for one (i, j, t, tau) cell."""

    n00: int
    n01: int
    n10: int
    n11: int

    @property
    def total(self) -> int:
        return self.n00 + self.n01 + self.n10 + self.n11

    def table(self) -> np.ndarray:
        return np.array([[self.n00, self.n01], [self.n10, self.n11]], dtype=np.int64)


@dataclass(frozen=True)
class AggregateCounts:
    """Counts of (X_i(t) = x, number of ones among agents k != i at t+tau).

    ``zeros[k]`` / ``ones[k]`` count the runs with k ones co-occurring with
    X_i = 0 / 1; agent i is excluded from the count in both rows.
    """

    zeros: np.ndarray
    ones: np.ndarray

    @property
    def total(self) -> int:
        return int(self.zeros.sum() + self.ones.sum())

    def table(self) -> np.ndarray:
        return np.vstack([self.zeros, self.ones]).astype(np.int64)


@dataclass(frozen=True)
class DelayedInfoResult:
    """One information estimate in bits; ``degenerate`` marks a constant
    marginal (the estimate is then exactly 0 by convention, not an error)."""

    value: float
    i: int
    j: int | None
    t: int
    tau: int
    n_runs: int
    degenerate: bool = False


def mutual_information_bits(table: np.ndarray) -> tuple[float, bool]:
    """Plug-in mutual information of a joint count table, in bits.

    Returns (value, degenerate); the value is clamped at 0 against floating
    round-off (the plug-in estimate is nonnegative in exact arithmetic).
    """
    counts = np.asarray(table, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("empty contingency table")
    p = counts / total
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    degenerate = bool((px >= 1.0).any() or (py >= 1.0).any())
    nz = p > 0
    ratio = p[nz] / np.outer(px, py)[nz]
    value = float(np.sum(p[nz] * np.log2(ratio)))
    if value < -1e-9:
        raise AssertionError(f"plug-in mutual information came out {value}")
    return max(value, 0.0), degenerate


def pair_counts(samples: StateSamples, i: int, j: int, t: int, tau: int) -> PairCounts:
    x = samples.at(t)[:, i].astype(np.int64)
    y = samples.at(t + tau)[:, j].astype(np.int64)
    n11 = int(x @ y)
    n10 = int(x.sum()) - n11
    n01 = int(y.sum()) - n11
    n00 = x.size - n11 - n10 - n01
    return PairCounts(n00=n00, n01=n01, n10=n10, n11=n11)


def aggregate_counts(samples: StateSamples, i: int, t: int, tau: int) -> AggregateCounts:
    x = samples.at(t)[:, i].astype(np.int64)
    later = samples.at(t + tau)
    others = later.sum(axis=1, dtype=np.int64) - later[:, i]
    n = samples.node_count
    joint = np.bincount(x * n + others, minlength=2 * n)
    return AggregateCounts(zeros=joint[:n].copy(), ones=joint[n:].copy())


def delayed_mutual_information(
    samples: StateSamples, i: int, j: int, t: int, tau: int
) -> DelayedInfoResult:
    """Mutual information between X_i(t) and X_j(t+tau) in bits."""
    counts = pair_counts(samples, i, j, t, tau)
    value, degenerate = mutual_information_bits(counts.table())
    return DelayedInfoResult(
        value=value, i=i, j=j, t=t, tau=tau, n_runs=counts.total, degenerate=degenerate
    )


def delayed_multi_information(
    samples: StateSamples, i: int, t: int, tau: int
) -> DelayedInfoResult:
    """Mutual information between X_i(t) and the count of ones among all
    other agents at t+tau, in bits."""
    counts = aggregate_counts(samples, i, t, tau)
    value, degenerate = mutual_information_bits(counts.table())
    return DelayedInfoResult(
        value=value, i=i, j=None, t=t, tau=tau, n_runs=counts.total, degenerate=degenerate
    )


def mutual_information_profile(
    samples: StateSamples, i: int, t: int, tau: int
) -> list[tuple[int, float]]:
    """w_{i,j}(t, tau) for every j != i at a fixed delay.

    On the controlled line this exposes the characteristic shape: ~0 for
    j < i, a rise to a peak between i + tau/2 and i + tau (the signal hops
    right about every other step), then decay.
    """
    x = samples.at(t)[:, i].astype(np.int64)
    later = samples.at(t + tau).astype(np.int64)
    n_runs = x.size
    ones_x = int(x.sum())
    n11 = x @ later
    col_ones = later.sum(axis=0)
    out = []
    for j in range(samples.node_count):
        if j == i:
            continue
        c11 = int(n11[j])
        c10 = ones_x - c11
        c01 = int(col_ones[j]) - c11
        c00 = n_runs - c11 - c10 - c01
        value, _ = mutual_information_bits(
            np.array([[c00, c01], [c10, c11]], dtype=np.int64)
        )
        out.append((j, value))
    return out


def distance_delay_profile(
    samples: StateSamples, i: int, t: int, d_max: int
) -> list[tuple[int, float]]:
    """w_{i,i+d}(t, d) for d = 1..d_max: each downstream agent measured at
    the delay equal to its distance, the regime where the decay is a clean
    exponential.  Requires recorded slices at t, t+1, ..., t+d_max."""
    out = []
    for d in range(1, d_max + 1):
        j = i + d
        if j >= samples.node_count:
            break
        res = delayed_mutual_information(samples, i, j, t, d)
        out.append((j, res.value))
    return out
