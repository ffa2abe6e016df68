"""Closed-form analytics for the controlled line chain.

With agent 0 pinned to 1 and every free agent i looking at {i-1, i}, the
per-agent one-probabilities follow the affine recursion

    p_i(t+1) = (1/2 - eps) * (p_i(t) + p_{i-1}(t)) + eps,     p_0 == 1,

which is exact (not just a mean-field approximation) because the response
f is affine in the neighborhood density.  In matrix form P(t+1) = A P(t) + B
with A lower-bidiagonal.  This module provides the iteration, explicit
powers of A, the stationary profile, the control length, and the asymptotic
mean density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass(frozen=True)
class MeanFieldSystem:
    """The affine iteration for n free agents at noise level epsilon."""

    n: int
    epsilon: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("system needs at least one free agent")
        if not 0.0 <= self.epsilon <= 0.5:
            raise ValueError(f"epsilon must lie in [0, 1/2], got {self.epsilon}")

    @property
    def coefficient(self) -> float:
        """Common diagonal/subdiagonal entry 1/2 - eps; also the unique
        eigenvalue of A (multiplicity n)."""
        return 0.5 - self.epsilon

    def matrix(self) -> np.ndarray:
        a = self.coefficient
        m = np.zeros((self.n, self.n))
        np.fill_diagonal(m, a)
        np.fill_diagonal(m[1:], a)
        return m

    def affine_term(self) -> np.ndarray:
        b = np.full(self.n, self.epsilon)
        b[0] = 0.5
        return b


@dataclass(frozen=True)
class StationaryDistribution:
    """Fixed point of the iteration; entries decrease from pi_1 toward 1/2."""

    pi: np.ndarray
    limit_case: bool = False  # True when an endpoint eps was handled as a limit


@dataclass(frozen=True)
class MeanDensityResult:
    value: float
    limit_case: bool = False


def _validate_probability_vector(p: np.ndarray, n: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise ValueError(f"probability vector has shape {p.shape}, expected ({n},)")
    if (p < 0).any() or (p > 1).any():
        raise ValueError("probability vector entries must lie in [0, 1]")
    return p


def iterate(system: MeanFieldSystem, p0: np.ndarray, t: int) -> np.ndarray:
    """P(t) from P(0) by running the recursion t times (O(n*t))."""
    if t < 0:
        raise ValueError("t must be >= 0")
    p = _validate_probability_vector(p0, system.n)
    a = system.coefficient
    eps = system.epsilon
    for _ in range(t):
        shifted = np.empty_like(p)
        shifted[0] = 1.0  # pinned agent 0
        shifted[1:] = p[:-1]
        p = a * (p + shifted) + eps
    return p


def iterate_trajectory(system: MeanFieldSystem, p0: np.ndarray, t: int) -> np.ndarray:
    """All iterates P(0..t) stacked as a (t+1, n) array."""
    out = np.empty((t + 1, system.n))
    out[0] = _validate_probability_vector(p0, system.n)
    p = out[0]
    a, eps = system.coefficient, system.epsilon
    for k in range(t):
        shifted = np.empty_like(p)
        shifted[0] = 1.0
        shifted[1:] = p[:-1]
        p = a * (p + shifted) + eps
        out[k + 1] = p
    return out


def matrix_power(system: MeanFieldSystem, p: int) -> np.ndarray:
    """A^p in closed form: banded lower-triangular with entry
    (1/2-eps)^p * C(p, d) at sub-diagonal offset d <= min(p, n-1).

    Terms are assembled in log space so that huge binomials multiplied by
    tiny (1/2-eps)^p stay finite in every regime.
    """
    if p < 0:
        raise ValueError("power must be >= 0")
    n = system.n
    if p == 0:
        return np.eye(n)
    a = system.coefficient
    out = np.zeros((n, n))
    if a == 0.0:
        return out
    offsets = np.arange(min(p, n - 1) + 1)
    log_binom = gammaln(p + 1) - gammaln(offsets + 1) - gammaln(p - offsets + 1)
    vals = np.exp(log_binom + p * math.log(a))
    for d, v in zip(offsets, vals):
        idx = np.arange(n - d)
        out[idx + d, idx] = v
    return out


def stationary(system: MeanFieldSystem) -> StationaryDistribution:
    """Stationary one-probabilities pi_i = 1/2 * (1 + r^i) with
    r = (1-2eps)/(1+2eps); equivalently pi_1 = 1/(1+2eps) and a geometric
    approach to 1/2.  eps = 0 returns the all-ones limit."""
    eps = system.epsilon
    i = np.arange(1, system.n + 1)
    if eps == 0.0:
        return StationaryDistribution(pi=np.ones(system.n), limit_case=True)
    r = (1.0 - 2.0 * eps) / (1.0 + 2.0 * eps)
    return StationaryDistribution(pi=0.5 * (1.0 + r**i))


def control_length(epsilon: float) -> float:
    """Characteristic distance 1/ln((1+2eps)/(1-2eps)) beyond which a forced
    agent's influence decays; +inf at eps = 0, 0 at eps = 1/2."""
    if not 0.0 <= epsilon <= 0.5:
        raise ValueError(f"epsilon must lie in [0, 1/2], got {epsilon}")
    if epsilon == 0.0:
        return math.inf
    if epsilon == 0.5:
        return 0.0
    return 1.0 / math.log((1.0 + 2.0 * epsilon) / (1.0 - 2.0 * epsilon))


def mean_density(system: MeanFieldSystem) -> MeanDensityResult:
    """Asymptotic mean one-density over the n free agents,

        S = 1/2 + (1/(2n)) * ((1-2eps)/(4eps)) * (1 - r^n),

    with r = (1-2eps)/(1+2eps).  Equals the average of the stationary
    profile; eps = 0 returns the full-control limit S = 1 with a flag."""
    eps = system.epsilon
    if eps == 0.0:
        return MeanDensityResult(value=1.0, limit_case=True)
    r = (1.0 - 2.0 * eps) / (1.0 + 2.0 * eps)
    s = 0.5 + (1.0 / (2.0 * system.n)) * ((1.0 - 2.0 * eps) / (4.0 * eps)) * (
        1.0 - r**system.n
    )
    return MeanDensityResult(value=float(s))


def steady_state_time(
    system: MeanFieldSystem,
    p0: np.ndarray | None = None,
    threshold: float = 1e-4,
    max_steps: int = 10**7,
) -> int:
    """Smallest t with every component of A^t P(0) below ``threshold``.

    This is the burn-in rule used before stationary-state measurements;
    the deviation from the fixed point is A^t (P(0) - Pi), so driving
    A^t P(0) under the threshold bounds it to the same order.
    """
    if p0 is None:
        p0 = np.full(system.n, 0.5)
    q = _validate_probability_vector(p0, system.n).copy()
    a = system.coefficient
    for t in range(max_steps + 1):
        if np.abs(q).max() < threshold:
            return t
        shifted = np.empty_like(q)
        shifted[0] = 0.0  # homogeneous part: the pinned agent feeds B, not A
        shifted[1:] = q[:-1]
        q = a * (q + shifted)
    raise RuntimeError(f"no steady state within {max_steps} steps")


def critical_noise(
    n: int, threshold: float = 0.01, tol: float = 1e-10
) -> float:
    """Empirical critical noise: smallest eps at which the asymptotic mean
    density exceeds 1/2 by less than ``threshold``.  S - 1/2 is strictly
    decreasing in eps, so a bisection on the closed form suffices.  This is
    a pragmatic size-dependent indicator, not a sharp transition point."""
    lo, hi = 1e-12, 0.5

    def excess(eps: float) -> float:
        return mean_density(MeanFieldSystem(n=n, epsilon=eps)).value - 0.5

    if excess(lo) < threshold:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) < threshold:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
