"""Control-theoretic analytics for the linear voter chain.

Centering the one-probabilities at 1/2 turns the affine line recursion into
the exactly homogeneous state-space system

    p~(t+1) = A p~(t) + b u~(t),      y~(t) = c^T p~(t),

with A the lower-bidiagonal matrix of the line analytics, b = (1/2-eps) e_1
(the forced agent enters through u~ = p_0 - 1/2) and c = e_n (the last
agent is observed).  The module provides the forced solution, the
observability matrix, truncated infinite Gramians with certified tails,
closed-form observation-energy bounds, and minimum-energy reachability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_discrete_lyapunov
from scipy.special import gammaln

from .errors import ConvergenceError, UnreachableStateError
from .meanfield import MeanFieldSystem


@dataclass(frozen=True)
class StateSpaceSystem:
    """Centered (A, b, c) triple for n free agents at noise level epsilon."""

    n: int
    epsilon: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("state dimension must be >= 1")
        # eps = 1/2 gives A = 0: still analyzable (unobservable for n >= 2)
        if not 0.0 <= self.epsilon <= 0.5:
            raise ValueError(f"epsilon must lie in [0, 1/2], got {self.epsilon}")

    @property
    def coefficient(self) -> float:
        return 0.5 - self.epsilon

    @cached_property
    def a_matrix(self) -> np.ndarray:
        return MeanFieldSystem(n=self.n, epsilon=self.epsilon).matrix()

    @cached_property
    def b_vector(self) -> np.ndarray:
        b = np.zeros(self.n)
        b[0] = self.coefficient
        return b

    @cached_property
    def c_vector(self) -> np.ndarray:
        c = np.zeros(self.n)
        c[-1] = 1.0
        return c

    def apply_a(self, x: np.ndarray) -> np.ndarray:
        """A x in O(n) using the bidiagonal structure."""
        out = x.copy()
        out[1:] += x[:-1]
        return self.coefficient * out

    def apply_a_transpose(self, x: np.ndarray) -> np.ndarray:
        out = x.copy()
        out[:-1] += x[1:]
        return self.coefficient * out


@dataclass
class GramianResult:
    """Truncated infinite Gramian with its truncation certificate."""

    matrix: np.ndarray
    truncation_k: int
    tail_bound: float


@dataclass(frozen=True)
class EnergyBounds:
    """Closed-form sandwich for the observation energy of the unit initial
    deviation on the first agent.  Raw values underflow for large n, so the
    log values are carried alongside."""

    lower: float
    upper: float
    log_lower: float
    log_upper: float


def build_system(n: int, epsilon: float) -> StateSpaceSystem:
    return StateSpaceSystem(n=n, epsilon=epsilon)


def solution(
    system: StateSpaceSystem,
    p0_tilde: np.ndarray,
    u_signal,
    t: int,
) -> np.ndarray:
    """Forced response at time t by direct summation:
    A^t p0 + sum_j A^(t-1-j) b u(j).  ``u_signal`` is a callable of the step
    index, a sequence, or a constant."""
    if t < 0:
        raise ValueError("t must be >= 0")
    x = np.asarray(p0_tilde, dtype=float).copy()
    if x.shape != (system.n,):
        raise ValueError(f"state has shape {x.shape}, expected ({system.n},)")
    if callable(u_signal):
        u = [float(u_signal(k)) for k in range(t)]
    elif np.isscalar(u_signal):
        u = [float(u_signal)] * t
    else:
        u = [float(v) for v in u_signal[:t]]
        if len(u) < t:
            raise ValueError(f"control signal shorter than horizon {t}")
    for k in range(t):
        x = system.apply_a(x)
        x += system.b_vector * u[k]
    return x


def observability_matrix(system: StateSpaceSystem) -> np.ndarray:
    """Rows c^T A^k for k = 0..n-1; full rank iff the system is observable."""
    rows = np.empty((system.n, system.n))
    g = system.c_vector.copy()
    for k in range(system.n):
        rows[k] = g
        g = system.apply_a_transpose(g)
    return rows


def _truncated_gramian(
    system: StateSpaceSystem,
    seed_vector: np.ndarray,
    advance,
    tol: float,
    max_terms: int,
) -> GramianResult:
    """Sum of g_k g_k^T with g_0 = seed and g_{k+1} = M g_k, stopped when the
    certified geometric tail (via the spectral norm of A) drops below tol."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    sigma = float(np.linalg.norm(system.a_matrix, 2))
    if sigma >= 1.0:
        raise ConvergenceError(f"spectral norm {sigma} >= 1; series does not converge")
    ratio = sigma * sigma
    w = np.zeros((system.n, system.n))
    g = seed_vector.copy()
    for k in range(max_terms):
        w += np.outer(g, g)
        g = advance(g)
        tail = float(g @ g) / (1.0 - ratio)
        if tail < tol and k + 1 >= system.n:
            w = 0.5 * (w + w.T)
            return GramianResult(matrix=w, truncation_k=k + 1, tail_bound=tail)
    raise ConvergenceError(f"Gramian tail above {tol} after {max_terms} terms")


def observability_gramian(
    system: StateSpaceSystem, tol: float = 1e-12, max_terms: int = 1_000_000
) -> GramianResult:
    """W_o = sum_k (A^k)^T c c^T A^k, truncated with a certified tail bound.

    The quadratic form p~^T W_o p~ is the total output energy of the free
    response started at p~.
    """
    return _truncated_gramian(
        system, system.c_vector, system.apply_a_transpose, tol, max_terms
    )


def reachability_gramian(
    system: StateSpaceSystem, tol: float = 1e-12, max_terms: int = 1_000_000
) -> GramianResult:
    """W_c = sum_k A^k b b^T (A^T)^k, truncated with a certified tail bound."""
    return _truncated_gramian(system, system.b_vector, system.apply_a, tol, max_terms)


def lyapunov_gramian(system: StateSpaceSystem, which: str = "observability") -> np.ndarray:
    """Cross-check route: the same Gramians as solutions of the discrete
    Lyapunov equations A^T X A - X + c c^T = 0 (resp. A X A^T - X + b b^T)."""
    a = system.a_matrix
    if which == "observability":
        return solve_discrete_lyapunov(a.T, np.outer(system.c_vector, system.c_vector))
    if which == "reachability":
        return solve_discrete_lyapunov(a, np.outer(system.b_vector, system.b_vector))
    raise ValueError(f"unknown Gramian kind {which!r}")


def observation_energy(system: StateSpaceSystem, p0_tilde: np.ndarray, tol: float = 1e-12) -> float:
    """p~^T W_o p~ for a given initial deviation."""
    w = observability_gramian(system, tol=tol).matrix
    p = np.asarray(p0_tilde, dtype=float)
    return float(p @ w @ p)


def observation_energy_bounds(n: int, epsilon: float) -> EnergyBounds:
    """Closed-form lower/upper bounds for the observation energy of the unit
    deviation on agent 1 observed at agent n:

        lower = (1/((n-1)!)^2) (1/2-eps)^(2n) * 4(3-2eps)/(1+2eps)^3
        upper = 4 (1-2eps)^(2n) / (1+2eps)^(2n+2)

    Both are evaluated in log space; the raw floats underflow to 0.0 for
    large n while the log values stay finite.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    log_lower = (
        math.log(4.0 * (3.0 - 2.0 * epsilon))
        - 3.0 * math.log(1.0 + 2.0 * epsilon)
        + 2.0 * n * math.log(0.5 - epsilon)
        - 2.0 * gammaln(n)
    )
    log_upper = (
        math.log(4.0)
        + 2.0 * n * math.log(1.0 - 2.0 * epsilon)
        - (2.0 * n + 2.0) * math.log(1.0 + 2.0 * epsilon)
    )
    def safe_exp(v: float) -> float:
        try:
            return math.exp(v)
        except OverflowError:
            return math.inf
    return EnergyBounds(
        lower=safe_exp(log_lower),
        upper=safe_exp(log_upper),
        log_lower=float(log_lower),
        log_upper=float(log_upper),
    )


def min_energy(gramian: GramianResult, target: np.ndarray, tol: float = 1e-9) -> float:
    """Minimum input energy to reach ``target``: target^T (W_c)^-1 target,
    via a linear solve.  A target outside the (numerical) range of W_c
    raises UnreachableStateError."""
    w = gramian.matrix
    t = np.asarray(target, dtype=float)
    if t.shape != (w.shape[0],):
        raise ValueError(f"target has shape {t.shape}, expected ({w.shape[0]},)")
    x, residuals, rank, _ = np.linalg.lstsq(w, t, rcond=None)
    residual = float(np.linalg.norm(w @ x - t))
    scale = float(np.linalg.norm(t))
    if scale > 0 and residual > tol * max(scale, 1.0):
        raise UnreachableStateError(
            f"target lies outside the reachable subspace (residual {residual:.3e})"
        )
    return float(t @ x)
