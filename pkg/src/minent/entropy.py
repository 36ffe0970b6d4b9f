"""Exact entropy and power-sum math on explicit finite distributions.

Everything here operates on fully specified probability vectors: Shannon,
Renyi and min-entropy, power sums, the near-uniform and inverted
near-uniform families, and the sharp bounds that translate a power sum of
order ``alpha`` into bounds on the most likely symbol probability.
Estimation from observed sequences lives in :mod:`minent.tuples` and
:mod:`minent.estimators`.

All entropies are returned in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Distribution",
    "shannon_entropy",
    "renyi_entropy",
    "min_entropy",
    "power_sum",
    "near_uniform",
    "inverted_near_uniform",
    "theta_upper_bound",
    "theta_lower_bound",
    "estimation_gap",
    "solve_theta_from_power_sum",
    "variance_ratio_prediction",
    "v_bar_prediction",
]

#: Tolerance on ``sum(probs) == 1`` at construction time.  Inputs violating
#: it are rejected rather than silently renormalized; use
#: :meth:`Distribution.normalized` when renormalization is intended.
PROB_SUM_TOL = 1e-12

_BISECT_MAX_ITER = 200


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector over the alphabet ``{0, ..., k-1}``.

    Parameters
    ----------
    probs:
        Non-negative reals summing to 1 within :data:`PROB_SUM_TOL`.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("probs must be a non-empty 1-D vector")
        if not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite")
        if np.any(p < 0.0):
            raise ValueError("probabilities must be non-negative")
        total = float(p.sum())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(
                f"probabilities sum to {total!r}, not 1; use "
                "Distribution.normalized() to renormalize explicitly"
            )
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def normalized(cls, weights) -> "Distribution":
        """Build a distribution from non-negative weights, renormalizing."""
        w = np.asarray(weights, dtype=np.float64)
        total = w.sum()
        if not np.isfinite(total) or total <= 0.0:
            raise ValueError("weights must have a positive finite sum")
        return cls(w / total)

    @property
    def k(self) -> int:
        """Alphabet size."""
        return int(self.probs.size)

    @property
    def max_prob(self) -> float:
        """The most likely symbol probability (theta)."""
        return float(self.probs.max())

    def __len__(self) -> int:
        return self.k


def _as_distribution(d) -> Distribution:
    return d if isinstance(d, Distribution) else Distribution(d)


def shannon_entropy(d) -> float:
    """Shannon entropy ``-sum p_i log2 p_i`` in bits, with 0*log(0) = 0."""
    p = _as_distribution(d).probs
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0


def renyi_entropy(d, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` in bits.

    ``alpha`` may be any positive real except 1 (use
    :func:`shannon_entropy` for the limit).  At ``alpha == 2`` this is the
    collision entropy.  For large ``alpha`` the sum is evaluated relative
    to the largest probability so that the result does not underflow.
    """
    if not (alpha > 0.0) or alpha == 1.0:
        raise ValueError("alpha must be positive and distinct from 1")
    dist = _as_distribution(d)
    p = dist.probs
    if alpha > 1.0:
        # sum p_i^a == theta^a * sum (p_i/theta)^a; the rescaled sum stays
        # in [1, k] so huge alpha cannot underflow the whole expression.
        theta = dist.max_prob
        scaled = float(np.sum((p / theta) ** alpha))
        log2_m = alpha * math.log2(theta) + math.log2(scaled)
    else:
        log2_m = math.log2(float(np.sum(p**alpha)))
    return log2_m / (1.0 - alpha) + 0.0


def min_entropy(d) -> float:
    """Min-entropy ``-log2 max_i p_i`` in bits."""
    h = -math.log2(_as_distribution(d).max_prob)
    return h + 0.0


def power_sum(d, alpha: float) -> float:
    """Power sum ``M_alpha = sum p_i^alpha``.

    ``M_2`` is the collision probability.  Integer ``alpha >= 2`` is what
    the estimators use; real ``alpha > 0`` is accepted for exploring the
    bounds.
    """
    if not (alpha > 0.0) or not math.isfinite(alpha):
        raise ValueError("alpha must be a positive finite real")
    p = _as_distribution(d).probs
    return float(np.sum(p**alpha))


def near_uniform(theta: float, k: int) -> Distribution:
    """The distribution with one mass ``theta`` and the rest split evenly.

    For a fixed power sum this family attains the largest possible maximum
    probability, which makes it the equality witness for
    :func:`theta_upper_bound`.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if not (1.0 / k - 1e-12 <= theta <= 1.0 + 1e-12):
        raise ValueError(f"theta={theta!r} outside [1/k, 1] for k={k}")
    theta = min(max(theta, 1.0 / k), 1.0)
    rest = (1.0 - theta) / (k - 1)
    probs = np.full(k, rest)
    probs[0] = theta
    return Distribution(probs)


def inverted_near_uniform(psi: float, k: int) -> Distribution:
    """``floor(1/psi)`` masses of ``psi``, one residual, zeros elsewhere.

    The maximum of the result equals ``psi``; for a fixed collision
    probability this family attains the smallest possible maximum, making
    it the equality witness for :func:`theta_lower_bound`.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not (1.0 / k - 1e-12 <= psi <= 1.0 + 1e-12):
        raise ValueError(f"psi={psi!r} outside [1/k, 1] for k={k}")
    psi = min(max(psi, 1.0 / k), 1.0)
    n = math.floor(1.0 / psi)
    residual = 1.0 - n * psi
    if residual < -1e-9:
        raise ValueError(f"psi={psi!r} produces a negative residual")
    residual = max(residual, 0.0)
    slots = n + (1 if residual > 0.0 else 0)
    if slots > k:
        raise ValueError(
            f"alphabet of size {k} cannot hold {n} masses of {psi!r} plus a residual"
        )
    probs = np.zeros(k)
    probs[:n] = psi
    if residual > 0.0:
        probs[n] = residual
    return Distribution(probs)


def theta_upper_bound(pc: float, k: int) -> float:
    """Sharp upper bound on the maximum probability given collision probability.

    Returns ``(sqrt((k-1)(pc*k - 1)) + 1) / k``, attained with equality by
    the near-uniform distribution whose collision probability is ``pc``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if not (1.0 / k - 1e-12 <= pc <= 1.0 + 1e-12):
        raise ValueError(f"pc={pc!r} outside [1/k, 1] for k={k}")
    radicand = max((k - 1) * (pc * k - 1.0), 0.0)
    return min((math.sqrt(radicand) + 1.0) / k, 1.0)


def theta_lower_bound(pc: float) -> float:
    """Sharp lower bound on the maximum probability given collision probability.

    With ``n = floor(1/pc)`` returns
    ``(sqrt(n * (pc*(n+1) - 1)) + n) / (n*(n+1))``; the inverted
    near-uniform distribution with this maximum has collision probability
    exactly ``pc``.  Unlike :func:`theta_upper_bound` the value does not
    depend on the alphabet size.
    """
    if not (0.0 < pc <= 1.0 + 1e-12):
        raise ValueError(f"pc={pc!r} outside (0, 1]")
    pc = min(pc, 1.0)
    n = math.floor(1.0 / pc)
    radicand = max(n * (pc * (n + 1) - 1.0), 0.0)
    return min((math.sqrt(radicand) + n) / (n * (n + 1)), 1.0)


def estimation_gap(pc: float, k: int) -> float:
    """Gap between the sharp upper and lower bounds on the maximum probability.

    Non-negative, and non-decreasing in ``k`` at fixed ``pc``; zero for
    binary alphabets, which is why the collision-to-min-entropy conversion
    is unbiased there.
    """
    return theta_upper_bound(pc, k) - theta_lower_bound(pc)


def _bound_curve_value(theta: float, alpha: int, k: int) -> float:
    """``theta^alpha + (1-theta)^alpha / (k-1)^(alpha-1)``.

    The second term is evaluated in log space so large ``k`` and ``alpha``
    cannot underflow prematurely.
    """
    if theta >= 1.0:
        return 1.0
    tail = math.exp(alpha * math.log1p(-theta) - (alpha - 1) * math.log(k - 1))
    return theta**alpha + tail


def solve_theta_from_power_sum(
    m_tilde: float, alpha: int, k: int, tol: float = 1e-12
) -> float:
    """Invert the sharp power-sum bound for the maximum probability.

    Solves ``theta^alpha + (1-theta)^alpha/(k-1)^(alpha-1) == m_tilde`` for
    ``theta`` in ``[1/k, 1]`` by bisection.  The left side is strictly
    increasing on that interval, so the root is unique.  The caller must
    handle ``m_tilde <= 1/k^(alpha-1)`` (the uniform floor) separately.
    """
    if not (isinstance(alpha, (int, np.integer)) and alpha >= 2):
        raise ValueError("alpha must be an integer >= 2")
    if k < 2:
        raise ValueError("k must be at least 2")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if not math.isfinite(m_tilde):
        raise ValueError(f"m_tilde={m_tilde!r} is not finite")
    if m_tilde > 1.0:
        raise ValueError(f"m_tilde={m_tilde!r} exceeds 1: not a power sum")
    floor = 1.0 / k ** (alpha - 1)
    if not m_tilde > floor:
        raise ValueError(
            f"m_tilde={m_tilde!r} at or below the uniform floor {floor!r}; "
            "the caller clamps this case to theta = 1/k"
        )
    lo, hi = 1.0 / k, 1.0
    for _ in range(_BISECT_MAX_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if _bound_curve_value(mid, alpha, k) < m_tilde:
            lo = mid
        else:
            hi = mid
    else:
        # The bracket halves every pass, so only non-finite inputs can
        # exhaust the iteration budget.
        raise ArithmeticError("bisection failed to converge; non-finite input?")
    return 0.5 * (lo + hi)


def variance_ratio_prediction(alpha: int) -> float:
    """Predicted ``Var(theta_hat[alpha+1]) / Var(theta_hat[alpha])``.

    Equals ``(alpha / (alpha+1))**4`` for uniform sources in the large-L
    limit: always below 1, approaching 1 as ``alpha`` grows, i.e. raising
    the order keeps reducing the variance but with diminishing returns.
    """
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    return (alpha / (alpha + 1.0)) ** 4


def v_bar_prediction(m_alpha: float, l: int, alpha: int) -> float:
    """Expected largest tuple length with an ``alpha``-fold repeat.

    Returns ``log base (1/m_alpha) of C(l, alpha)``: the tuple length at
    which the expected number of alpha-wise collisions drops to one.
    """
    if not (0.0 < m_alpha < 1.0):
        raise ValueError("m_alpha must lie strictly between 0 and 1")
    if l <= alpha:
        raise ValueError("l must exceed alpha")
    return math.log(math.comb(l, alpha)) / math.log(1.0 / m_alpha)
