"""Min-entropy estimators built on repeated-substring statistics.

Three estimators share the same per-``w`` machinery:

* :func:`lrs_nist` -- the LRS estimator of NIST SP 800-90B.  It returns a
  collision-entropy estimate, which upper-bounds the min-entropy, so it
  systematically overestimates for skewed sources.
* :func:`improved_lrs` -- converts the same collision-probability
  statistic into the sharp upper bound on the most likely symbol
  probability before taking the log, giving a conservative min-entropy
  estimate that is unbiased for binary alphabets.
* :func:`generalized_lrs` -- the order-``alpha`` generalization: counts
  ``alpha``-wise repeats instead of pairs and inverts the corresponding
  power-sum bound.  Higher orders trade tuple-range width for a smaller
  estimator variance on high-entropy sources.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .entropy import solve_theta_from_power_sum, theta_upper_bound
from .tuples import (
    NON_OVERLAPPING,
    OVERLAPPING,
    EstimationDomainError,
    SequenceIndex,
    SequenceTooShortError,
    SymbolSequence,
    _power_sum_from_summary,
)

__all__ = [
    "EstimatorConfig",
    "MinEntropyEstimate",
    "EstimationDomainError",
    "SequenceTooShortError",
    "EmptyTupleRangeError",
    "confidence_adjust",
    "lrs_nist",
    "improved_lrs",
    "generalized_lrs",
    "estimate_from_index",
]

#: Orders above this are rejected unless explicitly overridden: the
#: ``C_i >= alpha`` requirement starves the counts well before then at
#: practical sequence lengths.
MAX_DEFAULT_ALPHA = 8


class EmptyTupleRangeError(EstimationDomainError):
    """The tuple range is empty: the longest repeat is shorter than ``u``."""

    def __init__(self, u: int, v: int):
        self.u = u
        self.v = v
        super().__init__(f"empty tuple range: u={u} exceeds v={v}")


@dataclass(frozen=True)
class EstimatorConfig:
    """Shared estimator configuration.

    ``alpha`` only affects :func:`generalized_lrs`; the other two are
    order-2 by definition.  ``apply_confidence`` exists because bias
    studies need the raw statistic without the 99% confidence offset.
    """

    alpha: int = 2
    cutoff: int = 35
    confidence_z: float = 2.576
    mode: str = OVERLAPPING
    bisect_tol: float = 1e-12
    apply_confidence: bool = True
    allow_high_alpha: bool = False

    def __post_init__(self):
        if not (isinstance(self.alpha, int) and self.alpha >= 2):
            raise ValueError("alpha must be an integer >= 2")
        if self.alpha > MAX_DEFAULT_ALPHA and not self.allow_high_alpha:
            raise ValueError(
                f"alpha={self.alpha} exceeds {MAX_DEFAULT_ALPHA}; set "
                "allow_high_alpha=True if you really want this"
            )
        if self.cutoff < 2:
            raise ValueError("cutoff must be at least 2")
        if self.confidence_z < 0.0:
            raise ValueError("confidence_z must be non-negative")
        if self.mode not in (OVERLAPPING, NON_OVERLAPPING):
            raise ValueError(f"unknown counting mode {self.mode!r}")
        if not self.bisect_tol > 0.0:
            raise ValueError("bisect_tol must be positive")


@dataclass(frozen=True)
class MinEntropyEstimate:
    """Result of one estimator run.

    ``h_estimate == -log2(theta_tilde)`` exactly.  For :func:`lrs_nist`
    the ``theta_hat``/``theta_tilde`` slots hold the collision
    probability before/after the confidence offset and ``m_tilde`` is
    None; for the min-entropy estimators ``m_tilde`` is the winning
    normalized power sum the bound was inverted at.
    """

    h_estimate: float
    theta_hat: float
    theta_tilde: float
    u: int
    v: int
    winning_w: int
    per_w: dict = field(repr=False)
    m_tilde: float | None
    clamped_uniform: bool


def confidence_adjust(x: float, L: int, z: float = 2.576) -> float:
    """Shift ``x`` up by ``z`` standard errors of a proportion, capped at 1.

    With ``z = 2.576`` this is the 99% upper confidence limit under the
    Gaussian approximation used throughout NIST SP 800-90B.
    """
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"x={x!r} outside [0, 1]")
    if L < 2:
        raise ValueError("L must be at least 2")
    return min(1.0, x + z * math.sqrt(x * (1.0 - x) / (L - 1)))


def _neg_log2(x: float) -> float:
    h = -math.log2(x)
    return h + 0.0


def _normalized_power_sums(index: SequenceIndex, u: int, v: int, alpha: int, mode: str):
    """Per-``w`` normalized power-sum estimates for ``w`` in ``u..v``.

    In non-overlapping mode, tuple lengths leaving fewer than ``alpha``
    blocks cannot be estimated and are skipped.
    """
    per_w = {}
    for w in range(u, v + 1):
        values, mult, l = index.count_summary(w, mode)
        if l < alpha:
            continue
        m_hat = _power_sum_from_summary(values, mult, l, alpha)
        per_w[w] = m_hat ** (1.0 / w)
    return per_w


def estimate_from_index(
    index: SequenceIndex, cfg: EstimatorConfig, estimator: str
) -> MinEntropyEstimate:
    """Run one estimator against a prebuilt :class:`SequenceIndex`.

    Lets callers evaluating several estimators on the same sequence share
    the suffix array and the per-``w`` count tables.  ``estimator`` is one
    of ``"lrs"``, ``"improved"``, ``"generalized"``.
    """
    if estimator == "lrs":
        return _estimate(index, cfg, alpha=2, to_min_entropy=False)
    if estimator == "improved":
        return _estimate(index, cfg, alpha=2, to_min_entropy=True)
    if estimator == "generalized":
        return _estimate(index, cfg, alpha=cfg.alpha, to_min_entropy=True)
    raise ValueError(f"unknown estimator {estimator!r}")


def _estimate(
    index: SequenceIndex, cfg: EstimatorConfig, alpha: int, to_min_entropy: bool
) -> MinEntropyEstimate:
    seq = index.seq
    L, k = seq.L, seq.k
    u = index.find_u(cfg.cutoff)
    v = index.find_v(alpha)
    if v < u:
        raise EmptyTupleRangeError(u, v)
    per_w = _normalized_power_sums(index, u, v, alpha, cfg.mode)
    if not per_w:
        raise EmptyTupleRangeError(u, v)
    m_tilde = max(per_w.values())
    winning_w = min(w for w, val in per_w.items() if val == m_tilde)

    if not to_min_entropy:
        p_hat = m_tilde
        p_tilde = (
            confidence_adjust(p_hat, L, cfg.confidence_z)
            if cfg.apply_confidence
            else p_hat
        )
        return MinEntropyEstimate(
            h_estimate=_neg_log2(p_tilde),
            theta_hat=p_hat,
            theta_tilde=p_tilde,
            u=u,
            v=v,
            winning_w=winning_w,
            per_w=per_w,
            m_tilde=None,
            clamped_uniform=False,
        )

    uniform_floor = 1.0 / k ** (alpha - 1)
    clamped = not m_tilde > uniform_floor
    if clamped:
        theta_hat = 1.0 / k
    elif alpha == 2:
        theta_hat = theta_upper_bound(m_tilde, k)
    else:
        theta_hat = solve_theta_from_power_sum(m_tilde, alpha, k, cfg.bisect_tol)
    theta_tilde = (
        confidence_adjust(theta_hat, L, cfg.confidence_z)
        if cfg.apply_confidence
        else theta_hat
    )
    return MinEntropyEstimate(
        h_estimate=_neg_log2(theta_tilde),
        theta_hat=theta_hat,
        theta_tilde=theta_tilde,
        u=u,
        v=v,
        winning_w=winning_w,
        per_w=per_w,
        m_tilde=m_tilde,
        clamped_uniform=clamped,
    )


def lrs_nist(seq: SymbolSequence, cfg: EstimatorConfig | None = None) -> MinEntropyEstimate:
    """The LRS estimator of NIST SP 800-90B: a collision-entropy estimate.

    Maximizes the per-sample pair-collision probability over tuple lengths
    ``u..v``, applies the 99% confidence offset, and returns its negative
    log.  Collision entropy upper-bounds min-entropy, so treat the output
    as optimistic for skewed sources.
    """
    cfg = cfg or EstimatorConfig()
    return estimate_from_index(SequenceIndex(seq), cfg, "lrs")


def improved_lrs(seq: SymbolSequence, cfg: EstimatorConfig | None = None) -> MinEntropyEstimate:
    """Min-entropy from the LRS collision statistic via the sharp theta bound.

    The raw collision-probability estimate (no confidence offset) is
    converted to the largest maximum-symbol-probability consistent with
    it; estimates at or below the uniform floor ``1/k`` clamp to ``1/k``.
    The confidence offset is applied to theta, not to the collision
    probability.
    """
    cfg = cfg or EstimatorConfig()
    return estimate_from_index(SequenceIndex(seq), cfg, "improved")


def generalized_lrs(seq: SymbolSequence, cfg: EstimatorConfig | None = None) -> MinEntropyEstimate:
    """Order-``alpha`` repeated-substring min-entropy estimator.

    Counts ``alpha``-wise tuple collisions, normalizes per sample, takes
    the conservative max over tuple lengths, and inverts the sharp
    power-sum bound (bisection for ``alpha > 2``; the order-2 case uses
    the closed form and is identical to :func:`improved_lrs`).
    """
    cfg = cfg or EstimatorConfig()
    return estimate_from_index(SequenceIndex(seq), cfg, "generalized")
