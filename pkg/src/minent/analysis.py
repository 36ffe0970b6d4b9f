"""Monte-Carlo harness for estimator bias and variance experiments.

Trials are deterministic: trial ``i`` of a batch draws from the source's
(seed, stream = spec.stream + i) substream, so any report reproduces
bit-identically from its spec.  Non-binary sources are binarized before
estimation (MSB-first) and the per-bit entropy estimate is scaled by
``log2(k)`` back to bits per symbol, mirroring how non-binary sources are
assessed in practice.

Set ``MINENT_THREADS`` to run the trials of a batch in a thread pool;
aggregation is by trial index, so the results do not depend on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .entropy import power_sum, theta_lower_bound, theta_upper_bound, v_bar_prediction, variance_ratio_prediction
from .estimators import EstimationDomainError, EstimatorConfig, estimate_from_index
from .sources import NEAR_UNIFORM, SourceSpec, binarize, generate, theoretical_entropy
from .tuples import NON_OVERLAPPING, SequenceIndex, SymbolSequence, estimate_power_sum_w

__all__ = [
    "EstimatorJob",
    "TrialReport",
    "run_trials",
    "run_trial_batch",
    "bias_sweep",
    "variance_sweep",
    "bound_curves",
    "exact_expectation_oracle",
    "v_bar_check",
    "BOUND_CURVE_COLUMNS",
    "VARIANCE_SWEEP_COLUMNS",
    "V_BAR_COLUMNS",
    "bias_sweep_columns",
]

THREADS_ENV_VAR = "MINENT_THREADS"

BOUND_CURVE_COLUMNS = [
    "pc",
    "theta_upper",
    "psi_lower",
    "h_min_from_theta",
    "h_min_from_psi",
    "h_collision",
]

VARIANCE_SWEEP_COLUMNS = [
    "alpha",
    "var_theta_hat",
    "var_h",
    "mean_h",
    "ratio_to_prev",
    "predicted_ratio",
    "n_failed",
]

V_BAR_COLUMNS = [
    "alpha",
    "mean_v",
    "predicted_v",
    "ratio_to_prev",
    "predicted_ratio",
]


@dataclass(frozen=True)
class EstimatorJob:
    """A labeled estimator configuration to run inside a trial batch."""

    label: str
    estimator: str  # lrs | improved | generalized
    config: EstimatorConfig


@dataclass(frozen=True)
class TrialReport:
    """Aggregated estimates of one estimator over a batch of trials."""

    spec: SourceSpec
    job: EstimatorJob
    n_trials: int
    n_failed: int
    estimates: np.ndarray
    theta_hats: np.ndarray
    mean: float
    sample_variance: float
    theta_mean: float
    theta_variance: float
    reference_min_entropy: float
    reference_collision_entropy: float


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_trials(fn, n_trials: int):
    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(n_trials)))
    return [fn(i) for i in range(n_trials)]


def run_trial_batch(
    spec: SourceSpec,
    jobs: list[EstimatorJob],
    n_trials: int,
    binarize_input: bool | None = None,
) -> dict[str, TrialReport]:
    """Run several estimators over the same seeded trials.

    Each trial builds one sequence index shared by all jobs.  Trials where
    an estimator raises a data-insufficiency error are excluded from that
    estimator's statistics and tallied in ``n_failed``.
    """
    if n_trials < 2:
        raise ValueError("n_trials must be at least 2")
    if binarize_input is None:
        binarize_input = spec.k > 2
    scale = math.log2(spec.k) if binarize_input else 1.0

    def one_trial(i: int):
        seq = generate(replace(spec, stream=spec.stream + i))
        if binarize_input:
            seq = binarize(seq)
        index = SequenceIndex(seq)
        row = {}
        for job in jobs:
            try:
                est = estimate_from_index(index, job.config, job.estimator)
            except EstimationDomainError:
                row[job.label] = None
            else:
                row[job.label] = (est.h_estimate * scale, est.theta_hat)
        return row

    rows = _map_trials(one_trial, n_trials)

    reports = {}
    for job in jobs:
        pairs = [row[job.label] for row in rows if row[job.label] is not None]
        h = np.array([p[0] for p in pairs])
        theta = np.array([p[1] for p in pairs])
        reports[job.label] = TrialReport(
            spec=spec,
            job=job,
            n_trials=n_trials,
            n_failed=n_trials - len(pairs),
            estimates=h,
            theta_hats=theta,
            mean=float(h.mean()) if h.size else math.nan,
            sample_variance=float(h.var(ddof=1)) if h.size > 1 else math.nan,
            theta_mean=float(theta.mean()) if theta.size else math.nan,
            theta_variance=float(theta.var(ddof=1)) if theta.size > 1 else math.nan,
            reference_min_entropy=theoretical_entropy(spec, "min"),
            reference_collision_entropy=theoretical_entropy(spec, "collision"),
        )
    return reports


def run_trials(
    spec: SourceSpec,
    estimator: str,
    cfg: EstimatorConfig,
    n_trials: int,
    binarize_input: bool | None = None,
) -> TrialReport:
    """Single-estimator convenience wrapper over :func:`run_trial_batch`."""
    job = EstimatorJob(estimator, estimator, cfg)
    return run_trial_batch(spec, [job], n_trials, binarize_input)[estimator]


def bias_sweep_columns(jobs: list[EstimatorJob]) -> list[str]:
    cols = ["param", "h_min", "h_collision"]
    for job in jobs:
        cols += [f"{job.label}_mean", f"{job.label}_std", f"{job.label}_failed"]
    return cols


def bias_sweep(
    family: str,
    params: list[float],
    jobs: list[EstimatorJob],
    L: int,
    n_trials: int,
    base_seed: int,
    k: int = 2,
    binarize_input: bool | None = None,
) -> list[dict]:
    """Mean estimate per estimator across a parameter grid, one row per value."""
    rows = []
    for param in params:
        spec = SourceSpec(family=family, param=float(param), L=L, k=k, seed=base_seed)
        reports = run_trial_batch(spec, jobs, n_trials, binarize_input)
        row = {
            "param": float(param),
            "h_min": theoretical_entropy(spec, "min"),
            "h_collision": theoretical_entropy(spec, "collision"),
        }
        for job in jobs:
            rep = reports[job.label]
            row[f"{job.label}_mean"] = rep.mean
            row[f"{job.label}_std"] = math.sqrt(rep.sample_variance) if rep.estimates.size > 1 else math.nan
            row[f"{job.label}_failed"] = rep.n_failed
        rows.append(row)
    return rows


def variance_sweep(
    alphas: list[int],
    L: int,
    n_trials: int,
    base_seed: int,
    cutoff: int = 35,
    mode: str = NON_OVERLAPPING,
    spec: SourceSpec | None = None,
) -> list[dict]:
    """Variance of the raw theta estimate versus the order ``alpha``.

    Defaults to the uniform binary source (near-uniform, theta = 1/2,
    k = 2) in non-overlapping mode, the setting in which the predicted
    ratio ``(alpha/(alpha+1))**4`` applies.
    """
    if spec is None:
        spec = SourceSpec(family=NEAR_UNIFORM, param=0.5, L=L, k=2, seed=base_seed)
    jobs = [
        EstimatorJob(
            f"generalized_a{a}",
            "generalized",
            EstimatorConfig(alpha=int(a), cutoff=cutoff, mode=mode),
        )
        for a in alphas
    ]
    reports = run_trial_batch(spec, jobs, n_trials, binarize_input=False)
    rows = []
    prev_var = None
    prev_alpha = None
    for a, job in zip(alphas, jobs):
        rep = reports[job.label]
        var_theta = rep.theta_variance
        row = {
            "alpha": int(a),
            "var_theta_hat": var_theta,
            "var_h": rep.sample_variance,
            "mean_h": rep.mean,
            "ratio_to_prev": (
                var_theta / prev_var if prev_var not in (None, 0.0) else math.nan
            ),
            "predicted_ratio": (
                variance_ratio_prediction(prev_alpha)
                if prev_alpha is not None and a == prev_alpha + 1
                else math.nan
            ),
            "n_failed": rep.n_failed,
        }
        rows.append(row)
        prev_var = var_theta
        prev_alpha = int(a)
    return rows


def bound_curves(pc_values: list[float], k: int) -> list[dict]:
    """Sharp theta bounds and entropy bounds along a collision-probability grid."""
    rows = []
    for pc in pc_values:
        pc = float(pc)
        theta = theta_upper_bound(pc, k)
        psi = theta_lower_bound(pc)
        rows.append(
            {
                "pc": pc,
                "theta_upper": theta,
                "psi_lower": psi,
                "h_min_from_theta": -math.log2(theta) + 0.0,
                "h_min_from_psi": -math.log2(psi) + 0.0,
                "h_collision": -math.log2(pc) + 0.0,
            }
        )
    return rows


def exact_expectation_oracle(p: float, l: int, alpha: int, w: int = 1) -> float:
    """Exact expectation of the w-tuple power-sum estimator under Bernoulli(p).

    Enumerates all ``2**(l*w)`` binary sequences of ``l`` non-overlapping
    ``w``-tuples, runs the production estimator on each, and sums the
    probability-weighted results with compensated summation.  Equals the
    true power sum of the w-tuple distribution whenever the estimator is
    unbiased.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p={p!r} outside [0, 1]")
    total_bits = l * w
    if total_bits > 22:
        raise ValueError(f"enumeration of 2**{total_bits} sequences is too large")
    if l < alpha:
        raise ValueError("need at least alpha tuples")
    terms = []
    for pattern in range(2**total_bits):
        bits = np.array(
            [(pattern >> i) & 1 for i in range(total_bits)], dtype=np.int32
        )
        ones = int(bits.sum())
        prob = p**ones * (1.0 - p) ** (total_bits - ones)
        if prob == 0.0:
            continue
        m_hat = estimate_power_sum_w(
            SymbolSequence(bits, 2), w, alpha, NON_OVERLAPPING
        )
        terms.append(prob * m_hat)
    return math.fsum(terms)


def v_bar_check(
    alphas: list[int],
    L: int,
    n_trials: int,
    base_seed: int,
    k: int = 2,
) -> list[dict]:
    """Empirical longest ``alpha``-fold repeat length versus its prediction.

    Uses a uniform source over ``k`` symbols.  The prediction evaluates
    the expected-collision formula at the overlapping tuple count
    ``l = L``; the exact count ``L - w + 1`` differs negligibly at the
    lengths where the threshold is crossed.
    """
    spec = SourceSpec(family=NEAR_UNIFORM, param=1.0 / k, L=L, k=k, seed=base_seed)
    uniform = spec.distribution()
    rows = []
    prev_mean = None
    prev_alpha = None
    for alpha in alphas:
        alpha = int(alpha)
        vs = []
        for i in range(n_trials):
            seq = generate(replace(spec, stream=spec.stream + i))
            vs.append(SequenceIndex(seq).find_v(alpha))
        mean_v = float(np.mean(vs))
        predicted = v_bar_prediction(power_sum(uniform, alpha), L, alpha)
        row = {
            "alpha": alpha,
            "mean_v": mean_v,
            "predicted_v": predicted,
            "ratio_to_prev": mean_v / prev_mean if prev_mean else math.nan,
            "predicted_ratio": (
                (prev_alpha**2 - 1.0) / prev_alpha**2
                if prev_alpha is not None and alpha == prev_alpha + 1
                else math.nan
            ),
        }
        rows.append(row)
        prev_mean = mean_v
        prev_alpha = alpha
    return rows
