"""Seeded simulated randomness sources and their exact entropy rates.

Four families:

* ``bms`` -- i.i.d. Bernoulli(p) bits;
* ``markov`` -- symmetric first-order binary Markov chain with flip
  probability ``p``, started from its stationary (uniform) distribution;
  its min- and collision-entropy *rates* equal the corresponding BMS
  entropies;
* ``near_uniform`` -- i.i.d. draws from the near-uniform distribution
  with maximum ``theta`` over ``k`` symbols;
* ``inverted_near_uniform`` -- i.i.d. draws from the inverted
  near-uniform distribution with maximum ``psi``.

Generation is driven by numpy's Philox4x64 counter-based generator keyed
with the 128-bit value ``seed + (stream << 64)``, so every (seed, stream)
pair is an independent, platform-stable, exactly reproducible stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import (
    Distribution,
    inverted_near_uniform,
    min_entropy,
    near_uniform,
    renyi_entropy,
)
from .tuples import SymbolSequence

__all__ = [
    "BMS",
    "MARKOV",
    "NEAR_UNIFORM",
    "INVERTED_NEAR_UNIFORM",
    "FAMILIES",
    "SourceSpec",
    "generate",
    "theoretical_entropy",
    "binarize",
    "debinarize",
]

BMS = "bms"
MARKOV = "markov"
NEAR_UNIFORM = "near_uniform"
INVERTED_NEAR_UNIFORM = "inverted_near_uniform"
FAMILIES = (BMS, MARKOV, NEAR_UNIFORM, INVERTED_NEAR_UNIFORM)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SourceSpec:
    """One simulated source.

    ``param`` is the family parameter: Bernoulli/flip probability ``p``
    for ``bms``/``markov``, the maximum probability ``theta`` for
    ``near_uniform``, ``psi`` for ``inverted_near_uniform``.  ``stream``
    selects an independent substream of the same seed; trial harnesses
    use it as the trial index.
    """

    family: str
    param: float
    L: int
    k: int = 2
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown source family {self.family!r}")
        if self.L < 1:
            raise ValueError("L must be positive")
        if not (0 <= self.seed <= _MASK64 and 0 <= self.stream <= _MASK64):
            raise ValueError("seed and stream must be unsigned 64-bit integers")
        if self.family in (BMS, MARKOV):
            if self.k != 2:
                raise ValueError(f"{self.family} sources are binary; got k={self.k}")
            if not (0.0 <= self.param <= 1.0):
                raise ValueError(f"p={self.param!r} outside [0, 1]")
        else:
            # Range/slot validation is the distribution constructor's job.
            self.distribution()

    def distribution(self) -> Distribution:
        """The per-symbol distribution (i.i.d. families and BMS)."""
        if self.family == BMS:
            return Distribution([1.0 - self.param, self.param])
        if self.family == NEAR_UNIFORM:
            return near_uniform(self.param, self.k)
        if self.family == INVERTED_NEAR_UNIFORM:
            return inverted_near_uniform(self.param, self.k)
        raise ValueError(f"{self.family} has no single-symbol distribution")


def _rng(spec: SourceSpec) -> np.random.Generator:
    key = (spec.seed & _MASK64) | ((spec.stream & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def generate(spec: SourceSpec) -> SymbolSequence:
    """Generate the sequence for ``spec``; identical spec, identical output."""
    rng = _rng(spec)
    L = spec.L
    if spec.family == BMS:
        symbols = (rng.random(L) < spec.param).astype(np.int32)
    elif spec.family == MARKOV:
        start = int(rng.random() < 0.5)
        symbols = np.empty(L, dtype=np.int32)
        symbols[0] = start
        if L > 1:
            flips = (rng.random(L - 1) < spec.param).astype(np.int32)
            symbols[1:] = start ^ (np.cumsum(flips) & 1)
    else:
        cdf = np.cumsum(spec.distribution().probs)
        cdf[-1] = 1.0
        symbols = np.searchsorted(cdf, rng.random(L), side="right").astype(np.int32)
    return SymbolSequence(symbols, spec.k)


def theoretical_entropy(spec: SourceSpec, kind: str = "min") -> float:
    """Exact entropy (rate) in bits per symbol: ``kind`` is min | collision.

    For the Markov family these are rates, and the symmetric chain's rates
    coincide with the BMS entropies at the same parameter.
    """
    if kind not in ("min", "collision"):
        raise ValueError(f"kind must be 'min' or 'collision', got {kind!r}")
    if spec.family in (BMS, MARKOV):
        p = spec.param
        if kind == "min":
            return -math.log2(max(p, 1.0 - p)) + 0.0
        return -math.log2(p * p + (1.0 - p) * (1.0 - p)) + 0.0
    dist = spec.distribution()
    return min_entropy(dist) if kind == "min" else renyi_entropy(dist, 2)


def binarize(seq: SymbolSequence) -> SymbolSequence:
    """Expand each symbol into ``log2(k)`` bits, most significant first."""
    bits_per_symbol = _bits_for(seq.k)
    shifts = np.arange(bits_per_symbol - 1, -1, -1, dtype=np.int32)
    bits = (seq.symbols[:, None] >> shifts) & 1
    return SymbolSequence(bits.reshape(-1), 2)


def debinarize(seq: SymbolSequence, k: int) -> SymbolSequence:
    """Inverse of :func:`binarize`: pack consecutive bits into symbols."""
    if seq.k != 2:
        raise ValueError("debinarize expects a binary sequence")
    bits_per_symbol = _bits_for(k)
    if seq.L % bits_per_symbol:
        raise ValueError(
            f"length {seq.L} is not a multiple of {bits_per_symbol} bits"
        )
    blocks = seq.symbols.reshape(-1, bits_per_symbol).astype(np.int64)
    weights = 1 << np.arange(bits_per_symbol - 1, -1, -1, dtype=np.int64)
    return SymbolSequence(blocks @ weights, k)


def _bits_for(k: int) -> int:
    bits = int(k).bit_length() - 1
    if k < 2 or (1 << bits) != k:
        raise ValueError(f"alphabet size {k} is not a power of two")
    return bits
