"""Tuple occurrence statistics over symbol sequences.

The estimators need, for a range of tuple lengths ``w``, the multiset of
occurrence counts of every distinct ``w``-tuple, plus two derived lengths:

* ``u`` -- the smallest ``w`` whose most common tuple occurs fewer than
  ``cutoff`` times (35 in NIST SP 800-90B);
* ``v`` -- the largest ``w`` with some tuple occurring at least ``alpha``
  times; at ``alpha == 2`` this is the longest-repeated-substring length.

:class:`SequenceIndex` answers all of these from one suffix array + LCP
construction (prefix doubling, O(L log L)).  Suffixes sharing a prefix of
length ``w`` are consecutive in suffix-array order, so occurrence counts
of distinct ``w``-tuples are run lengths of ``LCP >= w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "OVERLAPPING",
    "NON_OVERLAPPING",
    "SymbolSequence",
    "TupleCountTable",
    "SequenceIndex",
    "EstimationDomainError",
    "SequenceTooShortError",
    "count_tuples",
    "find_u",
    "find_v",
    "collision_count",
    "estimate_power_sum_w",
    "normalize_per_sample",
]

OVERLAPPING = "overlapping"
NON_OVERLAPPING = "non_overlapping"

#: Largest integer-encoded tuple value we allow before falling back to a
#: generic counting path (stay clear of uint64 wraparound).
_ENCODE_LIMIT = 2**62


class EstimationDomainError(ValueError):
    """The sequence does not carry enough structure for the requested statistic."""


class SequenceTooShortError(EstimationDomainError):
    """No tuple repeats ``alpha`` times, so no tuple range exists."""

    def __init__(self, alpha: int, length: int):
        self.alpha = alpha
        self.length = length
        super().__init__(
            f"sequence of length {length} has no tuple occurring {alpha} times"
        )


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """An observed sequence of symbols in ``{0, ..., k-1}``."""

    symbols: np.ndarray
    k: int

    def __post_init__(self):
        sym = np.asarray(self.symbols)
        if sym.ndim != 1 or sym.size < 1:
            raise ValueError("symbols must be a non-empty 1-D vector")
        if not np.issubdtype(sym.dtype, np.integer):
            raise ValueError("symbols must be integers")
        if self.k < 1:
            raise ValueError("alphabet size k must be positive")
        lo, hi = int(sym.min()), int(sym.max())
        if lo < 0 or hi >= self.k:
            raise ValueError(f"symbol values [{lo}, {hi}] outside [0, {self.k})")
        if hi >= 2**31:
            raise ValueError(f"symbol value {hi} exceeds the supported 31-bit range")
        sym = np.ascontiguousarray(sym, dtype=np.int32)
        sym.setflags(write=False)
        object.__setattr__(self, "symbols", sym)

    @property
    def L(self) -> int:
        return int(self.symbols.size)

    def __len__(self) -> int:
        return self.L


@dataclass(frozen=True, eq=False)
class TupleCountTable:
    """Occurrence counts of the distinct ``w``-tuples of a sequence.

    ``counts[i]`` is the number of occurrences of the i-th distinct tuple
    (order unspecified); ``l`` is the total number of tuples, so
    ``counts.sum() == l``.
    """

    w: int
    mode: str
    counts: np.ndarray
    l: int


def _check_mode(mode: str) -> str:
    if mode not in (OVERLAPPING, NON_OVERLAPPING):
        raise ValueError(f"unknown counting mode {mode!r}")
    return mode


#: Above this length the index trades the vectorized binary-lifting LCP
#: (which keeps every doubling level, ~log2(L) arrays) for Kasai's
#: algorithm, which needs no history.  Degenerate inputs such as long
#: constant runs hold classes together through all ~log2(L) rounds.
_LCP_LEVELS_MAX_L = 2_000_000


def _suffix_array(sym: np.ndarray, keep_levels: bool = True):
    """Prefix-doubling suffix array.

    Returns ``(sa, levels)`` where ``levels`` is a list of
    ``(step, classes)`` pairs: ``classes[i]`` identifies the substring
    ``sym[i:i+step]`` (two positions share a class iff those substrings
    are identical, including length at the end of the sequence).  With
    ``keep_levels=False`` only the final level is retained.
    """
    L = sym.size
    classes = np.unique(sym, return_inverse=True)[1].astype(np.int64)
    levels = [(1, classes)]
    step = 1
    while step < L and int(classes.max()) != L - 1:
        shifted = np.full(L, -1, dtype=np.int64)
        shifted[: L - step] = classes[step:]
        order = np.lexsort((shifted, classes))
        c0 = classes[order]
        c1 = shifted[order]
        boundary = np.empty(L, dtype=bool)
        boundary[0] = False
        boundary[1:] = (c0[1:] != c0[:-1]) | (c1[1:] != c1[:-1])
        new_classes = np.empty(L, dtype=np.int64)
        new_classes[order] = np.cumsum(boundary)
        classes = new_classes
        step *= 2
        if keep_levels:
            levels.append((step, classes))
        else:
            levels = [(step, classes)]
    sa = np.empty(L, dtype=np.int64)
    sa[levels[-1][1]] = np.arange(L, dtype=np.int64)
    return sa, levels


def _lcp_adjacent(sa: np.ndarray, levels, L: int) -> np.ndarray:
    """LCP of lexicographically adjacent suffixes, by binary lifting.

    ``lcp[i]`` is the length of the longest common prefix of the suffixes
    starting at ``sa[i]`` and ``sa[i+1]``.
    """
    if L < 2:
        return np.zeros(0, dtype=np.int64)
    a = sa[:-1].copy()
    b = sa[1:].copy()
    lcp = np.zeros(L - 1, dtype=np.int64)
    for step, classes in reversed(levels):
        # One sentinel slot suffices: advancing never passes the shorter
        # suffix's end, and two exhausted positions cannot coincide.
        ext = np.append(classes, -1)
        match = ext[a + lcp] == ext[b + lcp]
        lcp[match] += step
    return lcp


def _lcp_kasai(sym: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai's LCP construction: O(L) time and memory, no level history."""
    L = sym.size
    if L < 2:
        return np.zeros(0, dtype=np.int64)
    text = sym.tolist()
    order = sa.tolist()
    rank = [0] * L
    for pos, start in enumerate(order):
        rank[start] = pos
    lcp = [0] * (L - 1)
    h = 0
    for i in range(L):
        r = rank[i]
        if r == 0:
            h = 0
            continue
        j = order[r - 1]
        while i + h < L and j + h < L and text[i + h] == text[j + h]:
            h += 1
        lcp[r - 1] = h
        if h:
            h -= 1
    return np.asarray(lcp, dtype=np.int64)


class SequenceIndex:
    """Suffix-array index answering per-``w`` tuple statistics.

    Count tables are memoized per ``(w, mode)``, so running several
    estimator configurations against the same sequence reuses the work.
    """

    def __init__(self, seq: SymbolSequence):
        self.seq = seq
        self.L = seq.L
        sym = seq.symbols
        small = self.L <= _LCP_LEVELS_MAX_L
        self.sa, levels = _suffix_array(sym, keep_levels=small)
        if small:
            self.lcp = _lcp_adjacent(self.sa, levels, self.L)
        else:
            self.lcp = _lcp_kasai(sym, self.sa)
        self._summaries: dict = {}

    def _overlapping_counts(self, w: int) -> np.ndarray:
        """Occurrence counts of distinct w-tuples (all start positions)."""
        L = self.L
        new_group = np.empty(L, dtype=bool)
        new_group[0] = True
        new_group[1:] = self.lcp < w
        gid = np.cumsum(new_group) - 1
        valid = self.sa <= L - w
        counts = np.bincount(gid[valid])
        return counts[counts > 0]

    def max_tuple_count(self, w: int) -> int:
        """Occurrences of the most common w-tuple (overlapping)."""
        if not 1 <= w <= self.L:
            raise ValueError(f"w={w} outside [1, {self.L}]")
        return int(self._overlapping_counts(w).max())

    def find_u(self, cutoff: int = 35) -> int:
        """Smallest ``w`` whose most common tuple occurs < ``cutoff`` times.

        The most common count is non-increasing in ``w``, so a galloping
        search finds the threshold in O(log u) count passes; at ``w == L``
        the maximum count is 1, so the answer always exists.
        """
        if cutoff < 2:
            raise ValueError("cutoff must be at least 2")
        if self.max_tuple_count(1) < cutoff:
            return 1
        lo = 1  # max count at lo is >= cutoff
        hi = 2
        while hi < self.L and self.max_tuple_count(hi) >= cutoff:
            lo = hi
            hi *= 2
        hi = min(hi, self.L)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.max_tuple_count(mid) >= cutoff:
                lo = mid
            else:
                hi = mid
        return hi

    def find_v(self, alpha: int = 2) -> int:
        """Largest ``w`` with some w-tuple occurring >= ``alpha`` times.

        A tuple repeated ``alpha`` times is a common prefix of ``alpha``
        suffixes, i.e. of ``alpha - 1`` consecutive LCP entries; the answer
        is the max over sliding minima of that window size.
        """
        if alpha < 2:
            raise ValueError("alpha must be at least 2")
        window = alpha - 1
        if self.lcp.size < window:
            raise SequenceTooShortError(alpha, self.L)
        if window == 1:
            v = int(self.lcp.max())
        else:
            v = int(sliding_window_view(self.lcp, window).min(axis=1).max())
        if v < 1:
            raise SequenceTooShortError(alpha, self.L)
        return v

    def tuple_counts(self, w: int, mode: str = OVERLAPPING) -> TupleCountTable:
        if not 1 <= w <= self.L:
            raise ValueError(f"w={w} outside [1, {self.L}]")
        if _check_mode(mode) == OVERLAPPING:
            counts = self._overlapping_counts(w)
            return TupleCountTable(w, mode, counts, self.L - w + 1)
        counts = _block_counts(self.seq.symbols, w, self.seq.k)
        return TupleCountTable(w, mode, counts, self.L // w)

    def count_summary(self, w: int, mode: str = OVERLAPPING):
        """Memoized ``(count_values, multiplicities, l)`` for one ``(w, mode)``.

        The compressed form keeps the per-alpha collision arithmetic cheap:
        distinct count values are few even when there are many tuples.
        """
        key = (w, mode)
        hit = self._summaries.get(key)
        if hit is None:
            table = self.tuple_counts(w, mode)
            values, mult = np.unique(table.counts, return_counts=True)
            hit = (values, mult, table.l)
            self._summaries[key] = hit
        return hit


def _encode_capacity(k: int, w: int) -> bool:
    return k**w <= _ENCODE_LIMIT


def _horner_encode(rows: np.ndarray, k: int) -> np.ndarray:
    """Encode each row as an integer in base k (fits by capacity check)."""
    codes = np.zeros(rows.shape[0], dtype=np.uint64)
    base = np.uint64(k)
    for col in range(rows.shape[1]):
        codes = codes * base + rows[:, col].astype(np.uint64)
    return codes


def _block_counts(sym: np.ndarray, w: int, k: int) -> np.ndarray:
    """Counts of distinct disjoint w-blocks; trailing remainder dropped."""
    l = sym.size // w
    if l == 0:
        raise ValueError(f"w={w} exceeds the sequence length {sym.size}")
    blocks = sym[: l * w].reshape(l, w)
    if _encode_capacity(k, w):
        return np.unique(_horner_encode(blocks, k), return_counts=True)[1]
    return np.unique(blocks, axis=0, return_counts=True)[1]


def count_tuples(seq: SymbolSequence, w: int, mode: str = OVERLAPPING) -> TupleCountTable:
    """Exact occurrence counts of every distinct ``w``-tuple of ``seq``.

    Overlapping mode counts all ``L - w + 1`` start positions;
    non-overlapping mode counts the ``floor(L / w)`` disjoint blocks,
    dropping the remainder.
    """
    _check_mode(mode)
    if not 1 <= w <= seq.L:
        raise ValueError(f"w={w} outside [1, {seq.L}]")
    if mode == NON_OVERLAPPING:
        return TupleCountTable(w, mode, _block_counts(seq.symbols, w, seq.k), seq.L // w)
    if _encode_capacity(seq.k, w):
        windows = sliding_window_view(seq.symbols, w)
        counts = np.unique(_horner_encode(windows, seq.k), return_counts=True)[1]
        return TupleCountTable(w, mode, counts, seq.L - w + 1)
    return SequenceIndex(seq).tuple_counts(w, mode)


def find_u(seq: SymbolSequence, cutoff: int = 35) -> int:
    """Smallest ``w`` whose most common w-tuple occurs < ``cutoff`` times."""
    return SequenceIndex(seq).find_u(cutoff)


def find_v(seq: SymbolSequence, alpha: int = 2) -> int:
    """Largest ``w`` with a w-tuple occurring at least ``alpha`` times.

    At ``alpha == 2`` this is the longest-repeated-substring length.
    Raises :class:`SequenceTooShortError` when no symbol repeats
    ``alpha`` times.
    """
    return SequenceIndex(seq).find_v(alpha)


def collision_count(table: TupleCountTable, alpha: int) -> int:
    """Number of ``alpha``-wise collisions: ``sum_i C(counts_i, alpha)``.

    Exact integer arithmetic; ``C(c, alpha) == 0`` for ``c < alpha``.
    """
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    values, mult = np.unique(table.counts, return_counts=True)
    return _collision_count_from_summary(values, mult, alpha)


def _collision_count_from_summary(values, mult, alpha: int) -> int:
    total = 0
    for value, m in zip(values.tolist(), mult.tolist()):
        if value >= alpha:
            total += m * math.comb(value, alpha)
    return total


def _power_sum_from_summary(values, mult, l: int, alpha: int) -> float:
    # Exact big-integer ratio; int/int division rounds correctly once.
    return _collision_count_from_summary(values, mult, alpha) / math.comb(l, alpha)


def estimate_power_sum_w(
    seq: SymbolSequence, w: int, alpha: int, mode: str = OVERLAPPING
) -> float:
    """Unbiased w-tuple power-sum estimate ``sum C(C_i, alpha) / C(l, alpha)``.

    For i.i.d. non-overlapping tuples its expectation is exactly the
    power sum of order ``alpha`` of the w-tuple distribution.
    """
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    table = count_tuples(seq, w, mode)
    if table.l < alpha:
        raise ValueError(
            f"only {table.l} tuples of length {w}; need at least alpha={alpha}"
        )
    values, mult = np.unique(table.counts, return_counts=True)
    return _power_sum_from_summary(values, mult, table.l, alpha)


def normalize_per_sample(m_hat: float, w: int) -> float:
    """Per-sample normalization ``m_hat ** (1/w)`` of a w-tuple statistic."""
    if not (0.0 <= m_hat <= 1.0):
        raise ValueError(f"m_hat={m_hat!r} outside [0, 1]")
    if w < 1:
        raise ValueError("w must be positive")
    return m_hat ** (1.0 / w)
