"""Shared naive oracles: independent brute-force implementations that the
production suffix-array machinery is checked against."""

from __future__ import annotations

from collections import Counter

import numpy as np
import pytest


def naive_overlapping_counts(symbols, w: int) -> list[int]:
    data = bytes(bytearray(int(s) for s in symbols))
    counter = Counter(data[i : i + w] for i in range(len(data) - w + 1))
    return sorted(counter.values())


def naive_block_counts(symbols, w: int) -> list[int]:
    data = bytes(bytearray(int(s) for s in symbols))
    l = len(data) // w
    counter = Counter(data[i * w : (i + 1) * w] for i in range(l))
    return sorted(counter.values())


def naive_max_counts_by_w(symbols) -> list[int]:
    """Most-common-tuple count for w = 1, 2, ... until it drops below 2."""
    data = bytes(bytearray(int(s) for s in symbols))
    L = len(data)
    maxima = []
    for w in range(1, L + 1):
        counter = Counter(data[i : i + w] for i in range(L - w + 1))
        best = max(counter.values())
        maxima.append(best)
        if best < 2:
            break
    return maxima


def naive_find_v(symbols, alpha: int) -> int:
    """Largest w with an alpha-times repeated w-tuple; 0 when none exists."""
    v = 0
    for w, best in enumerate(naive_max_counts_by_w(symbols), start=1):
        if best >= alpha:
            v = w
    return v


def naive_find_u(symbols, cutoff: int) -> int:
    for w, best in enumerate(naive_max_counts_by_w(symbols), start=1):
        if best < cutoff:
            return w
    return len(symbols)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0xD1CE)
