"""Seed derivation and deterministic parallel mapping.

Every replicate seed is derived from (master_seed, indices...) through mix64,
and parallel sweeps aggregate results in task order, so outputs are
bit-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

_MASK = (1 << 64) - 1


def _finalize(z):
    # splitmix64 finalizer
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z


def mix64(*words):
    """Fold integer words into one well-mixed 64-bit value."""
    z = 0x9E3779B97F4A7C15
    for w in words:
        z = _finalize((z + (int(w) & _MASK)) & _MASK)
    return z


def rng_from(*words):
    """PCG64 generator seeded from mix64 of the given words."""
    return np.random.Generator(np.random.PCG64(mix64(*words)))


def ordered_map(fn, items, workers=1):
    """Map fn over items, preserving order; thread-parallel when workers > 1."""
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
