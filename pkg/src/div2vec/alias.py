"""Alias tables (Vose's method) for O(1) categorical sampling.

Tables can be built for one distribution or for many distributions packed in
CSR layout, one per node neighbour slice.
"""

import numpy as np
from numba import njit

from ._rng import next_float, next_index, stream_seed


@njit(cache=True)
def _build_into(weights, prob, alias):
    n = weights.shape[0]
    total = 0.0
    for i in range(n):
        total += weights[i]
    scaled = np.empty(n)
    for i in range(n):
        scaled[i] = weights[i] * n / total
    small = np.empty(n, dtype=np.int64)
    large = np.empty(n, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(n):
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        nl -= 1
        g = large[nl]
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small[ns] = g
            ns += 1
        else:
            large[nl] = g
            nl += 1
    # leftovers are 1 up to rounding
    while nl > 0:
        nl -= 1
        prob[large[nl]] = 1.0
        alias[large[nl]] = large[nl]
    while ns > 0:
        ns -= 1
        prob[small[ns]] = 1.0
        alias[small[ns]] = small[ns]


@njit(cache=True)
def _build_csr(offsets, weights, prob, alias):
    for v in range(offsets.shape[0] - 1):
        lo = offsets[v]
        hi = offsets[v + 1]
        if hi > lo:
            _build_into(weights[lo:hi], prob[lo:hi], alias[lo:hi])


@njit(cache=True)
def alias_draw(prob, alias, lo, n, state):
    """Draw a local index in [0, n) from the table slice starting at ``lo``."""
    state, j = next_index(state, n)
    state, u = next_float(state)
    if u < prob[lo + j]:
        return state, j
    return state, alias[lo + j]


@njit(cache=True)
def _draw_many(prob, alias, lo, n, count, seed):
    out = np.empty(count, dtype=np.int64)
    state = stream_seed(seed, lo, n)
    for i in range(count):
        state, out[i] = alias_draw(prob, alias, lo, n, state)
    return out


class AliasTable:
    """Alias tables for one or more categorical distributions.

    Args:
        weights: Nonnegative weights, flat.
        offsets: Optional CSR offsets splitting ``weights`` into slices; each
            slice becomes its own distribution. Defaults to a single slice.
    """

    def __init__(self, weights, offsets=None):
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        if offsets is None:
            offsets = np.array([0, weights.shape[0]], dtype=np.int64)
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("alias weights must be finite and nonnegative")
        csum = np.concatenate([[0.0], np.cumsum(weights)])
        sums = csum[offsets[1:]] - csum[offsets[:-1]]
        nonempty = offsets[1:] > offsets[:-1]
        if np.any(sums[nonempty] <= 0):
            raise ValueError("every nonempty slice needs positive total weight")
        self.offsets = offsets
        self.prob = np.ones_like(weights)
        self.alias = np.arange(weights.shape[0], dtype=np.int64) - np.repeat(
            offsets[:-1], np.diff(offsets)
        )
        _build_csr(offsets, weights, self.prob, self.alias)

    def __len__(self):
        return self.offsets.shape[0] - 1

    def exact(self, slot: int = 0) -> np.ndarray:
        """Distribution the table encodes for slice ``slot``, reconstructed from prob/alias."""
        lo, hi = self.offsets[slot], self.offsets[slot + 1]
        n = hi - lo
        out = self.prob[lo:hi] / n
        np.add.at(out, self.alias[lo:hi], (1.0 - self.prob[lo:hi]) / n)
        return out

    def draw(self, count: int, seed: int = 0, slot: int = 0) -> np.ndarray:
        lo, hi = self.offsets[slot], self.offsets[slot + 1]
        return _draw_many(self.prob, self.alias, lo, hi - lo, count, seed)
