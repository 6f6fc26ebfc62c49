"""Counter-based random streams usable from numba kernels.

Every walk and every training shard draws from its own splitmix64 stream, so
results do not depend on how work is scheduled across threads.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    return z ^ (z >> _S31)


@njit(cache=True)
def stream_seed(seed, a, b):
    """Derive an independent stream state from a seed and two integer keys."""
    s = mix64(np.uint64(seed) + _GOLDEN)
    s = mix64(s ^ (np.uint64(a) * _MUL1 + _GOLDEN))
    s = mix64(s ^ (np.uint64(b) * _MUL2 + _GOLDEN))
    return s


@njit(cache=True)
def next_u64(state):
    state = state + _GOLDEN
    return state, mix64(state)


@njit(cache=True)
def next_float(state):
    """Uniform double in [0, 1)."""
    state, z = next_u64(state)
    return state, (z >> _S11) * _INV53


@njit(cache=True)
def next_index(state, n):
    """Uniform integer in [0, n)."""
    state, u = next_float(state)
    i = np.int64(u * n)
    if i >= n:
        i = n - 1
    return state, i
