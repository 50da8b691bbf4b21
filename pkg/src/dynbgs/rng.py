"""Counter-based random numbers.

Every stochastic decision is a pure function of
(seed, frame index, decision slot, counter), where the counter is the
flat pixel index (or pixel * n + k for multi-draw decisions). The mixer
is the splitmix64 finalizer. Results never depend on traversal order or
thread count, and kernels can draw lazily for just the pixels they need.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1

# decision slots
INIT_OFFSET = 0
SELF_GATE = 1
SELF_SLOT = 2
NEIGHBOR_GATE = 3
NEIGHBOR_DIR = 4
NEIGHBOR_SLOT = 5
DYN_SLOT = 6

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_FRAME_MUL = np.uint64(0xD1B54A32D192ED03)
_SLOT_MUL = np.uint64(0xABC98388FB8FAC03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def stream_key(seed, frame_index, slot):
    h = _mix(np.uint64(seed) ^ _GOLDEN)
    h = _mix(h ^ (np.uint64(frame_index) * _FRAME_MUL))
    return _mix(h ^ (np.uint64(slot) * _SLOT_MUL))


@njit(cache=True, inline="always")
def draw_uniform(key, counter):
    """Uniform double in [0, 1) for one counter of a keyed stream."""
    h = _mix(key ^ (np.uint64(counter) * _GOLDEN))
    return np.float64(h >> _S11) * _INV53


@njit(cache=True, inline="always")
def draw_below(key, counter, bound):
    return np.int64(np.floor(draw_uniform(key, counter) * bound))


@njit(cache=True)
def _uniform_many(key, counters, out):
    for i in range(counters.shape[0]):
        out[i] = draw_uniform(key, counters[i])


class CounterRng:
    def __init__(self, seed: int = 0):
        self.seed = int(seed) & MASK64

    def key(self, frame_index: int, slot: int) -> np.uint64:
        return np.uint64(stream_key(np.uint64(self.seed), np.uint64(frame_index), np.uint64(slot)))

    def uniform_at(self, frame_index: int, slot: int, counters) -> np.ndarray:
        counters = np.ascontiguousarray(counters, dtype=np.uint64).ravel()
        out = np.empty(counters.shape[0], dtype=np.float64)
        _uniform_many(self.key(frame_index, slot), counters, out)
        return out

    def uniform(self, frame_index: int, slot: int, size) -> np.ndarray:
        """Uniforms for counters 0..prod(size)-1 in C order."""
        n = int(np.prod(size))
        return self.uniform_at(frame_index, slot, np.arange(n, dtype=np.uint64)).reshape(size)

    def below(self, frame_index: int, slot: int, bound, size) -> np.ndarray:
        """Integers floor(u * bound) in [0, bound); bound may be an array."""
        return np.floor(self.uniform(frame_index, slot, size) * bound).astype(np.int64)

    def below_at(self, frame_index: int, slot: int, counters, bound) -> np.ndarray:
        return np.floor(self.uniform_at(frame_index, slot, counters) * bound).astype(np.int64)
