"""Counter-based SplitMix64 generator.

Draw ``k`` (1-based) of the stream seeded with ``s`` is::

    mix64((s + k * GAMMA) mod 2**64)

where ``mix64`` is the SplitMix64 finalizer (Steele, Lea & Flood 2014)::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

Uniform doubles take the top 53 bits: ``(mix64(...) >> 11) * 2**-53``.
Because the state advances by a constant, any window of a stream can be
computed directly, which is what the vectorized paths rely on.

Per-trial seeds: ``derive_seed(master, i) = mix64(mix64(master) + i * GAMMA_TRIAL)``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
GAMMA_TRIAL = 0xD1B54A32D192ED03
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB
TO_UNIT = 2.0**-53


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    return mix64(mix64(master_seed) + index * GAMMA_TRIAL)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MUL2)
    return z ^ (z >> np.uint64(31))


def raw_block(seed: int, start: int, count: int) -> np.ndarray:
    """64-bit outputs ``start+1 .. start+count`` of the stream seeded with ``seed``."""
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = np.uint64(seed & MASK64) + k * np.uint64(GAMMA)
        return _mix64_array(state)


def uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    return (raw_block(seed, start, count) >> np.uint64(11)).astype(np.float64) * TO_UNIT


def uniform_matrix(seeds: np.ndarray, count: int) -> np.ndarray:
    """Row ``r`` holds uniforms ``1..count`` of the stream seeded with ``seeds[r]``."""
    k = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = np.asarray(seeds, dtype=np.uint64)[:, None] + k[None, :] * np.uint64(GAMMA)
        z = _mix64_array(state)
    return (z >> np.uint64(11)).astype(np.float64) * TO_UNIT


class SplitMix64:
    """Sequential view of one stream; buffers draws in blocks."""

    BLOCK = 4096

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.position = 0
        self._buf = np.empty(0)
        self._i = 0

    def uniform(self) -> float:
        if self._i == len(self._buf):
            self._buf = uniform_block(self.seed, self.position, self.BLOCK).tolist()
            self.position += self.BLOCK
            self._i = 0
        u = self._buf[self._i]
        self._i += 1
        return u
