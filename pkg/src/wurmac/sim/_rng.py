"""Deterministic 64-bit RNG shared by the pure-Python and compiled kernels.

splitmix64 keeps the two backends bit-for-bit identical: the compiled kernel
re-implements exactly these operations on uint64, so a trial produces the
same stream regardless of backend. One master seed fans out to per-trial
sub-seeds through the same mixing function, which keeps trials independent
and the whole run reproducible from a single integer.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_U53 = 1.0 / (1 << 53)


def mix64(x: int) -> int:
    """splitmix64 output mixing of a 64-bit value."""
    z = x & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def trial_seed(master_seed: int, index: int) -> int:
    """Sub-seed of the index-th trial: the (index+1)-th splitmix64 output of the master."""
    return mix64((master_seed + (index + 1) * _GAMMA) & _MASK)


def scenario_seed(master_seed: int, scenario_id: str) -> int:
    """Per-scenario seed derived from the master seed and a scenario label."""
    h = 0xCBF29CE484222325  # FNV-1a over the label bytes
    for b in scenario_id.encode():
        h = ((h ^ b) * 0x100000001B3) & _MASK
    return mix64((master_seed ^ h) & _MASK)


class SplitMix64:
    """splitmix64 stream; uniform doubles use the top 53 bits."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return mix64(self._state)

    def uniform01(self) -> float:
        return (self.next_u64() >> 11) * _U53

    def randbelow(self, n: int) -> int:
        # rejection keeps the draw exactly uniform on {0, ..., n-1}
        threshold = ((1 << 64) - n) % n
        while True:
            u = self.next_u64()
            if u >= threshold:
                return u % n


def poisson_capped(rng: SplitMix64, floor: float, cap: int) -> int:
    """min(Poisson, cap) by multiplicative inversion; floor = exp(-mu) is precomputed
    so both kernels compare against the identical constant."""
    k = 0
    p = 1.0
    while True:
        p *= rng.uniform01()
        if p <= floor:
            return k
        k += 1
        if k >= cap:
            return cap
