"""Bitmask kernels for fermionic mode algebra.

Basis states are integers whose bit m is the occupation of mode m. The hot
loops (applying a creation/annihilation string to every basis state, and
classifying states by particle number) each come in two interchangeable
implementations: a numba-compiled one and a vectorized pure-numpy one.
Setting FLUXLAB_DISABLE_NUMBA=1 in the environment, or running without
numba installed, selects the numpy path at import time. Both paths return
identical arrays; ``bench/bench_kernels.py`` compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    _NUMBA_AVAILABLE = False

USING_NUMBA = _NUMBA_AVAILABLE and os.environ.get(
    "FLUXLAB_DISABLE_NUMBA", ""
) not in ("1", "true", "yes")


def op_string_action_numpy(
    n_states: int, modes: np.ndarray, daggers: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Apply a normal-ordered operator string to every basis state.

    ``modes[k]`` with flag ``daggers[k]`` is the k-th factor as written, so
    factors act right to left. Returns (src, dst, amp): surviving source
    states, the states they map to, and the accumulated sign, with the sign
    of each factor given by the parity of occupied modes below its target.
    """
    state = np.arange(n_states, dtype=np.int64)
    src = np.arange(n_states, dtype=np.int64)
    amp = np.ones(n_states, dtype=np.int8)
    for k in range(len(modes) - 1, -1, -1):
        m = int(modes[k])
        bit = (state >> m) & 1
        keep = (bit == 0) if daggers[k] else (bit == 1)
        state, src, amp = state[keep], src[keep], amp[keep]
        below = (state & ((1 << m) - 1)).astype(np.uint64)
        odd = (np.bitwise_count(below) & 1).astype(bool)
        amp = np.where(odd, -amp, amp).astype(np.int8)
        state = state ^ (1 << m)
    return src, state, amp


def sector_counts_numpy(
    n_states: int, n_modes: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-state counts of occupied even modes and odd modes."""
    states = np.arange(n_states, dtype=np.uint64)
    even_mask = np.uint64(sum(1 << m for m in range(0, n_modes, 2)))
    odd_mask = np.uint64(sum(1 << m for m in range(1, n_modes, 2)))
    n_even = np.bitwise_count(states & even_mask).astype(np.int64)
    n_odd = np.bitwise_count(states & odd_mask).astype(np.int64)
    return n_even, n_odd


if _NUMBA_AVAILABLE:

    @njit(cache=True, nogil=True)
    def _popcount64(x: int) -> int:
        # SWAR popcount; exact for nonnegative x below 2**56.
        x = x - ((x >> 1) & 0x5555555555555555)
        x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
        x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
        return (x * 0x0101010101010101) >> 56

    @njit(cache=True, nogil=True)
    def op_string_action_numba(n_states, modes, daggers):
        n_ops = modes.shape[0]
        src = np.empty(n_states, np.int64)
        dst = np.empty(n_states, np.int64)
        amp = np.empty(n_states, np.int8)
        count = 0
        for s in range(n_states):
            t = s
            sign = 1
            alive = True
            for k in range(n_ops - 1, -1, -1):
                m = modes[k]
                occupied = (t >> m) & 1
                if daggers[k]:
                    if occupied == 1:
                        alive = False
                        break
                else:
                    if occupied == 0:
                        alive = False
                        break
                if _popcount64(t & ((1 << m) - 1)) & 1:
                    sign = -sign
                t ^= 1 << m
            if alive:
                src[count] = s
                dst[count] = t
                amp[count] = sign
                count += 1
        return src[:count], dst[:count], amp[:count]

    @njit(cache=True, nogil=True)
    def sector_counts_numba(n_states, n_modes):
        even_mask = 0
        odd_mask = 0
        for m in range(0, n_modes, 2):
            even_mask |= 1 << m
        for m in range(1, n_modes, 2):
            odd_mask |= 1 << m
        n_even = np.empty(n_states, np.int64)
        n_odd = np.empty(n_states, np.int64)
        for s in range(n_states):
            n_even[s] = _popcount64(s & even_mask)
            n_odd[s] = _popcount64(s & odd_mask)
        return n_even, n_odd


if USING_NUMBA:
    op_string_action = op_string_action_numba
    sector_counts = sector_counts_numba
else:
    op_string_action = op_string_action_numpy
    sector_counts = sector_counts_numpy
