"""Pure-Python trial kernel: the readable reference the compiled kernel mirrors.

One frame, in protocol order:

  1. queries arrive: q = min(Poisson(mu_q), N); q distinct node ids are drawn
     by partial shuffle, the first min(q, cap) of them get pulled in order
  2. pulled alarmed nodes deliver their alarm and leave the alarm state; the
     query that woke them is not served (the alarm preempts the reply)
  3. the remaining alarmed nodes each pick one of P push slots uniformly;
     a slot with exactly one transmitter delivers, the rest retry next frame
  4. energy is charged per node case
  5. every node that was quiet at the frame start raises an alarm for the
     next frame with probability alpha

The RNG consumption order (poisson, shuffle swaps, slot picks by node id,
alarm draws by node id) is part of the backend contract: the compiled kernel
replays it exactly, so both produce bit-identical trials for a given seed.
"""

from __future__ import annotations

from ._params import KernelParams
from ._rng import SplitMix64, poisson_capped, trial_seed

import numpy as np

# run_trials result columns (per-trial means over the recorded window)
COLUMNS = ("p_a", "p_q", "e1_j", "e2_j", "e3_j", "e_total_j", "n_a")


def _step(kp: KernelParams, rng: SplitMix64, alarmed: bytearray, start_alarmed: bytearray,
          ids: list, slot_of: list, occ: list):
    """Advance one frame in place; returns the frame's counters and energies."""
    n = kp.n
    start_alarmed[:] = alarmed
    na_start = sum(start_alarmed)

    q = poisson_capped(rng, kp.poisson_floor, n) if kp.mu_q > 0.0 else 0
    for m in range(q):
        r = m + rng.randbelow(n - m)
        ids[m], ids[r] = ids[r], ids[m]

    u = q if q < kp.cap else kp.cap
    e1 = kp.e_frame_const
    j = 0
    for pos in range(u):
        e1 += kp.e_pull_pos[pos]
        node = ids[pos]
        if alarmed[node]:
            j += 1
            alarmed[node] = 0
    served = u - j

    k = na_start - j
    s_succ = 0
    collided_slots = 0
    if kp.p_slots >= 1:
        p_slots = kp.p_slots
        for sl in range(p_slots):
            occ[sl] = 0
        for node in range(n):
            if alarmed[node]:
                sl = rng.randbelow(p_slots)
                slot_of[node] = sl
                occ[sl] += 1
        for node in range(n):
            if alarmed[node] and occ[slot_of[node]] == 1:
                s_succ += 1
                alarmed[node] = 0
        collided_slots = sum(1 for sl in range(p_slots) if occ[sl] >= 2)
        e2 = k * kp.e_attempt
    else:
        e2 = 0.0

    idle = n - u - k
    e3 = idle * kp.e_idle

    if kp.alpha > 0.0:
        for node in range(n):
            if not start_alarmed[node]:
                if rng.uniform01() < kp.alpha:
                    alarmed[node] = 1

    return na_start, q, u, j, served, k, s_succ, collided_slots, idle, e1, e2, e3


def run_trials(kp: KernelParams, t_obs: int, record_from: int, n_trials: int,
               master_seed: int) -> np.ndarray:
    """Batch of independent trials; row i holds the COLUMNS means of trial i."""
    out = np.empty((n_trials, len(COLUMNS)))
    n = kp.n
    for idx in range(n_trials):
        rng = SplitMix64(trial_seed(master_seed, idx))
        alarmed = bytearray(n)
        start_alarmed = bytearray(n)
        ids = list(range(n))
        slot_of = [0] * n
        occ = [0] * max(kp.p_slots, 1)
        acc = [0.0] * 7
        for t in range(record_from + t_obs):
            (na_start, q, _u, j, served, _k, s_succ, _c, _idle,
             e1, e2, e3) = _step(kp, rng, alarmed, start_alarmed, ids, slot_of, occ)
            if t >= record_from:
                acc[0] += (j + s_succ) / na_start if na_start > 0 else 1.0
                acc[1] += served / q if q > 0 else 0.0
                acc[2] += e1
                acc[3] += e2
                acc[4] += e3
                acc[5] += e1 + e2 + e3
                acc[6] += na_start
        for col in range(7):
            out[idx, col] = acc[col] / t_obs
    return out
