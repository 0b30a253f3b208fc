# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled batch kernel. Bit-for-bit transliteration of _pykernel.run_trials:
identical splitmix64 stream, identical draw order, identical accumulation
order, so both backends return byte-identical arrays for the same seed."""

from libc.stdint cimport uint64_t

import numpy as np


cdef uint64_t _GAMMA = 0x9E3779B97F4A7C15U
cdef double _U53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9U
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBU
    return z ^ (z >> 31)


cdef inline uint64_t _next_u64(uint64_t* state) noexcept nogil:
    state[0] = state[0] + _GAMMA
    return _mix64(state[0])


cdef inline double _uniform01(uint64_t* state) noexcept nogil:
    return <double>(_next_u64(state) >> 11) * _U53


cdef inline uint64_t _randbelow(uint64_t* state, uint64_t n) noexcept nogil:
    cdef uint64_t threshold = (<uint64_t>0 - n) % n
    cdef uint64_t u
    while True:
        u = _next_u64(state)
        if u >= threshold:
            return u % n


cdef inline int _poisson_capped(uint64_t* state, double floor, int cap) noexcept nogil:
    cdef int k = 0
    cdef double p = 1.0
    while True:
        p *= _uniform01(state)
        if p <= floor:
            return k
        k += 1
        if k >= cap:
            return cap


def run_trials(int n, int cap, int p_slots, double alpha, double mu_q,
               double poisson_floor, const double[::1] e_pull_pos, double e_attempt,
               double e_idle, double e_frame_const, int t_obs, int record_from,
               int n_trials, unsigned long long master_seed):
    out_arr = np.empty((n_trials, 7))
    alarmed_arr = np.zeros(n, dtype=np.uint8)
    start_arr = np.zeros(n, dtype=np.uint8)
    ids_arr = np.zeros(n, dtype=np.int32)
    slot_arr = np.zeros(n, dtype=np.int32)
    occ_arr = np.zeros(max(p_slots, 1), dtype=np.int32)

    cdef double[:, ::1] out = out_arr
    cdef unsigned char[::1] alarmed = alarmed_arr
    cdef unsigned char[::1] start = start_arr
    cdef int[::1] ids = ids_arr
    cdef int[::1] slot_of = slot_arr
    cdef int[::1] occ = occ_arr

    cdef uint64_t state
    cdef int idx, t, node, m, r, pos, sl
    cdef int na_start, q, u, j, served, k, s_succ, tmp
    cdef double e1, e2, e3
    cdef double acc0, acc1, acc2, acc3, acc4, acc5, acc6
    cdef int total_frames = record_from + t_obs

    for idx in range(n_trials):
        state = _mix64(master_seed + (<uint64_t>idx + 1) * _GAMMA)
        for node in range(n):
            alarmed[node] = 0
            ids[node] = node
        acc0 = acc1 = acc2 = acc3 = acc4 = acc5 = acc6 = 0.0

        for t in range(total_frames):
            for node in range(n):
                start[node] = alarmed[node]
            na_start = 0
            for node in range(n):
                if start[node]:
                    na_start += 1

            if mu_q > 0.0:
                q = _poisson_capped(&state, poisson_floor, n)
            else:
                q = 0
            for m in range(q):
                r = m + <int>_randbelow(&state, <uint64_t>(n - m))
                tmp = ids[m]
                ids[m] = ids[r]
                ids[r] = tmp

            u = q if q < cap else cap
            e1 = e_frame_const
            j = 0
            for pos in range(u):
                e1 = e1 + e_pull_pos[pos]
                node = ids[pos]
                if alarmed[node]:
                    j += 1
                    alarmed[node] = 0
            served = u - j

            k = na_start - j
            s_succ = 0
            if p_slots >= 1:
                for sl in range(p_slots):
                    occ[sl] = 0
                for node in range(n):
                    if alarmed[node]:
                        sl = <int>_randbelow(&state, <uint64_t>p_slots)
                        slot_of[node] = sl
                        occ[sl] += 1
                for node in range(n):
                    if alarmed[node] and occ[slot_of[node]] == 1:
                        s_succ += 1
                        alarmed[node] = 0
                e2 = k * e_attempt
            else:
                e2 = 0.0

            e3 = (n - u - k) * e_idle

            if alpha > 0.0:
                for node in range(n):
                    if not start[node]:
                        if _uniform01(&state) < alpha:
                            alarmed[node] = 1

            if t >= record_from:
                if na_start > 0:
                    acc0 += (<double>(j + s_succ)) / na_start
                else:
                    acc0 += 1.0
                if q > 0:
                    acc1 += (<double>served) / q
                acc2 += e1
                acc3 += e2
                acc4 += e3
                acc5 += e1 + e2 + e3
                acc6 += na_start

        out[idx, 0] = acc0 / t_obs
        out[idx, 1] = acc1 / t_obs
        out[idx, 2] = acc2 / t_obs
        out[idx, 3] = acc3 / t_obs
        out[idx, 4] = acc4 / t_obs
        out[idx, 5] = acc5 / t_obs
        out[idx, 6] = acc6 / t_obs

    return out_arr
