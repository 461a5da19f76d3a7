# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fidelity kernels; drop-in replacements for the _pure versions.

Branches are grouped per trial with an open-addressing table. The
bucket-brigade kernel keys groups by a pair of independent 64-bit chain
hashes of the per-element node states (collision odds are ~2^-128 per
pair); the fanout kernel keys by the masked address itself, which is exact.
"""

import numpy as np


cdef inline unsigned long long _mix(unsigned long long x) noexcept nogil:
    x += 0x9E3779B97F4A7C15ULL
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL
    return x ^ (x >> 31)


def bb_set_fidelities(addresses, weights, int n, levels, indices, offsets):
    """See qramsim._kernels._pure.bb_set_fidelities."""
    cdef long long[::1] addr = np.ascontiguousarray(addresses, dtype=np.int64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef long long[::1] lev = np.ascontiguousarray(levels, dtype=np.int64)
    cdef long long[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t r = addr.shape[0]
    cdef Py_ssize_t trials = off.shape[0] - 1

    out_arr = np.empty(trials, dtype=np.float64)
    cdef double[::1] out = out_arr

    cdef Py_ssize_t tab = 8
    while tab < 2 * r:
        tab <<= 1
    cdef unsigned long long tmask = <unsigned long long> (tab - 1)

    key1_arr = np.zeros(tab, dtype=np.uint64)
    key2_arr = np.zeros(tab, dtype=np.uint64)
    wsum_arr = np.zeros(tab, dtype=np.float64)
    stamp_arr = np.full(tab, -1, dtype=np.int64)
    touched_arr = np.zeros(tab, dtype=np.int64)
    cdef unsigned long long[::1] key1 = key1_arr
    cdef unsigned long long[::1] key2 = key2_arr
    cdef double[::1] wsum = wsum_arr
    cdef long long[::1] stamp = stamp_arr
    cdef long long[::1] touched = touched_arr

    cdef double total = 0.0
    cdef Py_ssize_t j
    for j in range(r):
        total += w[j]
    cdef double full = total * total

    cdef Py_ssize_t t, e, m, ntouched, slot
    cdef unsigned long long a, h1, h2, state
    cdef long long k, i
    cdef double f, gw
    with nogil:
        for t in range(trials):
            if off[t + 1] == off[t]:
                out[t] = full
                continue
            ntouched = 0
            for j in range(r):
                a = <unsigned long long> addr[j]
                h1 = 0xCBF29CE484222325ULL
                h2 = 0x27D4EB2F165667C5ULL
                for e in range(off[t], off[t + 1]):
                    k = lev[e]
                    i = idx[e]
                    if (a >> (n - k)) == <unsigned long long> i:
                        state = 1 + ((a >> (n - 1 - k)) & 1)
                    else:
                        state = 0
                    h1 = (h1 ^ (state + 1)) * 0x100000001B3ULL
                    h2 = (h2 ^ (state + 1)) * 0xC2B2AE3D27D4EB4FULL
                slot = <Py_ssize_t> (_mix(h1 ^ h2) & tmask)
                while True:
                    if stamp[slot] != <long long> t:
                        stamp[slot] = <long long> t
                        key1[slot] = h1
                        key2[slot] = h2
                        wsum[slot] = w[j]
                        touched[ntouched] = <long long> slot
                        ntouched += 1
                        break
                    elif key1[slot] == h1 and key2[slot] == h2:
                        wsum[slot] += w[j]
                        break
                    slot = <Py_ssize_t> ((<unsigned long long> slot + 1) & tmask)
            f = 0.0
            for m in range(ntouched):
                gw = wsum[touched[m]]
                f += gw * gw
            out[t] = f
    return out_arr


def fanout_set_fidelities(addresses, weights, int n, masks):
    """See qramsim._kernels._pure.fanout_set_fidelities."""
    cdef long long[::1] addr = np.ascontiguousarray(addresses, dtype=np.int64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef long long[::1] msk = np.ascontiguousarray(masks, dtype=np.int64)
    cdef Py_ssize_t r = addr.shape[0]
    cdef Py_ssize_t trials = msk.shape[0]

    out_arr = np.empty(trials, dtype=np.float64)
    cdef double[::1] out = out_arr

    cdef Py_ssize_t tab = 8
    while tab < 2 * r:
        tab <<= 1
    cdef unsigned long long tmask = <unsigned long long> (tab - 1)

    key_arr = np.zeros(tab, dtype=np.uint64)
    wsum_arr = np.zeros(tab, dtype=np.float64)
    stamp_arr = np.full(tab, -1, dtype=np.int64)
    touched_arr = np.zeros(tab, dtype=np.int64)
    cdef unsigned long long[::1] key = key_arr
    cdef double[::1] wsum = wsum_arr
    cdef long long[::1] stamp = stamp_arr
    cdef long long[::1] touched = touched_arr

    cdef Py_ssize_t t, j, m, ntouched, slot
    cdef unsigned long long a, mask_t
    cdef double f, gw
    with nogil:
        for t in range(trials):
            mask_t = <unsigned long long> msk[t]
            ntouched = 0
            for j in range(r):
                a = (<unsigned long long> addr[j]) & mask_t
                slot = <Py_ssize_t> (_mix(a) & tmask)
                while True:
                    if stamp[slot] != <long long> t:
                        stamp[slot] = <long long> t
                        key[slot] = a
                        wsum[slot] = w[j]
                        touched[ntouched] = <long long> slot
                        ntouched += 1
                        break
                    elif key[slot] == a:
                        wsum[slot] += w[j]
                        break
                    slot = <Py_ssize_t> ((<unsigned long long> slot + 1) & tmask)
            f = 0.0
            for m in range(ntouched):
                gw = wsum[touched[m]]
                f += gw * gw
            out[t] = f
    return out_arr
