"""Compiled inner loops (numba).

Everything here works on int64 arrays with residues below 2**31, so every
product fits in a signed 64-bit word.  Butterfly addressing uses shifts and
masks only; twiddle tables are precomputed by the callers.  rows = residue
channels (each with its own modulus) or gadget levels (sharing one modulus).
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _butterflies(row, tw, q, n):
    # Iterative Cooley-Tukey, decimation in time, input already bit-reversed.
    # Twiddle index is j << shift for the current stage: shift/add addressing.
    logn = 0
    nn = n
    while nn > 1:
        nn >>= 1
        logn += 1
    m = 1
    shift = logn
    while m < n:
        half = m
        m <<= 1
        shift -= 1
        for k in range(0, n, m):
            for j in range(half):
                w = tw[j << shift]
                lo = row[k + j]
                hi = (w * row[k + j + half]) % q
                row[k + j] = (lo + hi) % q
                row[k + j + half] = (lo + q - hi) % q


@njit(cache=True, parallel=True)
def ntt_rows_multi(data, tw, qs):
    """In-place butterflies for each row under its own modulus/table."""
    rows, n = data.shape
    for r in prange(rows):
        _butterflies(data[r], tw[r], qs[r], n)


@njit(cache=True, parallel=True)
def ntt_rows_single(data, tw, q):
    """In-place butterflies for many rows sharing one modulus/table."""
    rows, n = data.shape
    for r in prange(rows):
        _butterflies(data[r], tw, q, n)


@njit(cache=True, parallel=True)
def mac_levels(acc, keys, digits, q):
    """acc[m] = sum_i keys[i, m] * digits[i, m] mod q.

    keys may be int32 (storage form); digits and acc are int64.
    """
    levels, n = digits.shape
    block = 128
    nblocks = (n + block - 1) // block
    for b in prange(nblocks):
        lo = b * block
        hi = min(lo + block, n)
        for m in range(lo, hi):
            s = np.int64(0)
            for i in range(levels):
                s = (s + np.int64(keys[i, m]) * digits[i, m]) % q
            acc[m] = s


@njit(cache=True, parallel=True)
def reduction_sweep(q, r, k2, fold_shift, fold_constant, reduce_shift, r_folded, limit):
    """Compare Barrett and folded reduction against a % q for all a < limit.

    Returns (mismatches, max_barrett_corrections, max_folded_corrections).
    Only valid while q < 2**21 so a*r stays inside int64; the exhaustive
    acceptance sweep uses q < 2**12.
    """
    nchunks = 64
    chunk = (limit + nchunks - 1) // nchunks
    bad = 0
    max_cb = 0
    max_cf = 0
    mask = (np.int64(1) << fold_shift) - 1
    for c in prange(nchunks):
        lo = c * chunk
        hi = min(lo + chunk, limit)
        local_bad = 0
        local_cb = 0
        local_cf = 0
        for a in range(lo, hi):
            ref = a % q
            t = a - ((a * r) >> k2) * q
            cb = 0
            while t >= q:
                t -= q
                cb += 1
            folded = (a & mask) + (a >> fold_shift) * fold_constant
            tf = folded - ((folded * r_folded) >> reduce_shift) * q
            cf = 0
            if tf >= q:
                tf -= q
                cf = 1
            if t != ref or tf != ref:
                local_bad += 1
            if cb > local_cb:
                local_cb = cb
            if cf > local_cf:
                local_cf = cf
        bad += local_bad
        max_cb = max(max_cb, local_cb)
        max_cf = max(max_cf, local_cf)
    return bad, max_cb, max_cf


@njit(cache=True, parallel=True)
def inverse_scan_table(q):
    """Brute-force inverse table: smallest p with a*p = 1 mod q, per a."""
    out = np.zeros(q, dtype=np.int64)
    for a in prange(1, q):
        p = 1
        while (a * p) % q != 1:
            p += 1
        out[a] = p
    return out


@njit(cache=True, parallel=True)
def gcd_table_scan(limit):
    """Divisor-scan GCD oracle for all 1 <= a, b <= limit."""
    out = np.zeros((limit + 1, limit + 1), dtype=np.int64)
    for a in prange(1, limit + 1):
        for b in range(1, limit + 1):
            m = a if a < b else b
            g = 1
            for d in range(2, m + 1):
                if a % d == 0 and b % d == 0:
                    g = d
            out[a, b] = g
    return out


def warm_up():
    """Trigger compilation of every kernel on tiny inputs."""
    data = np.arange(8, dtype=np.int64).reshape(2, 4) % 5
    tw = np.ones(4, dtype=np.int64)
    qs = np.full(2, 5, dtype=np.int64)
    ntt_rows_multi(data.copy(), np.stack([tw, tw]), qs)
    ntt_rows_single(data.copy(), tw, np.int64(5))
    acc = np.zeros(4, dtype=np.int64)
    mac_levels(acc, data.astype(np.int32), data, np.int64(5))
    reduction_sweep(
        np.int64(5), np.int64(3), np.int64(6),
        np.int64(4), np.int64(1), np.int64(6), np.int64(12), np.int64(25),
    )
    inverse_scan_table(np.int64(7))
    gcd_table_scan(np.int64(4))
