"""Negacyclic number-theoretic transforms.

Forward/inverse NTT per residue channel plus polynomial multiplication in
Z_q[x]/(x^n + 1): operands are pre-scaled by powers of the 2n-th root psi,
transformed with the n-th root omega, multiplied pointwise, and inverse
transformed with the n^-1 scaling folded into the psi^-k post-twist (so a
full multiplication spends exactly 3*(n/2)*log2(n) + 4n modular
multiplications).

Butterfly and twiddle addressing use shifts and xors only; the bit-reversal
permutation is generated by an xor-driven increment and applied on input
(decimation in time).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import perf
from ._kernels import ntt_rows_multi, ntt_rows_single
from .errors import ChannelMismatch, DomainMismatch, InvalidDegree
from .params import ModulusContext, is_power_of_two

COEFF = "coeff"
NTT = "ntt"


def bit_reverse_permutation(n: int) -> np.ndarray:
    """Index permutation by xor-driven reverse increment (shift/xor only)."""
    perm = np.zeros(n, dtype=np.int64)
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j ^= bit
        perm[i] = j
    return perm


def _powers(base: int, count: int, q: int) -> np.ndarray:
    out = np.empty(count, dtype=np.int64)
    acc = 1
    for i in range(count):
        out[i] = acc
        acc = acc * base % q
    return out


def tables_for(ctx: ModulusContext) -> dict:
    """Twiddle/permutation tables for one modulus, cached on the context."""
    tbl = ctx._tables
    if "fwd" not in tbl:
        n, q = ctx.n, ctx.q
        tbl["perm"] = bit_reverse_permutation(n)
        tbl["fwd"] = _powers(ctx.omega, max(n // 2, 1), q)
        tbl["inv"] = _powers(ctx.omega_inv, max(n // 2, 1), q)
        tbl["psi"] = _powers(ctx.psi, n, q)
        psi_inv = _powers(ctx.psi_inv, n, q)
        tbl["psi_inv_n"] = psi_inv * ctx.n_inv % q
        for arr in tbl.values():
            arr.setflags(write=False)
    return tbl


@dataclass
class ChannelPolynomial:
    """One residue channel: n coefficients below q, tagged with its domain."""

    coeffs: np.ndarray
    ctx: ModulusContext
    domain: str = COEFF

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int64)
        if len(self.coeffs) != self.ctx.n:
            raise InvalidDegree(f"expected {self.ctx.n} coefficients")
        if not is_power_of_two(len(self.coeffs)):
            raise InvalidDegree("length must be a power of two")
        if np.any(self.coeffs < 0) or np.any(self.coeffs >= self.ctx.q):
            raise ChannelMismatch("coefficients outside [0, q)")


def _check_ctx(p: ChannelPolynomial, ctx: ModulusContext | None) -> ModulusContext:
    if ctx is not None and ctx.q != p.ctx.q:
        raise ChannelMismatch(f"polynomial is mod {p.ctx.q}, context is mod {ctx.q}")
    return p.ctx


def ntt_forward(p: ChannelPolynomial, ctx: ModulusContext | None = None) -> ChannelPolynomial:
    """Evaluate X_i = sum_k x_k * omega**(i*k) mod q for all i."""
    ctx = _check_ctx(p, ctx)
    if p.domain != COEFF:
        raise DomainMismatch("input is already in the ntt domain")
    out = transform_rows(p.coeffs[None, :].copy(), [ctx], inverse=False)
    return ChannelPolynomial(out[0], ctx, NTT)


def ntt_inverse(p: ChannelPolynomial, ctx: ModulusContext | None = None) -> ChannelPolynomial:
    """Inverse transform: omega replaced by omega**-1, then scaled by n**-1."""
    ctx = _check_ctx(p, ctx)
    if p.domain != NTT:
        raise DomainMismatch("input is not in the ntt domain")
    out = transform_rows(p.coeffs[None, :].copy(), [ctx], inverse=True)
    return ChannelPolynomial(out[0], ctx, COEFF)


def negacyclic_multiply(
    a: ChannelPolynomial, b: ChannelPolynomial, ctx: ModulusContext | None = None
) -> ChannelPolynomial:
    """a * b mod (x^n + 1, q) via psi-twisted transforms."""
    ctx = _check_ctx(a, ctx)
    if b.ctx.q != ctx.q:
        raise ChannelMismatch(f"operands in different channels: {ctx.q} vs {b.ctx.q}")
    if a.domain != COEFF or b.domain != COEFF:
        raise DomainMismatch("negacyclic multiply expects coefficient-domain inputs")
    tbl = tables_for(ctx)
    q, n = ctx.q, ctx.n
    at = a.coeffs * tbl["psi"] % q
    bt = b.coeffs * tbl["psi"] % q
    perf.add("modmul", 2 * n)
    ah = transform_rows(at[None, :], [ctx], inverse=False)[0]
    bh = transform_rows(bt[None, :], [ctx], inverse=False)[0]
    ch = ah * bh % q
    perf.add("modmul", n)
    c = transform_rows(ch[None, :], [ctx], inverse=True, scale=False)[0]
    c = c * tbl["psi_inv_n"] % q
    perf.add("modmul", n)
    return ChannelPolynomial(c, ctx, COEFF)


# -- batched forms (rows = channels) ------------------------------------------

def transform_rows(data, ctxs, inverse: bool, scale: bool = True) -> np.ndarray:
    """Transform each row of `data` under the matching context, in place
    after the bit-reversal gather; returns the transformed array.

    With `inverse` and not `scale`, the n**-1 factor is left out so callers
    can fold it into a combined post-twist table.
    """
    data = np.ascontiguousarray(data, dtype=np.int64)
    rows, n = data.shape
    if n == 1:
        return data
    first = tables_for(ctxs[0])
    perm = first["perm"]
    data[:] = data[:, perm]
    key = "inv" if inverse else "fwd"
    if rows == 1:
        ntt_rows_single(data, tables_for(ctxs[0])[key], np.int64(ctxs[0].q))
    else:
        tw = np.stack([tables_for(c)[key] for c in ctxs])
        qs = np.array([c.q for c in ctxs], dtype=np.int64)
        ntt_rows_multi(data, tw, qs)
    logn = n.bit_length() - 1
    perf.add("modmul", rows * (n // 2) * logn)
    perf.add("modadd", rows * n * logn)
    if inverse and scale:
        for r, c in enumerate(ctxs):
            data[r] = data[r] * c.n_inv % c.q
        perf.add("modmul", rows * n)
    return data


def transform_levels(data: np.ndarray, ctx: ModulusContext, inverse: bool = False) -> np.ndarray:
    """Transform every row of `data` under a single modulus (gadget levels)."""
    rows, n = data.shape
    if n == 1:
        return data
    tbl = tables_for(ctx)
    data[:] = data[:, tbl["perm"]]
    ntt_rows_single(data, tbl["inv" if inverse else "fwd"], np.int64(ctx.q))
    logn = n.bit_length() - 1
    perf.add("modmul", rows * (n // 2) * logn)
    perf.add("modadd", rows * n * logn)
    return data
