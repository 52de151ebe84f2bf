"""Residue number system decomposition and CRT reconstruction.

Big coefficients are never divided by the moduli on the production path:
each value is split into 16-bit limbs and folded through precomputed
2**(16*j) mod q_i tables (the same constants family the reduction module
precomputes), one dot product per channel.  Reconstruction is the
LUT form x = sum_i M_i * ((v_i * y_i) mod q_i) mod Q; the pairwise form
with inverses computed at call time is kept as the slow reference path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import perf
from .errors import BasisMismatch, OutOfRange
from .modinv import modinv_euclid
from .modred import reduce_folded
from .params import ModulusContext

_LIMB_BITS = 16
_LIMB_BYTES = 2


@dataclass
class ResidueVector:
    """Residues of one integer: values[i] in [0, q_i)."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return np.array_equal(self.values, other.values)


class RnsBasis:
    """k pairwise-coprime NTT-friendly moduli with CRT lookup constants."""

    def __init__(self, contexts: tuple):
        self.contexts = tuple(contexts)
        self.k = len(contexts)
        self.moduli = tuple(c.q for c in contexts)
        self.n = contexts[0].n
        self.Q = 1
        for q in self.moduli:
            self.Q *= q
        self.q_array = np.array(self.moduli, dtype=np.int64)
        self.q_col = self.q_array[:, None]
        # LUT constants: M_i = Q / q_i and y_i = M_i^-1 mod q_i.
        self.M = tuple(self.Q // q for q in self.moduli)
        self.y = tuple(
            modinv_euclid(M % q, q) for M, q in zip(self.M, self.moduli)
        )
        self.y_array = np.array(self.y, dtype=np.int64)
        self._pow_cache = None
        self._m_limbs = None
        self._twist = None
        self.validate()

    def validate(self) -> None:
        for M, y, q in zip(self.M, self.y, self.moduli):
            assert M * q == self.Q
            assert (M % q) * y % q == 1

    # -- limb machinery ----------------------------------------------------

    def _pow_table(self, n_limbs: int) -> np.ndarray:
        """pow[j, i] = 2**(16*j) mod q_i, for j < n_limbs."""
        if self._pow_cache is None or self._pow_cache.shape[0] < n_limbs:
            size = max(n_limbs, 8)
            tbl = np.empty((size, self.k), dtype=np.int64)
            step = 1 << _LIMB_BITS
            for i, q in enumerate(self.moduli):
                acc = 1 % q
                for j in range(size):
                    tbl[j, i] = acc
                    acc = acc * step % q
            tbl.setflags(write=False)
            self._pow_cache = tbl
        return self._pow_cache[:n_limbs]

    def _reconstruct_limbs(self):
        """Limbs of each M_i, padded with carry headroom."""
        if self._m_limbs is None:
            n_limbs = (self.Q.bit_length() + _LIMB_BITS - 1) // _LIMB_BITS
            width = n_limbs + 4
            arr = np.zeros((self.k, width), dtype=np.int64)
            for i, M in enumerate(self.M):
                raw = M.to_bytes(n_limbs * _LIMB_BYTES, "little")
                arr[i, :n_limbs] = np.frombuffer(raw, dtype="<u2").astype(np.int64)
            arr.setflags(write=False)
            self._m_limbs = arr
        return self._m_limbs

    def twist_tables(self):
        """Stacked psi / psi^-1*n^-1 tables for negacyclic transforms."""
        if self._twist is None:
            from .ntt import tables_for

            psi = np.stack([tables_for(c)["psi"] for c in self.contexts])
            psi_inv_n = np.stack([tables_for(c)["psi_inv_n"] for c in self.contexts])
            psi.setflags(write=False)
            psi_inv_n.setflags(write=False)
            self._twist = (psi, psi_inv_n)
        return self._twist

    def __eq__(self, other):
        return isinstance(other, RnsBasis) and self.moduli == other.moduli

    @classmethod
    def from_moduli(cls, moduli, n: int) -> "RnsBasis":
        return cls(tuple(ModulusContext.create(q, n) for q in moduli))


def _values_to_limbs(values, value_bits: int) -> np.ndarray:
    n_limbs = (value_bits + _LIMB_BITS - 1) // _LIMB_BITS
    nbytes = n_limbs * _LIMB_BYTES
    buf = b"".join(int(v).to_bytes(nbytes, "little") for v in values)
    arr = np.frombuffer(buf, dtype="<u2").astype(np.int64)
    return arr.reshape(len(values), n_limbs)


def decompose_batch(values, basis: RnsBasis, value_bits: int | None = None) -> np.ndarray:
    """Residues of many big integers at once: returns (k, len(values)) int64.

    Channel i of column j is values[j] mod q_i, computed by limb folding
    (partial sums stay below 2**54 for k*2**46, then one reduction).
    """
    if value_bits is None:
        value_bits = basis.Q.bit_length()
    limbs = _values_to_limbs(values, value_bits)
    tbl = basis._pow_table(limbs.shape[1])
    folded = limbs @ tbl  # (count, k); entries < n_limbs * 2**46
    out = (folded % basis.q_array).T
    perf.add("modmul", limbs.shape[1] * basis.k * len(values))
    perf.add("modadd", basis.k * len(values))
    return np.ascontiguousarray(out)


def reconstruct_batch(residues: np.ndarray, basis: RnsBasis) -> list:
    """CRT-combine (k, count) residues into `count` integers in [0, Q)."""
    k, count = residues.shape
    if k != basis.k:
        raise BasisMismatch(f"residue rows {k} != basis channels {basis.k}")
    weighted = (residues * basis.y_array[:, None]) % basis.q_col  # (k, count)
    m_limbs = basis._reconstruct_limbs()  # (k, width)
    sums = weighted.T @ m_limbs  # (count, width), entries < k * 2**46
    perf.add("modmul", k * count)
    perf.add("bigmul", k * count)
    perf.add("bigadd", k * count)
    # Carry-normalize to 16-bit limbs, then assemble bytes per row.
    while True:
        carry = sums >> _LIMB_BITS
        if not carry.any():
            break
        sums &= (1 << _LIMB_BITS) - 1
        sums[:, 1:] += carry[:, :-1]
    packed = sums.astype("<u2").tobytes()
    width = sums.shape[1] * _LIMB_BYTES
    Q = basis.Q
    return [
        int.from_bytes(packed[i * width : (i + 1) * width], "little") % Q
        for i in range(count)
    ]


# -- spec-level single-value operations ---------------------------------------

def rns_decompose(x: int, basis: RnsBasis, mode: str = "parallel") -> ResidueVector:
    """Residues of x under every channel; x must lie in [0, Q).

    Serial mode walks channels in index order, folding the limbs of x
    through each channel's power table and finishing with the folded
    Barrett reducer.  Parallel mode evaluates all channels as one batch
    (channels are independent); both modes produce identical output.
    """
    if not 0 <= x < basis.Q:
        raise OutOfRange(f"value has {x.bit_length()} bits, basis holds {basis.Q.bit_length()}")
    if mode == "parallel":
        return ResidueVector(decompose_batch([x], basis)[:, 0])
    if mode != "serial":
        raise ValueError(f"unknown mode {mode!r}")
    values = np.empty(basis.k, dtype=np.int64)
    for i, ctx in enumerate(basis.contexts):
        # Horner over chunks of kbits-1 bits keeps every intermediate below
        # 4**kbits, so the folded reducer handles each step directly.
        fold = ctx.folded
        w = max(1, fold.kbits - 1)
        mask = (1 << w) - 1
        nchunks = max(1, (x.bit_length() + w - 1) // w)
        acc = 0
        for j in range(nchunks - 1, -1, -1):
            acc = reduce_folded((acc << w) | ((x >> (j * w)) & mask), fold)
            perf.add("shift", 2)
        values[i] = acc
    return ResidueVector(values)


def crt_reconstruct_pairwise(v: ResidueVector, basis: RnsBasis) -> int:
    """Fold channels two at a time, computing each inverse at call time."""
    if len(v) != basis.k:
        raise BasisMismatch("vector length does not match basis")
    acc = int(v.values[0])
    mod = basis.moduli[0]
    for i in range(1, basis.k):
        q = basis.moduli[i]
        a2 = int(v.values[i])
        t1 = modinv_euclid(mod % q, q)       # mod^-1 (mod q)
        t2 = modinv_euclid(q % mod, mod)     # q^-1 (mod mod) -- grows big
        combined = (mod * t1 * a2 + q * t2 * acc) % (mod * q)
        perf.add("bigmul", 4)
        perf.add("bigadd", 1)
        acc = combined
        mod *= q
    return acc


def crt_reconstruct_lut(v: ResidueVector, basis: RnsBasis) -> int:
    """x = sum_i M_i * ((v_i * y_i) mod q_i) mod Q with precomputed M_i, y_i."""
    if len(v) != basis.k:
        raise BasisMismatch("vector length does not match basis")
    acc = 0
    for i in range(basis.k):
        w = int(v.values[i]) * basis.y[i] % basis.moduli[i]
        acc += basis.M[i] * w
        perf.add("modmul", 1)
        perf.add("bigmul", 1)
        perf.add("bigadd", 1)
    return acc % basis.Q
