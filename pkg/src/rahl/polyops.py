"""Polynomials over an RNS basis: component-wise addition, conditional-select
scalar multiplication, and nearest-binary scalar division.

An RnsPolynomial keeps its k residue channels as one (k, n) array so the
batched transforms can run across all channels at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import perf
from .errors import BasisMismatch, DomainMismatch, NonBinaryMessage, OutOfRange
from .ntt import COEFF, NTT, transform_rows
from .residue import RnsBasis

_FINGERPRINT_NONE = b""


@dataclass
class RnsPolynomial:
    data: np.ndarray           # (k, n) int64, channel-major
    basis: RnsBasis
    domain: str = COEFF
    fingerprint: bytes = _FINGERPRINT_NONE

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.int64)
        if self.data.shape != (self.basis.k, self.basis.n):
            raise BasisMismatch(
                f"data shape {self.data.shape} != (k={self.basis.k}, n={self.basis.n})"
            )

    @classmethod
    def zero(cls, basis: RnsBasis, domain: str = COEFF) -> "RnsPolynomial":
        return cls(np.zeros((basis.k, basis.n), dtype=np.int64), basis, domain)

    def copy(self) -> "RnsPolynomial":
        return RnsPolynomial(self.data.copy(), self.basis, self.domain, self.fingerprint)

    def validate(self) -> None:
        assert np.all(self.data >= 0)
        assert np.all(self.data < self.basis.q_col)


def _check_pair(a: RnsPolynomial, b: RnsPolynomial) -> None:
    if a.basis != b.basis:
        raise BasisMismatch("operands built over different bases")
    if a.domain != b.domain:
        raise DomainMismatch(f"operand domains differ: {a.domain} vs {b.domain}")


def poly_add(a: RnsPolynomial, b: RnsPolynomial) -> RnsPolynomial:
    """Channel-wise (a + b) mod q_i; valid in either domain."""
    _check_pair(a, b)
    out = a.data + b.data
    np.subtract(out, a.basis.q_col, out=out, where=out >= a.basis.q_col)
    perf.add("modadd", a.basis.k * a.basis.n)
    return RnsPolynomial(out, a.basis, a.domain, a.fingerprint)


def poly_sub(a: RnsPolynomial, b: RnsPolynomial) -> RnsPolynomial:
    """Channel-wise (a - b) mod q_i."""
    _check_pair(a, b)
    out = a.data - b.data
    np.add(out, a.basis.q_col, out=out, where=out < 0)
    perf.add("modadd", a.basis.k * a.basis.n)
    return RnsPolynomial(out, a.basis, a.domain, a.fingerprint)


def poly_neg(a: RnsPolynomial) -> RnsPolynomial:
    out = (a.basis.q_col - a.data) % a.basis.q_col
    perf.add("modadd", a.basis.k * a.basis.n)
    return RnsPolynomial(out, a.basis, a.domain, a.fingerprint)


def scalar_mul_binary(m, value: int) -> list:
    """Integer polynomial value*m for a bit vector m, by conditional select.

    No multiplier runs: out[j] is `value` where m[j] = 1 and 0 elsewhere.
    The caller RNS-decomposes the result.
    """
    bits = np.asarray(m, dtype=np.int64)
    if np.any((bits != 0) & (bits != 1)):
        raise NonBinaryMessage("message vector must be 0/1")
    perf.add("select", len(bits))
    return [value if b else 0 for b in bits]


def nearest_binary(u: int, delta: int, q_total: int | None = None) -> int:
    """1 if u is nearer delta than 0/2*delta: |u - delta| < delta/2 (strict).

    Comparison only; delta/2 is a single right shift (floor for odd delta).
    """
    if u < 0 or (q_total is not None and u >= q_total):
        raise OutOfRange("u outside [0, Q)")
    half = delta >> 1
    perf.add("shift", 1)
    dist = u - delta if u >= delta else delta - u
    return 1 if dist < half else 0


# -- negacyclic multiplication across all channels -----------------------------

def to_twisted_ntt(a: RnsPolynomial) -> RnsPolynomial:
    """psi-twist then forward-transform every channel."""
    if a.domain != COEFF:
        raise DomainMismatch("already transformed")
    psi, _ = a.basis.twist_tables()
    data = a.data * psi % a.basis.q_col
    perf.add("modmul", a.basis.k * a.basis.n)
    data = transform_rows(data, a.basis.contexts, inverse=False)
    return RnsPolynomial(data, a.basis, NTT, a.fingerprint)


def from_twisted_ntt(a: RnsPolynomial) -> RnsPolynomial:
    """Inverse-transform then apply the combined psi^-k * n^-1 post-twist."""
    if a.domain != NTT:
        raise DomainMismatch("not in the ntt domain")
    _, psi_inv_n = a.basis.twist_tables()
    data = transform_rows(a.data.copy(), a.basis.contexts, inverse=True, scale=False)
    data = data * psi_inv_n % a.basis.q_col
    perf.add("modmul", a.basis.k * a.basis.n)
    return RnsPolynomial(data, a.basis, COEFF, a.fingerprint)


def pointwise_mul(a: RnsPolynomial, b: RnsPolynomial) -> RnsPolynomial:
    _check_pair(a, b)
    if a.domain != NTT:
        raise DomainMismatch("pointwise product needs ntt-domain operands")
    out = a.data * b.data % a.basis.q_col
    perf.add("modmul", a.basis.k * a.basis.n)
    return RnsPolynomial(out, a.basis, NTT, a.fingerprint)


def pointwise_mac(acc: RnsPolynomial, a: RnsPolynomial, b: RnsPolynomial) -> RnsPolynomial:
    out = (acc.data + a.data * b.data) % acc.basis.q_col
    perf.add("modmul", acc.basis.k * acc.basis.n)
    perf.add("modadd", acc.basis.k * acc.basis.n)
    return RnsPolynomial(out, acc.basis, acc.domain, acc.fingerprint)


def negacyclic_multiply_rns(a: RnsPolynomial, b: RnsPolynomial) -> RnsPolynomial:
    """a * b mod (x^n + 1) on every channel at once."""
    return from_twisted_ntt(pointwise_mul(to_twisted_ntt(a), to_twisted_ntt(b)))
