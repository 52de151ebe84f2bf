"""The FV scheme over an RNS basis: key generation, encryption, decryption of
degree-1/2 ciphertexts, homomorphic add/multiply, noise measurement, and the
serialization container shared by every artifact the CLI writes.

Homomorphic multiplication computes the three tensor products as exact
integer negacyclic convolutions by evaluating over an extended NTT-friendly
prime basis whose product dominates 4*n*Q**2, then rescales every
coefficient x to round(t*x/Q) mod Q and re-decomposes into the working
basis.  (The unscaled per-channel product is retained behind
`paper_literal=True` for operation counting only; its output does not
decrypt.)
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from . import perf
from .errors import (
    DegreeMismatch,
    FormatError,
    NonBinaryMessage,
    ParameterMismatch,
)
from .ntt import COEFF
from .params import ParameterSet
from .polyops import (
    RnsPolynomial,
    from_twisted_ntt,
    nearest_binary,
    poly_add,
    poly_neg,
    pointwise_mul,
    scalar_mul_binary,
    to_twisted_ntt,
)
from .residue import RnsBasis, decompose_batch, reconstruct_batch
from .rng import SeededRng
from .sampler import NoiseConfig, sample_binary_poly, sample_gaussian_poly, sample_uniform_poly

_BASIS_CACHE: dict = {}


def working_basis(params: ParameterSet) -> RnsBasis:
    key = (params.fingerprint(), "work")
    if key not in _BASIS_CACHE:
        _BASIS_CACHE[key] = RnsBasis(params.contexts)
    return _BASIS_CACHE[key]


def extension_bases(params: ParameterSet) -> tuple[RnsBasis, RnsBasis]:
    """(full extended basis, auxiliary-only basis) for exact tensor products.

    The extended product must exceed 4*n*Q**2 so signed convolution values
    (magnitude < n*Q**2) are recovered unambiguously.
    """
    key = (params.fingerprint(), "mul")
    if key not in _BASIS_CACHE:
        target_bits = (4 * params.n * params.Q * params.Q).bit_length() + 1
        aux = []
        prod_bits = params.Q.bit_length()
        stream = iter(params.aux_primes(max(4, (target_bits - prod_bits) // (params.bits - 1) + 2)))
        prod = params.Q
        while prod.bit_length() < target_bits:
            q = next(stream)
            aux.append(q)
            prod *= q
        aux_basis = RnsBasis.from_moduli(aux, params.n)
        full = RnsBasis(tuple(params.contexts) + aux_basis.contexts)
        _BASIS_CACHE[key] = (full, aux_basis)
    return _BASIS_CACHE[key]


def signed_center(value: int, modulus: int) -> int:
    return value - modulus if value > modulus // 2 else value


def decompose_signed(values, basis: RnsBasis, value_bits: int | None = None) -> np.ndarray:
    """Residues of possibly-negative integers (lifted as q_i - |v|)."""
    Q = basis.Q
    lifted = [v % Q for v in values]
    return decompose_batch(lifted, basis, value_bits)


def log2_big(x: int) -> float:
    """log2 for integers of any width."""
    if x <= 0:
        return float("-inf")
    bl = x.bit_length()
    if bl <= 53:
        return math.log2(x)
    return math.log2(x >> (bl - 53)) + (bl - 53)


@dataclass
class KeyPair:
    params: ParameterSet
    sk: np.ndarray | None            # n bits, or None for a public-only pair
    pk_b: RnsPolynomial | None
    pk_a: RnsPolynomial | None
    fingerprint: bytes = b""
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.fingerprint:
            self.fingerprint = self.params.fingerprint()

    def sk_rns(self) -> RnsPolynomial:
        if "sk_rns" not in self._cache:
            basis = working_basis(self.params)
            data = np.repeat(self.sk[None, :], basis.k, axis=0)
            self._cache["sk_rns"] = RnsPolynomial(data, basis, COEFF, self.fingerprint)
        return self._cache["sk_rns"]

    def sk_ntt(self) -> RnsPolynomial:
        if "sk_ntt" not in self._cache:
            self._cache["sk_ntt"] = to_twisted_ntt(self.sk_rns())
        return self._cache["sk_ntt"]

    def pk_ntt(self) -> tuple[RnsPolynomial, RnsPolynomial]:
        if "pk_ntt" not in self._cache:
            self._cache["pk_ntt"] = (to_twisted_ntt(self.pk_b), to_twisted_ntt(self.pk_a))
        return self._cache["pk_ntt"]


@dataclass
class Ciphertext:
    parts: tuple
    fingerprint: bytes

    def __post_init__(self):
        if len(self.parts) not in (2, 3):
            raise DegreeMismatch(f"{len(self.parts)} parts; only degree 1 or 2 supported")
        self.parts = tuple(self.parts)

    @property
    def degree(self) -> int:
        return len(self.parts) - 1


def _check_same(ct1: Ciphertext, ct2: Ciphertext) -> None:
    if ct1.fingerprint != ct2.fingerprint:
        raise ParameterMismatch("ciphertexts from different parameter sets")
    if ct1.degree != ct2.degree:
        raise DegreeMismatch(f"degrees differ: {ct1.degree} vs {ct2.degree}")


def noise_config(params: ParameterSet) -> NoiseConfig:
    return NoiseConfig(sigma=params.sigma, seed=params.seed)


def keygen(params: ParameterSet, rng: SeededRng) -> KeyPair:
    """s binary, a uniform in R_Q, e Gaussian; b = -(a*s + e)."""
    basis = working_basis(params)
    fp = params.fingerprint()
    s = sample_binary_poly(params.n, rng.child("keygen/s"))
    a_data, _ = sample_uniform_poly(basis, params.n, rng.child("keygen/a"))
    e = sample_gaussian_poly(noise_config(params), params.n, rng.child("keygen/e"))
    a = RnsPolynomial(a_data, basis, COEFF, fp)
    e_rns = RnsPolynomial(decompose_signed(e, basis), basis, COEFF, fp)
    kp = KeyPair(params=params, sk=s, pk_b=None, pk_a=a, fingerprint=fp)
    a_s = from_twisted_ntt(pointwise_mul(to_twisted_ntt(a), kp.sk_ntt()))
    kp.pk_b = poly_neg(poly_add(a_s, e_rns))
    return kp


def encrypt(m, keys: KeyPair, params: ParameterSet, rng: SeededRng) -> Ciphertext:
    """ct = (b*r0 + r2 + delta*m, a*r0 + r1) with r0 binary, r1/r2 Gaussian."""
    basis = working_basis(params)
    fp = keys.fingerprint
    m = np.asarray(m, dtype=np.int64)
    if len(m) != params.n:
        raise NonBinaryMessage(f"message must have exactly n={params.n} bits")
    scaled = scalar_mul_binary(m, params.delta)  # delta*m by conditional select
    dm = RnsPolynomial(decompose_batch(scaled, basis), basis, COEFF, fp)
    r0 = sample_binary_poly(params.n, rng.child("enc/r0"))
    cfg = noise_config(params)
    r1 = sample_gaussian_poly(cfg, params.n, rng.child("enc/r1"))
    r2 = sample_gaussian_poly(cfg, params.n, rng.child("enc/r2"))
    r0_rns = RnsPolynomial(np.repeat(r0[None, :], basis.k, axis=0), basis, COEFF, fp)
    r0_hat = to_twisted_ntt(r0_rns)
    b_hat, a_hat = keys.pk_ntt()
    c0 = from_twisted_ntt(pointwise_mul(b_hat, r0_hat))
    c1 = from_twisted_ntt(pointwise_mul(a_hat, r0_hat))
    c0 = poly_add(poly_add(c0, RnsPolynomial(decompose_signed(r2, basis), basis, COEFF, fp)), dm)
    c1 = poly_add(c1, RnsPolynomial(decompose_signed(r1, basis), basis, COEFF, fp))
    return Ciphertext((c0, c1), fp)


def _inner_product_coeffs(ct: Ciphertext, keys: KeyPair) -> list:
    """Coefficients of u = c0 + c1*s (+ c2*s^2) as integers in [0, Q)."""
    basis = working_basis(keys.params)
    s_hat = keys.sk_ntt()
    acc = pointwise_mul(to_twisted_ntt(ct.parts[1]), s_hat)
    if ct.degree == 2:
        c2_ss = pointwise_mul(pointwise_mul(to_twisted_ntt(ct.parts[2]), s_hat), s_hat)
        acc = poly_add(acc, c2_ss)
    u = poly_add(ct.parts[0], from_twisted_ntt(acc))
    return reconstruct_batch(u.data, basis)


def decrypt_deg1(ct: Ciphertext, keys: KeyPair, params: ParameterSet) -> np.ndarray:
    if ct.degree != 1:
        raise DegreeMismatch(f"expected degree 1, got {ct.degree}")
    if ct.fingerprint != keys.fingerprint:
        raise ParameterMismatch("ciphertext/keys parameter mismatch")
    coeffs = _inner_product_coeffs(ct, keys)
    return np.array(
        [nearest_binary(u, params.delta, params.Q) for u in coeffs], dtype=np.int64
    )


def decrypt_deg2(ct: Ciphertext, keys: KeyPair, params: ParameterSet) -> np.ndarray:
    if ct.degree != 2:
        raise DegreeMismatch(f"expected degree 2, got {ct.degree}")
    if ct.fingerprint != keys.fingerprint:
        raise ParameterMismatch("ciphertext/keys parameter mismatch")
    coeffs = _inner_product_coeffs(ct, keys)
    return np.array(
        [nearest_binary(u, params.delta, params.Q) for u in coeffs], dtype=np.int64
    )


def homomorphic_add(ct1: Ciphertext, ct2: Ciphertext) -> Ciphertext:
    _check_same(ct1, ct2)
    return Ciphertext(
        tuple(poly_add(p1, p2) for p1, p2 in zip(ct1.parts, ct2.parts)),
        ct1.fingerprint,
    )


def extend_poly(poly: RnsPolynomial, params: ParameterSet) -> tuple[RnsPolynomial, list]:
    """Lift a working-basis polynomial into the extended multiplication basis."""
    full, aux = extension_bases(params)
    ints = reconstruct_batch(poly.data, poly.basis)
    aux_rows = decompose_batch(ints, aux, value_bits=params.Q.bit_length())
    data = np.vstack([poly.data, aux_rows])
    return RnsPolynomial(data, full, COEFF, poly.fingerprint), ints


def tensor_products(ct1: Ciphertext, ct2: Ciphertext, params: ParameterSet) -> list:
    """The three degree-2 tensor polynomials as exact signed integer
    coefficient lists: c0 = a0*b0, c1 = a0*b1 + a1*b0, c2 = a1*b1."""
    full, _ = extension_bases(params)
    hats = []
    for part in (*ct1.parts, *ct2.parts):
        ext, _ = extend_poly(part, params)
        hats.append(to_twisted_ntt(ext))
    a0, a1, b0, b1 = hats
    combos = (
        pointwise_mul(a0, b0),
        poly_add(pointwise_mul(a0, b1), pointwise_mul(a1, b0)),
        pointwise_mul(a1, b1),
    )
    out = []
    P = full.Q
    for hat in combos:
        raw = reconstruct_batch(from_twisted_ntt(hat).data, full)
        out.append([signed_center(v, P) for v in raw])
    return out


def rescale_to_working(values: list, params: ParameterSet) -> np.ndarray:
    """round(t*x/Q) mod Q for every signed coefficient, then decompose."""
    basis = working_basis(params)
    Q, t = params.Q, params.t
    half = Q >> 1
    perf.add("shift", 1)
    scaled = [((t * v + half) // Q) % Q for v in values]
    perf.add("bigmul", len(values))
    perf.add("bigadd", len(values))
    return decompose_batch(scaled, basis)


def homomorphic_mul(
    ct1: Ciphertext, ct2: Ciphertext, params: ParameterSet, paper_literal: bool = False
) -> Ciphertext:
    """Degree-2 product of two degree-1 ciphertexts.

    Default path: exact integer tensor products over the extended basis,
    each coefficient rescaled to round(t*x/Q) mod Q.  `paper_literal`
    multiplies channel-by-channel with no rescaling (operation-count
    benchmarking only; the result does not decrypt).
    """
    if ct1.degree != 1 or ct2.degree != 1:
        raise DegreeMismatch("homomorphic multiplication needs degree-1 inputs")
    if ct1.fingerprint != ct2.fingerprint:
        raise ParameterMismatch("ciphertexts from different parameter sets")
    fp = ct1.fingerprint
    basis = working_basis(params)
    if paper_literal:
        a0, a1 = (to_twisted_ntt(p) for p in ct1.parts)
        b0, b1 = (to_twisted_ntt(p) for p in ct2.parts)
        parts = (
            from_twisted_ntt(pointwise_mul(a0, b0)),
            from_twisted_ntt(poly_add(pointwise_mul(a0, b1), pointwise_mul(a1, b0))),
            from_twisted_ntt(pointwise_mul(a1, b1)),
        )
        return Ciphertext(parts, fp)
    tensors = tensor_products(ct1, ct2, params)
    parts = tuple(
        RnsPolynomial(rescale_to_working(t_coeffs, params), basis, COEFF, fp)
        for t_coeffs in tensors
    )
    return Ciphertext(parts, fp)


def noise_of(ct: Ciphertext, keys: KeyPair, m, params: ParameterSet) -> float:
    """Remaining noise budget in bits: log2(delta/2) - log2(max |u - delta*m|).

    Positive budget means decryption succeeds; clamped at zero.
    """
    m = np.asarray(m, dtype=np.int64)
    coeffs = _inner_product_coeffs(ct, keys)
    Q, delta = params.Q, params.delta
    worst = 0
    for u, bit in zip(coeffs, m):
        d = abs(u - delta * int(bit))
        d = min(d, Q - d)
        worst = max(worst, d)
    ceiling = log2_big(delta >> 1)
    if worst == 0:
        return ceiling
    return max(0.0, ceiling - log2_big(worst))


# -- serialization container ---------------------------------------------------
#
# Common header: magic "RAHL", version u16, params fingerprint (32 bytes),
# degree u8, k u16, n u32 -- 45 bytes, little endian -- followed by
# channel-major coefficient data, each residue a little-endian u32.
# Secret keys carry the bit vector packed LSB-first instead.

MAGIC = b"RAHL"
VERSION = 1
_HEADER = struct.Struct("<4sH32sBHI")


def pack_header(fingerprint: bytes, degree: int, k: int, n: int) -> bytes:
    return _HEADER.pack(MAGIC, VERSION, fingerprint, degree, k, n)


def parse_header(blob: bytes) -> tuple:
    if len(blob) < _HEADER.size:
        raise FormatError("artifact shorter than its header")
    magic, version, fp, degree, k, n = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported format version {version}")
    return fp, degree, k, n, _HEADER.size


def poly_block(data: np.ndarray) -> bytes:
    return np.ascontiguousarray(data).astype("<u4").tobytes()


def read_poly_block(blob: bytes, offset: int, k: int, n: int) -> tuple[np.ndarray, int]:
    nbytes = 4 * k * n
    if len(blob) < offset + nbytes:
        raise FormatError("artifact truncated inside a polynomial block")
    arr = np.frombuffer(blob, dtype="<u4", count=k * n, offset=offset)
    return arr.astype(np.int64).reshape(k, n), offset + nbytes


def _expect_fingerprint(fp: bytes, params: ParameterSet) -> None:
    if fp != params.fingerprint():
        raise ParameterMismatch("artifact fingerprint does not match parameter set")


def serialize_ciphertext(ct: Ciphertext) -> bytes:
    basis = ct.parts[0].basis
    out = [pack_header(ct.fingerprint, ct.degree, basis.k, basis.n)]
    out += [poly_block(p.data) for p in ct.parts]
    return b"".join(out)


def deserialize_ciphertext(blob: bytes, params: ParameterSet) -> Ciphertext:
    fp, degree, k, n, offset = parse_header(blob)
    _expect_fingerprint(fp, params)
    basis = working_basis(params)
    if (k, n) != (basis.k, basis.n):
        raise FormatError(f"ciphertext shaped (k={k}, n={n}), params say ({basis.k}, {basis.n})")
    parts = []
    for _ in range(degree + 1):
        data, offset = read_poly_block(blob, offset, k, n)
        parts.append(RnsPolynomial(data, basis, COEFF, fp))
    if offset != len(blob):
        raise FormatError("trailing bytes after ciphertext")
    return Ciphertext(tuple(parts), fp)


def serialize_public_key(keys: KeyPair) -> bytes:
    basis = keys.pk_b.basis
    return b"".join(
        [
            pack_header(keys.fingerprint, 1, basis.k, basis.n),
            poly_block(keys.pk_b.data),
            poly_block(keys.pk_a.data),
        ]
    )


def deserialize_public_key(blob: bytes, params: ParameterSet) -> KeyPair:
    fp, degree, k, n, offset = parse_header(blob)
    _expect_fingerprint(fp, params)
    basis = working_basis(params)
    if degree != 1 or (k, n) != (basis.k, basis.n):
        raise FormatError("malformed public key block")
    b_data, offset = read_poly_block(blob, offset, k, n)
    a_data, offset = read_poly_block(blob, offset, k, n)
    return KeyPair(
        params=params,
        sk=None,
        pk_b=RnsPolynomial(b_data, basis, COEFF, fp),
        pk_a=RnsPolynomial(a_data, basis, COEFF, fp),
        fingerprint=fp,
    )


def serialize_secret_key(keys: KeyPair) -> bytes:
    packed = np.packbits(keys.sk.astype(np.uint8), bitorder="little").tobytes()
    return pack_header(keys.fingerprint, 0, keys.params.k, keys.params.n) + packed


def deserialize_secret_key(blob: bytes, params: ParameterSet) -> KeyPair:
    fp, degree, k, n, offset = parse_header(blob)
    _expect_fingerprint(fp, params)
    if degree != 0 or n != params.n:
        raise FormatError("malformed secret key block")
    need = (n + 7) // 8
    if len(blob) != offset + need:
        raise FormatError("secret key payload has the wrong size")
    bits = np.unpackbits(
        np.frombuffer(blob, dtype=np.uint8, offset=offset), bitorder="little"
    )[:n].astype(np.int64)
    return KeyPair(params=params, sk=bits, pk_b=None, pk_a=None, fingerprint=fp)


def merge_keypairs(sk_half: KeyPair, pk_half: KeyPair) -> KeyPair:
    return KeyPair(
        params=sk_half.params,
        sk=sk_half.sk,
        pk_b=pk_half.pk_b,
        pk_a=pk_half.pk_a,
        fingerprint=sk_half.fingerprint,
    )
