"""Modular multiplicative inverse via Fermat's little theorem and via the
extended Euclidean algorithm.

The Fermat path is only defined for prime moduli (a**(q-2) mod q); the
Euclidean path also handles composite moduli as long as gcd(a, q) = 1.
"""

from __future__ import annotations

from . import perf
from .errors import NotCoprime, NotInvertible, NotPrime

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24 (fixed witness set)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for base in _MR_BASES:
        x = pow(base, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def exponent_bits(e: int) -> tuple:
    """Bits of e, most significant first; precomputable for a fixed modulus."""
    return tuple((e >> i) & 1 for i in reversed(range(e.bit_length())))


def modinv_fermat(a: int, q: int, exp_bits: tuple | None = None) -> int:
    """a**(q-2) mod q by left-to-right square-and-multiply.

    `exp_bits` is the precomputed bit pattern of q-2 (kept on ModulusContext
    for the library's own moduli); it is derived on the fly otherwise.
    """
    a %= q
    if a == 0:
        raise NotInvertible("0 has no inverse")
    if not is_prime(q):
        raise NotPrime(f"{q} is composite; Fermat inverse undefined")
    if q == 2:
        return 1
    if exp_bits is None:
        exp_bits = exponent_bits(q - 2)
    acc = 1
    nmul = 0
    for bit in exp_bits:
        acc = acc * acc % q
        nmul += 1
        if bit:
            acc = acc * a % q
            nmul += 1
    perf.add("modmul", nmul)
    return acc


def modinv_euclid(a: int, q: int) -> int:
    """Inverse of a modulo q from the Bezout identity a*x + q*y = 1.

    Iterative remainder chain; the signed coefficient x is normalized into
    [0, q) at return.  Works for composite q.
    """
    if q < 2:
        raise NotCoprime("modulus must be >= 2")
    a %= q
    if a == 0:
        raise NotCoprime(f"gcd({a}, {q}) != 1")
    old_r, r = a, q
    old_x, x = 1, 0
    while r:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_x, x = x, old_x - quotient * x
        perf.add("modmul", 1)
        perf.add("modadd", 2)
    if old_r != 1:
        raise NotCoprime(f"gcd({a}, {q}) = {old_r} != 1")
    return old_x % q
