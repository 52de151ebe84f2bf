"""Greatest common divisor kernels: division, subtraction, and binary variants.

All three are iterative and return identical values; they differ in the
primitive operations they spend (divisions vs subtractions vs shifts), which
is what the benchmark harness compares.
"""

from __future__ import annotations

from . import perf
from .errors import BothZero, ZeroInput


def gcd_division(a: int, b: int) -> int:
    """Euclid by division: (a, b) -> (b, a mod b) until exact division."""
    if a == 0 and b == 0:
        raise BothZero("gcd(0, 0) is undefined")
    if a < b:
        a, b = b, a
    if b == 0:
        return a
    while True:
        r = a % b
        perf.add("modadd", 1)
        if r == 0:
            return b
        a, b = b, r


def gcd_division_steps(a: int, b: int) -> int:
    """Number of division steps gcd_division takes (its recursion depth)."""
    if a < b:
        a, b = b, a
    steps = 0
    while b:
        a, b = b, a % b
        steps += 1
    return steps


def gcd_subtraction(a: int, b: int) -> int:
    """Euclid by subtraction: repeatedly subtract the smaller from the larger."""
    if a < 1 or b < 1:
        raise ZeroInput("subtraction method requires a, b >= 1")
    while a != b:
        if a > b:
            a -= b
        else:
            b -= a
        perf.add("modadd", 1)
    return a


def gcd_binary(a: int, b: int) -> int:
    """Binary GCD: subtraction, shifts, and parity checks only.

    Carries a power-of-two accumulator `res` that doubles when both operands
    are even; single-even branches halve only that operand.  Returns
    res * a at the a == b fixpoint.
    """
    if a < 1 or b < 1:
        raise ZeroInput("binary method requires a, b >= 1")
    res = 1
    while a != b:
        if a & 1 == 0 and b & 1 == 0:
            a >>= 1
            b >>= 1
            res <<= 1
            perf.add("shift", 3)
        elif a & 1 == 0:
            a >>= 1
            perf.add("shift", 1)
        elif b & 1 == 0:
            b >>= 1
            perf.add("shift", 1)
        elif a > b:
            a -= b
            perf.add("modadd", 1)
        else:
            b -= a
            perf.add("modadd", 1)
    return res * a


def is_coprime(a: int, b: int) -> bool:
    if a == 0 and b == 0:
        raise BothZero("coprimality of (0, 0) is undefined")
    if a == 0 or b == 0:
        return max(a, b) == 1
    return gcd_binary(a, b) == 1
