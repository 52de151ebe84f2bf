"""Modular reduction kernels.

Three interchangeable paths, equal on every input in range:

* `reduce_reference` -- the plain remainder of an integer division (oracle).
* `reduce_barrett`   -- classic Barrett: one precomputed reciprocal factor,
  two multiplications, a shift, and up to two conditional subtractions.
* `reduce_folded`    -- single-fold variant: the operand's high bits are
  pre-reduced through a precomputed 2**fold_shift mod q constant, then a
  reduced-width Barrett step finishes with at most one conditional
  subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import perf
from .errors import InputTooWide, ZeroModulus


def _kbits(q: int) -> int:
    # ceil(log2 q); 0 for q == 1.
    return (q - 1).bit_length()


@dataclass(frozen=True)
class BarrettContext:
    q: int
    kbits: int
    r: int  # floor(4**kbits / q)

    @classmethod
    def create(cls, q: int) -> "BarrettContext":
        if q < 1:
            raise ZeroModulus("modulus must be >= 1")
        k = _kbits(q)
        return cls(q=q, kbits=k, r=(1 << (2 * k)) // q)


@dataclass(frozen=True)
class FoldedBarrettContext:
    q: int
    kbits: int
    fold_shift: int      # ceil(3k/2)
    fold_constant: int   # 2**fold_shift mod q
    reduce_shift: int    # fold_shift + ceil(k/2)
    r_folded: int        # floor(2**reduce_shift / q)

    @classmethod
    def create(cls, q: int) -> "FoldedBarrettContext":
        if q < 1:
            raise ZeroModulus("modulus must be >= 1")
        k = _kbits(q)
        fs = (3 * k + 1) // 2
        rs = fs + (k + 1) // 2
        return cls(
            q=q,
            kbits=k,
            fold_shift=fs,
            fold_constant=(1 << fs) % q,
            reduce_shift=rs,
            r_folded=(1 << rs) // q,
        )


def reduce_reference(a: int, q: int) -> int:
    """a mod q by integer division."""
    if q < 1:
        raise ZeroModulus("modulus must be >= 1")
    return a - q * (a // q)


def reduce_barrett(a: int, ctx: BarrettContext) -> int:
    value, _ = barrett_steps(a, ctx)
    return value


def barrett_steps(a: int, ctx: BarrettContext) -> tuple[int, int]:
    """Classic Barrett reduction; returns (a mod q, conditional subtractions).

    Intermediate t needs at most kbits+1 bits, so hardware realizations may
    drop the upper bits of the quotient product; here the contract is the
    value and the correction count (<= 2).
    """
    if a >> (2 * ctx.kbits) and a != 0:
        raise InputTooWide(f"operand needs more than {2 * ctx.kbits} bits")
    t = a - ((a * ctx.r) >> (2 * ctx.kbits)) * ctx.q
    perf.add("modmul", 2)
    perf.add("shift", 1)
    corrections = 0
    while t >= ctx.q:
        t -= ctx.q
        corrections += 1
        perf.add("modadd", 1)
    return t, corrections


def reduce_folded(a: int, ctx: FoldedBarrettContext) -> int:
    value, _ = folded_steps(a, ctx)
    return value


def folded_steps(a: int, ctx: FoldedBarrettContext) -> tuple[int, int]:
    """Single-fold reduction; returns (a mod q, conditional subtractions <= 1)."""
    if a >> (2 * ctx.kbits) and a != 0:
        raise InputTooWide(f"operand needs more than {2 * ctx.kbits} bits")
    folded = (a & ((1 << ctx.fold_shift) - 1)) + (a >> ctx.fold_shift) * ctx.fold_constant
    t = folded - ((folded * ctx.r_folded) >> ctx.reduce_shift) * ctx.q
    perf.add("modmul", 3)
    perf.add("shift", 2)
    perf.add("modadd", 1)
    corrections = 0
    if t >= ctx.q:
        t -= ctx.q
        corrections = 1
        perf.add("modadd", 1)
    return t, corrections


def modmul(a: int, b: int, ctx: FoldedBarrettContext) -> int:
    """(a * b) mod q through the folded reducer; a, b must be residues."""
    perf.add("modmul", 1)
    return reduce_folded(a * b, ctx)
