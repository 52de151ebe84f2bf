"""Seeded randomness.

All library randomness flows through `SeededRng`, a deterministic stream
built from SHAKE-256 in counter mode: block_i = SHAKE256(seed || tag || i).
The construction is seedable, reproducible across platforms, and
cryptographically strong; the OS entropy pool is touched only when the
caller asks for a fresh seed.
"""

from __future__ import annotations

import hashlib
import os
import struct

import numpy as np

_BLOCK_BYTES = 1 << 20


def fresh_seed() -> int:
    """A 64-bit seed from the OS entropy source."""
    return int.from_bytes(os.urandom(8), "little")


class SeededRng:
    """Deterministic byte/integer stream derived from a 64-bit seed."""

    def __init__(self, seed: int, tag: bytes = b""):
        self.seed = seed & 0xFFFFFFFFFFFFFFFF
        self._prefix = struct.pack("<Q", self.seed) + tag
        self._block_index = 0
        self._buf = b""
        self._pos = 0

    def child(self, tag: str) -> "SeededRng":
        """An independent stream bound to the same seed and a domain tag."""
        return SeededRng(self.seed, self._prefix[8:] + b"/" + tag.encode())

    def _refill(self) -> None:
        h = hashlib.shake_256(self._prefix + struct.pack("<Q", self._block_index))
        self._buf = h.digest(_BLOCK_BYTES)
        self._block_index += 1
        self._pos = 0

    def take_bytes(self, count: int) -> bytes:
        out = bytearray()
        while count > 0:
            if self._pos >= len(self._buf):
                self._refill()
            chunk = self._buf[self._pos : self._pos + count]
            self._pos += len(chunk)
            count -= len(chunk)
            out += chunk
        return bytes(out)

    def uniform_bits(self, nbits: int) -> int:
        nbytes = (nbits + 7) // 8
        value = int.from_bytes(self.take_bytes(nbytes), "little")
        return value >> (nbytes * 8 - nbits)

    def uniform_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection on bit-width draws."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        nbits = (bound - 1).bit_length() or 1
        while True:
            value = self.uniform_bits(nbits)
            if value < bound:
                return value

    def uniform_big_vector(self, bound: int, count: int) -> list:
        return [self.uniform_below(bound) for _ in range(count)]

    def bit_vector(self, count: int) -> np.ndarray:
        """`count` i.i.d. uniform bits as an int64 array."""
        raw = np.frombuffer(self.take_bytes((count + 7) // 8), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[:count]
        return bits.astype(np.int64)

    def uniform_residues(self, q: int, count: int) -> np.ndarray:
        """`count` uniform values in [0, q) for q < 2**32, via rejection."""
        nbits = (q - 1).bit_length() or 1
        mask = (1 << nbits) - 1
        out = np.empty(count, dtype=np.int64)
        filled = 0
        while filled < count:
            need = count - filled
            raw = np.frombuffer(self.take_bytes(4 * (need + 8)), dtype="<u4")
            cand = (raw.astype(np.int64)) & mask
            cand = cand[cand < q][:need]
            out[filled : filled + len(cand)] = cand
            filled += len(cand)
        return out

    def unit_floats(self, count: int) -> np.ndarray:
        """`count` uniform doubles in [0, 1) with 53-bit resolution."""
        raw = np.frombuffer(self.take_bytes(8 * count), dtype="<u8")
        return (raw >> np.uint64(11)).astype(np.float64) * (2.0**-53)
