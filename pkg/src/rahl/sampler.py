"""Randomness sources for the scheme: uniform ring elements, binary secrets,
and small discrete Gaussian error polynomials.

Gaussian draws come from a cumulative-distribution-table inversion over
[-tail_bound, tail_bound].  A `scale_log2` field widens the distribution by
a power of two (draws are left-shifted), which realizes the much wider
second error distribution the relinearisation-v2 keys need without a
table of astronomical size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .residue import RnsBasis, decompose_batch
from .rng import SeededRng


@dataclass(frozen=True)
class NoiseConfig:
    sigma: float
    tail_bound: int = 0          # 0 -> ceil(6 * sigma)
    seed: int = 0
    scale_log2: int = 0          # draws are shifted left by this many bits

    def __post_init__(self):
        if self.tail_bound == 0:
            object.__setattr__(self, "tail_bound", max(1, math.ceil(6 * self.sigma)))
        assert self.tail_bound >= 1

    def cdt(self) -> tuple[np.ndarray, np.ndarray]:
        """(support, cdf) for inversion sampling."""
        xs = np.arange(-self.tail_bound, self.tail_bound + 1, dtype=np.int64)
        if self.sigma == 0:
            weights = (xs == 0).astype(np.float64)
        else:
            weights = np.exp(-(xs.astype(np.float64) ** 2) / (2.0 * self.sigma**2))
        cdf = np.cumsum(weights)
        cdf /= cdf[-1]
        return xs, cdf


def sample_uniform_poly(basis: RnsBasis, n: int, rng: SeededRng):
    """Uniform element of R_Q as residues: draw the big coefficients, then
    decompose.  Returns ((k, n) residue array, coefficient list)."""
    coeffs = rng.uniform_big_vector(basis.Q, n)
    return decompose_batch(coeffs, basis), coeffs


def sample_binary_poly(n: int, rng: SeededRng) -> np.ndarray:
    """n i.i.d. uniform bits."""
    return rng.bit_vector(n)


def sample_gaussian_poly(cfg: NoiseConfig, n: int, rng: SeededRng) -> list:
    """n signed draws from the discrete Gaussian (times 2**scale_log2).

    Magnitudes never exceed tail_bound << scale_log2.  Returns Python ints
    so scaled configurations are exact at any width.
    """
    if cfg.sigma == 0 and cfg.scale_log2 == 0:
        return [0] * n
    xs, cdf = cfg.cdt()
    u = rng.unit_floats(n)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.minimum(idx, len(xs) - 1)
    base = xs[idx]
    if cfg.scale_log2 == 0:
        return [int(v) for v in base]
    return [int(v) << cfg.scale_log2 for v in base]
