"""Parameter generation: NTT-friendly prime moduli, roots of unity, and the
full scheme parameter set (n, t, moduli, Q, delta, relinearisation constants).

Modulus search is deterministic: candidates congruent to 1 mod 2n are taken
in descending order from 2**bits - 1 down to 2**(bits-1), keeping primes.
Auxiliary primes for extended bases continue the same descending stream, so
a parameter set always induces the same bases.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

from .errors import (
    FormatError,
    InsufficientPrimes,
    InvalidDegree,
    NoRoot,
    NotPrime,
)
from .modinv import exponent_bits, is_prime, modinv_fermat
from .modred import BarrettContext, FoldedBarrettContext

DEFAULT_SIGMA = 3.2


def is_power_of_two(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def next_power_of_two(x: int) -> int:
    return 1 << (x - 1).bit_length() if x > 1 else 1


def _factor(n: int) -> list:
    """Prime factors of n (unique), by trial division; n fits 64 bits here."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def find_primitive_root(q: int) -> int:
    """Smallest generator of the multiplicative group mod q (q prime)."""
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    if q == 2:
        return 1
    group = q - 1
    factors = _factor(group)
    alpha = 2
    while True:
        if all(pow(alpha, group // f, q) != 1 for f in factors):
            return alpha
        alpha += 1


def compute_root_of_unity(q: int, n: int) -> int:
    """An n-th root of unity mod q: omega = alpha**((q-1)/n), then verified."""
    if n == 1:
        return 1
    if (q - 1) % n != 0:
        raise NoRoot(f"{n} does not divide {q - 1}")
    alpha = find_primitive_root(q)
    omega = pow(alpha, (q - 1) // n, q)
    # Verify rather than assume: omega**n == 1 and the period of omega is
    # exactly n (no proper divisor n/f already reaches 1).
    if pow(omega, n, q) != 1:
        raise NoRoot(f"candidate root fails omega**n = 1 for q={q}, n={n}")
    for f in _factor(n):
        if pow(omega, n // f, q) == 1:
            raise NoRoot(f"candidate root has period below {n} for q={q}")
    return omega


@dataclass(frozen=True)
class ModulusContext:
    """One NTT-friendly prime with every constant the pipelines need."""

    q: int
    n: int
    bitwidth: int
    barrett: BarrettContext
    folded: FoldedBarrettContext
    omega: int
    psi: int
    omega_inv: int
    psi_inv: int
    n_inv: int
    fermat_bits: tuple      # bit pattern of q-2, MSB first
    _tables: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def create(cls, q: int, n: int) -> "ModulusContext":
        if not is_power_of_two(n):
            raise InvalidDegree(f"n={n} is not a power of two")
        if (q - 1) % (2 * n) != 0:
            raise NoRoot(f"q={q} is not NTT-friendly for n={n}")
        psi = compute_root_of_unity(q, 2 * n)
        omega = psi * psi % q
        exp_bits = exponent_bits(q - 2)
        ctx = cls(
            q=q,
            n=n,
            bitwidth=(q - 1).bit_length(),
            barrett=BarrettContext.create(q),
            folded=FoldedBarrettContext.create(q),
            omega=omega,
            psi=psi,
            omega_inv=modinv_fermat(omega, q, exp_bits),
            psi_inv=modinv_fermat(psi, q, exp_bits),
            n_inv=modinv_fermat(n % q, q, exp_bits),
            fermat_bits=exp_bits,
        )
        ctx.validate()
        return ctx

    @property
    def barrett_r(self) -> int:
        return self.barrett.r

    @property
    def fold_constant(self) -> int:
        return self.folded.fold_constant

    @property
    def folded_r(self) -> int:
        return self.folded.r_folded

    def validate(self) -> None:
        q, n = self.q, self.n
        assert pow(self.omega, n, q) == 1
        assert all(pow(self.omega, n // f, q) != 1 for f in _factor(n))
        assert self.psi * self.psi % q == self.omega
        assert pow(self.psi, 2 * n, q) == 1
        assert n == 1 or pow(self.psi, n, q) == q - 1
        assert self.n_inv * n % q == 1
        assert self.omega * self.omega_inv % q == 1
        assert self.psi * self.psi_inv % q == 1


def ntt_prime_stream(n: int, bits: int):
    """Primes of exactly `bits` bits, congruent to 1 mod 2n, descending."""
    step = 2 * n
    top = (1 << bits) - 1
    cand = top - ((top - 1) % step)
    floor = 1 << (bits - 1)
    while cand >= max(floor, 3):
        if is_prime(cand):
            yield cand
        cand -= step


@dataclass(frozen=True)
class ParameterSet:
    n: int
    t: int
    k: int
    bits: int
    moduli: tuple
    Q: int
    delta: int
    T: int
    ell: int
    p: int
    sigma: float
    seed: int
    contexts: tuple = field(repr=False, compare=False, default=())

    @classmethod
    def build(cls, n, t, k, bits, moduli, sigma, seed, relin_base=2) -> "ParameterSet":
        Q = math.prod(moduli)
        ell = _floor_log(Q, relin_base)
        params = cls(
            n=n,
            t=t,
            k=k,
            bits=bits,
            moduli=tuple(moduli),
            Q=Q,
            delta=Q // t,
            T=relin_base,
            ell=ell,
            p=next_power_of_two(Q**3),
            sigma=sigma,
            seed=seed,
            contexts=tuple(ModulusContext.create(q, n) for q in moduli),
        )
        params.validate()
        return params

    def validate(self) -> None:
        from .gcd import gcd_binary  # deferred: gcd imports perf only

        if not is_power_of_two(self.n) or self.n < 2:
            raise InvalidDegree(f"n={self.n} must be a power of two >= 2")
        assert self.t >= 2
        assert self.Q == math.prod(self.moduli)
        assert self.delta == self.Q // self.t
        assert self.ell == _floor_log(self.Q, self.T)
        assert is_power_of_two(self.p) and self.p >= self.Q**3
        mods = self.moduli
        for i in range(len(mods)):
            assert (mods[i] - 1) % (2 * self.n) == 0
            for j in range(i + 1, len(mods)):
                assert gcd_binary(mods[i], mods[j]) == 1

    # -- derived material ------------------------------------------------

    def aux_primes(self, count: int) -> tuple:
        """The next `count` NTT-friendly primes after the working moduli."""
        out = []
        used = set(self.moduli)
        for p in ntt_prime_stream(self.n, self.bits):
            if p in used:
                continue
            out.append(p)
            if len(out) == count:
                return tuple(out)
        raise InsufficientPrimes(
            f"only {len(out)} spare {self.bits}-bit primes = 1 mod {2 * self.n}"
        )

    def canonical_text(self) -> str:
        lines = [
            f"n={self.n}",
            f"t={self.t}",
            f"k={self.k}",
            f"bits={self.bits}",
            f"sigma={self.sigma!r}",
            f"seed={self.seed}",
            "moduli=" + ",".join(str(m) for m in self.moduli),
        ]
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> bytes:
        return hashlib.sha256(self.canonical_text().encode()).digest()


def _floor_log(value: int, base: int) -> int:
    e = 0
    acc = base
    while acc <= value:
        acc *= base
        e += 1
    return e


def generate_parameters(
    n: int,
    t: int = 2,
    k: int = 1,
    bits: int = 30,
    sigma: float = DEFAULT_SIGMA,
    seed: int = 0,
) -> ParameterSet:
    """Deterministic parameter set for (n, t, k, bits); seed rides along for
    the samplers and is not consumed by the modulus search."""
    if not is_power_of_two(n) or n < 2:
        raise InvalidDegree(f"n={n} must be a power of two >= 2")
    if not 2 <= bits <= 32:
        raise ValueError("bits must be in [2, 32]")
    if k < 1 or t < 2:
        raise ValueError("need k >= 1 and t >= 2")
    moduli = []
    for q in ntt_prime_stream(n, bits):
        moduli.append(q)
        if len(moduli) == k:
            break
    if len(moduli) < k:
        raise InsufficientPrimes(
            f"only {len(moduli)} {bits}-bit primes = 1 mod {2 * n} exist, need {k}"
        )
    return ParameterSet.build(n, t, k, bits, moduli, sigma, seed)


# -- parameter file ------------------------------------------------------

def write_parameter_file(path: str, params: ParameterSet) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(params.canonical_text())


def read_parameter_file(path: str) -> ParameterSet:
    """Parse a key=value parameter file and rebuild the full set."""
    fields_seen = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, value = line.partition("=")
                fields_seen[key.strip()] = value.strip()
        n = int(fields_seen["n"])
        t = int(fields_seen["t"])
        k = int(fields_seen["k"])
        bits = int(fields_seen["bits"])
        sigma = float(fields_seen["sigma"])
        seed = int(fields_seen["seed"])
        moduli = [int(x) for x in fields_seen["moduli"].split(",") if x]
    except (KeyError, ValueError) as exc:
        raise FormatError(f"malformed parameter file {path}: {exc}") from exc
    if len(moduli) != k:
        raise FormatError(f"parameter file lists {len(moduli)} moduli, k={k}")
    for q in moduli:
        if not is_prime(q):
            raise FormatError(f"modulus {q} is not prime")
    return ParameterSet.build(n, t, k, bits, moduli, sigma, seed)
