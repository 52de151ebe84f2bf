"""Exception types raised by the library."""


class RahlError(Exception):
    """Base class for all library errors."""


# -- parameter generation -----------------------------------------------------

class InvalidDegree(RahlError):
    """Polynomial degree is not a power of two (or is too small)."""


class InsufficientPrimes(RahlError):
    """Fewer NTT-friendly primes exist at the requested width than asked for."""


class NotPrime(RahlError):
    """A value required to be prime is composite."""


class NoRoot(RahlError):
    """No n-th root of unity exists (n does not divide q-1)."""


# -- modular kernels ----------------------------------------------------------

class ZeroModulus(RahlError):
    """Reduction modulo zero requested."""


class InputTooWide(RahlError):
    """Operand exceeds the width the reduction context was built for."""


class NotInvertible(RahlError):
    """Element has no multiplicative inverse (zero residue)."""


class NotCoprime(RahlError):
    """gcd(a, q) != 1, so no inverse modulo q exists."""


class BothZero(RahlError):
    """gcd(0, 0) is undefined."""


class ZeroInput(RahlError):
    """Algorithm does not terminate on a zero operand."""


# -- polynomial / RNS structure ----------------------------------------------

class OutOfRange(RahlError):
    """Value lies outside the representable range [0, Q)."""


class DomainMismatch(RahlError):
    """Polynomial is in the wrong evaluation domain (coeff vs ntt)."""


class ChannelMismatch(RahlError):
    """Operands belong to different residue channels."""


class BasisMismatch(RahlError):
    """Operands were built over different RNS bases."""


class NonBinaryMessage(RahlError):
    """Message vector contains values other than 0 and 1."""


# -- scheme level -------------------------------------------------------------

class DegreeMismatch(RahlError):
    """Ciphertext degree does not match what the operation expects."""


class ParameterMismatch(RahlError):
    """Artifact was produced under a different parameter set (fingerprint)."""


class FormatError(RahlError):
    """Serialized artifact is malformed."""


class NoiseBudgetExhausted(RahlError):
    """Accumulated noise exceeds the decryption threshold."""


# -- benchmarking -------------------------------------------------------------

class UnknownLabel(RahlError):
    """No measurement recorded under the requested label."""
