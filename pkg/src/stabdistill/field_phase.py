"""Arithmetic over the prime field Z_d and exact root-of-unity phases.

Phases are integer exponents of tau = exp(i*pi/d), kept modulo 2d. Even
exponents are powers of omega = exp(2*pi*i/d); odd exponents only occur for
d = 2, where eigenvalues of Weyl operators involve omega^(1/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class NoInverse(ZeroDivisionError):
    """Raised when inverting zero in Z_d."""


class NotPrime(ValueError):
    """Raised when a modulus is not a prime number."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def check_prime(d: int) -> int:
    d = int(d)
    if not is_prime(d):
        raise NotPrime(f"d must be prime, got {d}")
    return d


def inverse_mod(a: int, d: int) -> int:
    """Multiplicative inverse of ``a`` modulo the prime ``d``."""
    a %= d
    if a == 0:
        raise NoInverse(f"0 has no inverse modulo {d}")
    return pow(a, -1, d)


def half_mod(a: int, d: int) -> int:
    """a/2 in Z_d for odd prime d."""
    return (a * inverse_mod(2, d)) % d


@dataclass(frozen=True)
class FieldScalar:
    value: int
    d: int

    def __post_init__(self):
        check_prime(self.d)
        object.__setattr__(self, "value", int(self.value) % self.d)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldScalar):
            if other.d != self.d:
                raise ValueError("moduli differ")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldScalar(self.value + self._coerce(other), self.d)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldScalar(self.value - self._coerce(other), self.d)

    def __rsub__(self, other):
        return FieldScalar(self._coerce(other) - self.value, self.d)

    def __mul__(self, other):
        return FieldScalar(self.value * self._coerce(other), self.d)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldScalar(-self.value, self.d)

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.d == other.d and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.d
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.d))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def inverse(self) -> FieldScalar:
        return FieldScalar(inverse_mod(self.value, self.d), self.d)


def field_inverse(a: FieldScalar) -> FieldScalar:
    return a.inverse()


@dataclass(frozen=True)
class PhaseExponent:
    """The phase tau^exponent with tau = exp(i*pi/d)."""

    exponent: int
    d: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", int(self.exponent) % (2 * self.d))

    @classmethod
    def omega_power(cls, k: int, d: int) -> PhaseExponent:
        """omega^k, i.e. tau^(2k)."""
        return cls(2 * k, d)

    def __add__(self, other: PhaseExponent) -> PhaseExponent:
        if other.d != self.d:
            raise ValueError("phase dimensions differ")
        return PhaseExponent(self.exponent + other.exponent, self.d)

    def __neg__(self) -> PhaseExponent:
        return PhaseExponent(-self.exponent, self.d)

    def __sub__(self, other: PhaseExponent) -> PhaseExponent:
        return self + (-other)

    @property
    def value(self) -> complex:
        return phase_value(self.exponent, self.d)


def phase_value(exponent, d: int | None = None) -> complex:
    """exp(i*pi*exponent/d); accepts an int or a PhaseExponent."""
    if isinstance(exponent, PhaseExponent):
        d = exponent.d
        exponent = exponent.exponent
    e = int(exponent) % (2 * d)
    # exact values on the axes keep products like tau^d == -1 free of rounding
    if e == 0:
        return 1 + 0j
    if e == d:
        return -1 + 0j
    if 2 * e == d:
        return 1j
    if 2 * e == 3 * d:
        return -1j
    return complex(np.exp(1j * np.pi * e / d))
