"""Weyl-Heisenberg error elements and their matrix realizations.

An error element e = (k, l) with k, l in Z_d^N labels the operator
W(e) = W_{k_1,l_1} (x) ... (x) W_{k_N,l_N}, where

    W_{k,l} = sum_j omega^(j k) |j><j + l|.

Bipartite vectors use the AABB qudit ordering: all of Alice's qudits first
(copy 1..N), then all of Bob's.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .field_phase import PhaseExponent, check_prime, half_mod, inverse_mod, phase_value


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ErrorElement:
    """Label (k, l) of an N-copy Weyl error.

    Ordering is lexicographic on ``flat`` = (k_1..k_N, l_1..l_N), which is the
    deterministic tie-break used throughout the package.
    """

    flat: tuple
    d: int

    def __post_init__(self):
        if len(self.flat) % 2:
            raise ValueError("flat layout needs an even number of entries")
        object.__setattr__(self, "flat", tuple(int(v) % self.d for v in self.flat))

    @classmethod
    def from_kl(cls, k: Sequence[int], l: Sequence[int], d: int) -> ErrorElement:
        if len(k) != len(l):
            raise DimensionMismatch("k and l must have the same length")
        return cls(tuple(k) + tuple(l), d)

    @classmethod
    def from_copies(cls, pairs: Sequence[tuple[int, int]], d: int) -> ErrorElement:
        """Build from per-copy pairs [(k_1, l_1), (k_2, l_2), ...]."""
        k = [p[0] for p in pairs]
        l = [p[1] for p in pairs]
        return cls.from_kl(k, l, d)

    @classmethod
    def zero(cls, n_copies: int, d: int) -> ErrorElement:
        return cls((0,) * (2 * n_copies), d)

    @classmethod
    def from_index(cls, index: int, n_copies: int, d: int) -> ErrorElement:
        digits = []
        for _ in range(2 * n_copies):
            digits.append(index % d)
            index //= d
        return cls(tuple(reversed(digits)), d)

    @property
    def n_copies(self) -> int:
        return len(self.flat) // 2

    @property
    def k(self) -> tuple:
        return self.flat[: self.n_copies]

    @property
    def l(self) -> tuple:
        return self.flat[self.n_copies :]

    def copy_pair(self, n: int) -> tuple[int, int]:
        """(k_n, l_n) of copy ``n`` (0-based)."""
        return self.k[n], self.l[n]

    @property
    def index(self) -> int:
        """Position of this element in the base-d enumeration of ``flat``."""
        out = 0
        for v in self.flat:
            out = out * self.d + v
        return out

    def is_zero(self) -> bool:
        return not any(self.flat)

    def _check(self, other: ErrorElement):
        if self.d != other.d or len(self.flat) != len(other.flat):
            raise DimensionMismatch(
                f"elements differ in shape: d={self.d},N={self.n_copies} "
                f"vs d={other.d},N={other.n_copies}"
            )

    def __add__(self, other: ErrorElement) -> ErrorElement:
        self._check(other)
        return ErrorElement(tuple(a + b for a, b in zip(self.flat, other.flat)), self.d)

    def __neg__(self) -> ErrorElement:
        return ErrorElement(tuple(-a for a in self.flat), self.d)

    def __sub__(self, other: ErrorElement) -> ErrorElement:
        return self + (-other)

    def scale(self, m: int) -> ErrorElement:
        return ErrorElement(tuple(m * a for a in self.flat), self.d)

    def __rmul__(self, m: int) -> ErrorElement:
        return self.scale(m)

    def __repr__(self):
        return f"ErrorElement(k={self.k}, l={self.l}, d={self.d})"


@dataclass(frozen=True)
class PhasedWeyl:
    """phase * W(element), with the phase tracked exactly."""

    phase: PhaseExponent
    element: ErrorElement

    def dense(self) -> np.ndarray:
        return phase_value(self.phase) * dense_matrix(self.element)


def all_elements(n_copies: int, d: int) -> list[ErrorElement]:
    return [ErrorElement.from_index(i, n_copies, d) for i in range(d ** (2 * n_copies))]


def multiply(e: ErrorElement, f: ErrorElement) -> PhasedWeyl:
    """W(e) W(f) = omega^(l(e).k(f)) W(e + f)."""
    e._check(f)
    lk = sum(a * b for a, b in zip(e.l, f.k))
    return PhasedWeyl(PhaseExponent.omega_power(lk, e.d), e + f)


def adjoint(e: ErrorElement) -> PhasedWeyl:
    """W(e)^dagger = omega^(k.l) W(-e)."""
    kl = sum(a * b for a, b in zip(e.k, e.l))
    return PhasedWeyl(PhaseExponent.omega_power(kl, e.d), -e)


def symplectic_product(e: ErrorElement, f: ErrorElement) -> int:
    """<e, f> = sum_i l_i(e) k_i(f) - k_i(e) l_i(f)  (mod d).

    W(e) W(f) = omega^<e,f> W(f) W(e).
    """
    e._check(f)
    return sum(le * kf - ke * lf for ke, le, kf, lf in zip(e.k, e.l, f.k, f.l)) % e.d


@lru_cache(maxsize=None)
def _weyl_single(k: int, l: int, d: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[j, (j + l) % d] = phase_value(2 * j * k, d)
    m.setflags(write=False)
    return m


def weyl_matrix(k: int, l: int, d: int) -> np.ndarray:
    """Single-qudit W_{k,l} as a dense d x d array."""
    return _weyl_single(k % d, l % d, d).copy()


def dense_matrix(e: ErrorElement) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for n in range(e.n_copies):
        out = np.kron(out, _weyl_single(e.k[n], e.l[n], e.d))
    return out


def bell_vector(e: ErrorElement) -> np.ndarray:
    """|Omega(e)> = (W(e) (x) 1)|Omega_00>^N in AABB ordering."""
    w = dense_matrix(e)
    return w.reshape(-1) / np.sqrt(w.shape[0])


def bell_basis(d: int, n_copies: int = 1) -> np.ndarray:
    """Columns are Bell vectors ordered by ``ErrorElement.index``."""
    return np.column_stack([bell_vector(e) for e in all_elements(n_copies, d)])


# --- single-qudit eigensystems -------------------------------------------------


@dataclass(frozen=True)
class EigenSystem:
    """Eigenbasis of W_{a,b}: ``vectors[:, lam]`` has eigenvalue ``eigenvalues[lam]``."""

    a: int
    b: int
    d: int
    eigenvalues: tuple
    vectors: np.ndarray

    def value(self, lam: int) -> complex:
        return phase_value(self.eigenvalues[lam % self.d])


def eigenvalue_exponent(a: int, b: int, lam: int, d: int) -> int:
    """tau-exponent of the eigenvalue labelled ``lam`` of W_{a,b}.

    omega^lam for odd d; omega^(lam - ab/2) for d = 2. The trivial operator has
    all eigenvalues 1.
    """
    a, b = a % d, b % d
    if a == 0 and b == 0:
        return 0
    if d == 2:
        return (2 * lam - a * b) % 4
    return (2 * lam) % (2 * d)


@lru_cache(maxsize=None)
def _eigensystem(a: int, b: int, d: int) -> EigenSystem:
    vecs = np.zeros((d, d), dtype=complex)
    for lam in range(d):
        if a == 0 and b == 0:
            vecs[lam, lam] = 1
        elif b == 0:
            vecs[(lam * inverse_mod(a, d)) % d, lam] = 1
        elif d == 2:
            vecs[0, lam] = 1 / np.sqrt(2)
            vecs[1, lam] = phase_value(eigenvalue_exponent(a, b, lam, d), d) / np.sqrt(2)
        else:
            binv = inverse_mod(b, d)
            for j in range(d):
                u = (j * binv) % d
                gamma = u * lam - (u * (u - 1) // 2) * a * b
                vecs[j, lam] = phase_value(2 * gamma, d) / np.sqrt(d)
    vals = tuple(PhaseExponent(eigenvalue_exponent(a, b, lam, d), d) for lam in range(d))
    vecs.setflags(write=False)
    return EigenSystem(a, b, d, vals, vecs)


def eigensystem(a: int, b: int, d: int) -> EigenSystem:
    d = check_prime(d)
    return _eigensystem(int(a) % d, int(b) % d, d)


@dataclass(frozen=True)
class ShiftMap:
    """W_{x,y}|w_lam> = tau^(2*slope*lam + offset) |w_{lam + shift}>.

    ``slope`` and ``shift`` live in Z_d; ``offset`` is a tau-exponent mod 2d.
    """

    shift: int
    slope: int
    offset: int
    d: int

    def phase(self, lam: int) -> PhaseExponent:
        return PhaseExponent(2 * self.slope * lam + self.offset, self.d)


def eigenvector_shift(a: int, b: int, x: int, y: int, d: int) -> ShiftMap:
    """Label shift and affine phase of W_{x,y} acting on the eigenbasis of W_{a,b}."""
    a, b, x, y = a % d, b % d, x % d, y % d
    if a == 0 and b == 0:
        return ShiftMap((-y) % d, x, (-2 * x * y) % (2 * d), d)
    if b == 0:
        ainv = inverse_mod(a, d)
        return ShiftMap((-a * y) % d, (x * ainv) % d, (-2 * x * y) % (2 * d), d)
    shift = (b * x - a * y) % d
    if d == 2:
        return ShiftMap(shift, y, (-y * a * b) % 4, d)
    v = (y * inverse_mod(b, d)) % d
    c = half_mod(-a * y * (v - 1), d)
    return ShiftMap(shift, v, (2 * c) % (2 * d), d)
