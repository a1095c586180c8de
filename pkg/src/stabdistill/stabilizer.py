"""Single-generator stabilizers on two copies, syndrome classes and cosets.

Two-copy error elements use the flat layout (k_1, k_2, l_1, l_2). A stabilizer
is identified with the cyclic subgroup {0, g, ..., (d-1) g} of error elements
and stored through its lexicographically smallest nonzero member.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .field_phase import check_prime
from .weyl import ErrorElement, all_elements, symplectic_product


class InvalidGenerator(ValueError):
    pass


def canonical_generator(e: ErrorElement) -> ErrorElement:
    if e.is_zero():
        raise InvalidGenerator("the zero element does not generate a stabilizer")
    return min(e.scale(m) for m in range(1, e.d))


@dataclass(frozen=True, order=True)
class Stabilizer:
    generator: ErrorElement

    def __post_init__(self):
        object.__setattr__(self, "generator", canonical_generator(self.generator))

    @property
    def d(self) -> int:
        return self.generator.d

    @cached_property
    def members(self) -> tuple:
        """Subgroup elements m*g for m = 0..d-1."""
        return tuple(self.generator.scale(m) for m in range(self.d))

    def factors(self) -> list[tuple[int, int]]:
        """Per-copy Weyl labels (a_n, b_n) of the generator."""
        g = self.generator
        return [g.copy_pair(n) for n in range(g.n_copies)]

    def syndrome(self, e: ErrorElement) -> int:
        return symplectic_product(self.generator, e)

    def coset_of(self, e: ErrorElement) -> CosetId:
        rep = min(e + h for h in self.members)
        return CosetId(self, rep, self.syndrome(e))

    def __repr__(self):
        return f"Stabilizer(g={self.generator.flat}, d={self.d})"


@dataclass(frozen=True, order=True)
class CosetId:
    stabilizer: Stabilizer
    representative: ErrorElement
    syndrome: int

    @property
    def members(self) -> list[ErrorElement]:
        return [self.representative + h for h in self.stabilizer.members]

    def is_stabilizer(self) -> bool:
        return self.representative.is_zero()


@lru_cache(maxsize=None)
def _enumerate(d: int) -> tuple:
    seen = {}
    for e in all_elements(2, d)[1:]:
        g = canonical_generator(e)
        seen.setdefault(g, Stabilizer(g))
    return tuple(seen[g] for g in sorted(seen))


def enumerate_stabilizers(d: int) -> list[Stabilizer]:
    """All (d^2 + 1)(d + 1) cyclic stabilizers of two-copy errors, sorted."""
    return list(_enumerate(check_prime(d)))


def n_stabilizers(d: int) -> int:
    return (d * d + 1) * (d + 1)


def syndrome_partition(stab: Stabilizer, s: int) -> set[ErrorElement]:
    s %= stab.d
    return {e for e in all_elements(2, stab.d) if stab.syndrome(e) == s}


def cosets_in(stab: Stabilizer, s: int) -> list[CosetId]:
    """The d^2 cosets e + G_S contained in E(s), ordered by representative."""
    reps = {stab.coset_of(e) for e in syndrome_partition(stab, s)}
    return sorted(reps, key=lambda c: c.representative)


def all_cosets(stab: Stabilizer) -> list[CosetId]:
    return sorted(
        {stab.coset_of(e) for e in all_elements(2, stab.d)},
        key=lambda c: (c.syndrome, c.representative),
    )


@dataclass(frozen=True)
class ErrorDistribution:
    """Probability vector over two-copy error elements, indexed by ``ErrorElement.index``."""

    d: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (self.d**4,):
            raise ValueError(f"expected {self.d ** 4} probabilities, got shape {p.shape}")
        if np.any(p < -1e-15) or abs(p.sum() - 1) > 1e-9:
            raise ValueError("not a probability distribution")
        object.__setattr__(self, "probs", p)

    def __getitem__(self, e: ErrorElement) -> float:
        return float(self.probs[e.index])

    @classmethod
    def uniform(cls, d: int) -> ErrorDistribution:
        return cls(d, np.full(d**4, 1.0 / d**4))


def coset_probability(dist: ErrorDistribution, c: CosetId) -> float:
    return float(sum(dist[e] for e in c.members))


def partition_probability(dist: ErrorDistribution, stab: Stabilizer, s: int) -> float:
    return float(sum(dist[e] for e in syndrome_partition(stab, s)))
