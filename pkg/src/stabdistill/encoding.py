"""Encodings for two-copy stabilizers and the action of errors inside them.

An encoding U maps |x>|k> (x: codespace label, k: logical qudit) to a codeword
in the eigenspace of W(g) labelled x. Conjugating an error by U gives

    U^dag W(e) U = sum_x |x + s><x| (x) T_{x+s},   s = <g, e>,

and for the canonic encoding each block T is a phase times a single-qudit
Weyl operator whose label depends only on the coset of e.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag
from scipy.stats import unitary_group

from .field_phase import PhaseExponent, phase_value
from .stabilizer import CosetId, Stabilizer
from .weyl import (
    ErrorElement,
    dense_matrix,
    eigensystem,
    eigenvalue_exponent,
    eigenvector_shift,
    symplectic_product,
    weyl_matrix,
)


class StructureViolation(RuntimeError):
    """U^dag W(e) U is not block-shift structured: U is not an encoding."""


class InvalidBlock(ValueError):
    pass


def generator_eigenvalue_exponent(stab: Stabilizer, x: int) -> int:
    """tau-exponent of the W(g) eigenvalue attached to codespace label x."""
    d = stab.d
    exps = [eigenvalue_exponent(a, b, 0, d) for a, b in stab.factors()]
    return (2 * x + sum(exps)) % (2 * d)


def _layout(stab: Stabilizer) -> tuple[int, int]:
    """(copy carrying the logical qudit k, copy carrying the label) or (-1, -1) for case (i)."""
    (a1, b1), (a2, b2) = stab.factors()
    if (a1, b1) != (0, 0) and (a2, b2) != (0, 0):
        return -1, -1
    if (a2, b2) == (0, 0):
        return 1, 0
    return 0, 1


@dataclass(frozen=True)
class EncodingMatrix:
    stabilizer: Stabilizer
    unitary: np.ndarray = field(repr=False)
    kind: str = "canonic"

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        dim = self.stabilizer.d**2
        if u.shape != (dim, dim):
            raise ValueError(f"encoding must be {dim}x{dim}")
        if np.abs(u.conj().T @ u - np.eye(dim)).max() > 1e-10:
            raise ValueError("encoding is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)

    @property
    def d(self) -> int:
        return self.stabilizer.d

    def codeword(self, x: int, k: int) -> np.ndarray:
        return self.unitary[:, (x % self.d) * self.d + (k % self.d)]

    def codeword_residual(self) -> float:
        """max_x,k || W(g) u_{x,k} - omega_x u_{x,k} ||."""
        wg = dense_matrix(self.stabilizer.generator)
        worst = 0.0
        for x in range(self.d):
            ev = phase_value(generator_eigenvalue_exponent(self.stabilizer, x), self.d)
            for k in range(self.d):
                v = self.codeword(x, k)
                worst = max(worst, float(np.linalg.norm(wg @ v - ev * v)))
        return worst

    def projector(self, x: int, conjugate: bool = False) -> np.ndarray:
        """Projector onto codespace Q(x), or onto Q*(x) for the conjugated code."""
        cols = self.unitary[:, (x % self.d) * self.d : (x % self.d + 1) * self.d]
        if conjugate:
            cols = cols.conj()
        return cols @ cols.conj().T


def canonic_encoding(stab: Stabilizer) -> EncodingMatrix:
    """Product eigenbasis of the generator's single-qudit factors.

    Both factors nontrivial: |x>|k> -> |w1_k>|w2_{x-k}>.
    One factor trivial:      the nontrivial copy carries w_x, the other copy |k>.
    """
    d = stab.d
    (a1, b1), (a2, b2) = stab.factors()
    v1 = eigensystem(a1, b1, d).vectors
    v2 = eigensystem(a2, b2, d).vectors
    kcopy, _ = _layout(stab)
    u = np.zeros((d * d, d * d), dtype=complex)
    for x in range(d):
        for k in range(d):
            if kcopy == -1:
                col = np.kron(v1[:, k], v2[:, (x - k) % d])
            elif kcopy == 1:
                col = np.kron(v1[:, x], v2[:, k])
            else:
                col = np.kron(v1[:, k], v2[:, x])
            u[:, x * d + k] = col
    return EncodingMatrix(stab, u, "canonic")


@dataclass(frozen=True)
class ActionOperator:
    """Block of U_c^dag W(e) U_c leaving source codespace x: phase(x) * W(label).

    ``slope`` and ``offset`` give phase(x) = tau^(2*slope*x + offset).
    """

    coset: CosetId
    label: tuple
    slope: int
    offset: int

    @property
    def d(self) -> int:
        return self.coset.stabilizer.d

    def phase(self, x: int) -> PhaseExponent:
        return PhaseExponent(2 * self.slope * x + self.offset, self.d)

    def block(self, x: int) -> np.ndarray:
        return phase_value(self.phase(x)) * weyl_matrix(*self.label, self.d)


def error_action(stab: Stabilizer, e: ErrorElement) -> ActionOperator:
    """Analytic canonic-encoding action of a single error element."""
    d = stab.d
    factors = stab.factors()
    maps = [
        eigenvector_shift(a, b, *e.copy_pair(n), d) for n, (a, b) in enumerate(factors)
    ]
    kcopy, xcopy = _layout(stab)
    if kcopy == -1:
        m1, m2 = maps
        # |x>|k> -> |w1_k>|w2_{x-k}>
        t = (m1.slope - m2.slope) % d
        sigma_k = m1.shift
        lam_slope = m2.slope
        const = m1.offset + m2.offset
    else:
        mk, mx = maps[kcopy], maps[xcopy]
        t = mk.slope
        sigma_k = mk.shift
        lam_slope = mx.slope
        const = mk.offset + mx.offset
    offset = (const - 2 * t * sigma_k) % (2 * d)
    coset = stab.coset_of(e)
    return ActionOperator(coset, (t, (-sigma_k) % d), lam_slope % d, offset)


def coset_action(stab: Stabilizer, coset: CosetId) -> ActionOperator:
    """Weyl label (and representative phase map) of a coset under U_c."""
    act = error_action(stab, coset.representative)
    return ActionOperator(coset, act.label, act.slope, act.offset)


@dataclass(frozen=True)
class ErrorBlocks:
    """Factorization of V^dag W(e) V: source x -> (x + s, block)."""

    syndrome: int
    blocks: tuple

    def target_block(self, y: int) -> np.ndarray:
        """Block T_y arriving in codespace y."""
        d = len(self.blocks)
        return self.blocks[(y - self.syndrome) % d]


def conjugate_error(enc: EncodingMatrix, e: ErrorElement, tol: float = 1e-8) -> ErrorBlocks:
    d = enc.d
    u = enc.unitary
    m = u.conj().T @ dense_matrix(e) @ u
    s = symplectic_product(enc.stabilizer.generator, e)
    blocks = []
    rest = m.copy()
    for x in range(d):
        y = (x + s) % d
        blk = m[y * d : (y + 1) * d, x * d : (x + 1) * d].copy()
        rest[y * d : (y + 1) * d, x * d : (x + 1) * d] = 0
        blocks.append(blk)
    resid = float(np.abs(rest).max())
    if resid > tol:
        raise StructureViolation(f"off-block residual {resid:.3e} for e={e}")
    return ErrorBlocks(s, tuple(blocks))


def compose_encoding(enc: EncodingMatrix, blocks) -> EncodingMatrix:
    """V = U (sum_x |x><x| (x) Y_x)."""
    d = enc.d
    blocks = [np.asarray(y, dtype=complex) for y in blocks]
    if len(blocks) != d:
        raise InvalidBlock(f"need {d} blocks, got {len(blocks)}")
    for y in blocks:
        if y.shape != (d, d) or np.abs(y.conj().T @ y - np.eye(d)).max() > 1e-12:
            raise InvalidBlock("blocks must be d x d unitaries")
    v = enc.unitary @ block_diag(*blocks)
    return EncodingMatrix(enc.stabilizer, v, "composed")


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_composed_encoding(enc: EncodingMatrix, rng: np.random.Generator) -> EncodingMatrix:
    return compose_encoding(enc, [haar_unitary(enc.d, rng) for _ in range(enc.d)])
