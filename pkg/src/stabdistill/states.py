"""Bell-diagonal and dense bipartite qudit states.

Bell probabilities are held as a d x d array indexed ``[k, l]`` and serialized
k-fastest: Omega_00, Omega_10, ..., Omega_{d-1,0}, Omega_01, ...
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .field_phase import check_prime
from .stabilizer import ErrorDistribution
from .weyl import ErrorElement, bell_basis, bell_vector


class InvalidMixture(ValueError):
    pass


class InvalidState(ValueError):
    pass


@dataclass(frozen=True)
class BdsState:
    d: int
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_prime(self.d)
        p = np.array(self.probs, dtype=float).reshape(self.d, self.d)
        if np.any(p < -1e-12):
            raise InvalidMixture("negative Bell probability")
        if abs(p.sum() - 1) > 1e-9:
            raise InvalidMixture(f"Bell probabilities sum to {p.sum()!r}")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_list(cls, values, d: int | None = None) -> BdsState:
        """From a k-fastest list of d^2 probabilities."""
        values = np.asarray(values, dtype=float)
        if d is None:
            d = int(round(np.sqrt(values.size)))
        if values.size != d * d:
            raise InvalidState(f"need {d * d} Bell probabilities, got {values.size}")
        return cls(d, values.reshape(d, d).T)

    def to_list(self) -> list[float]:
        return [float(v) for v in self.probs.T.ravel()]

    def fidelity(self, label=(0, 0)) -> float:
        k, l = label
        return float(self.probs[k % self.d, l % self.d])

    def to_dense(self) -> DenseState:
        basis = bell_basis(self.d)
        weights = np.array(
            [self.probs[e.k[0], e.l[0]] for e in _single_labels(self.d)], dtype=float
        )
        rho = (basis * weights) @ basis.conj().T
        return DenseState(self.d, rho)


def _single_labels(d: int) -> list[ErrorElement]:
    return [ErrorElement.from_index(i, 1, d) for i in range(d * d)]


@dataclass(frozen=True)
class DenseState:
    """Density matrix on C^d (x) C^d, Alice's qudit first."""

    d: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_prime(self.d)
        m = np.array(self.matrix, dtype=complex)
        n = self.d**2
        if m.shape != (n, n):
            raise InvalidState(f"dense state must be {n}x{n}")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise InvalidState("matrix is not Hermitian")
        if abs(np.trace(m).real - 1) > 1e-10:
            raise InvalidState("trace is not 1")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise InvalidState("matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def fidelity(self, label=(0, 0)) -> float:
        v = bell_vector(ErrorElement.from_kl([label[0]], [label[1]], self.d))
        return float(np.real(v.conj() @ self.matrix @ v))


def fidelity(state, label=(0, 0)) -> float:
    return state.fidelity(label)


def bell_diagonal(rho: np.ndarray, d: int) -> np.ndarray:
    """<Omega_kl| rho |Omega_kl> as a d x d array ``[k, l]``."""
    basis = bell_basis(d)
    diag = np.real(np.einsum("ij,ik,kj->j", basis.conj(), rho, basis))
    out = np.zeros((d, d))
    for e, v in zip(_single_labels(d), diag):
        out[e.k[0], e.l[0]] = v
    return out


def weyl_twirl(state: DenseState) -> BdsState:
    """Project onto the Bell diagonal; every <Omega_kl|rho|Omega_kl> is kept."""
    if isinstance(state, BdsState):
        return state
    p = bell_diagonal(state.matrix, state.d)
    p = np.clip(p, 0.0, None)
    return BdsState(state.d, p / p.sum())


def isotropic(d: int, p: float) -> BdsState:
    """p |Omega_00><Omega_00| + (1 - p) * maximally mixed."""
    probs = np.full((d, d), (1 - p) / d**2)
    probs[0, 0] += p
    if probs.min() < -1e-15:
        raise InvalidMixture(f"isotropic parameter p={p} gives negative weights for d={d}")
    return BdsState(d, np.clip(probs, 0, None))


def offline(p: float) -> BdsState:
    """d = 3 mixture of (Omega_00 + Omega_10 + Omega_01)/3 with white noise."""
    if not 0 <= p <= 1:
        raise InvalidMixture("off-line parameter must lie in [0, 1]")
    probs = np.full((3, 3), (1 - p) / 9)
    for k, l in ((0, 0), (1, 0), (0, 1)):
        probs[k, l] += p / 3
    return BdsState(3, probs)


def random_pure(d: int, seed) -> DenseState:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    psi = rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)
    psi /= np.linalg.norm(psi)
    return DenseState(d, np.outer(psi, psi.conj()))


def random_pure_in_band(d: int, lo: float, hi: float, seed) -> DenseState:
    """Haar pure state conditioned on lo <= F(0,0) < hi.

    Under the Haar measure F = |<Omega_00|psi>|^2 is Beta(1, D - 1) with D = d^2
    and the component orthogonal to Omega_00 is Haar on the complement, so the
    conditional law is sampled directly instead of by rejection.
    """
    if not 0 <= lo < hi <= 1:
        raise ValueError("need 0 <= lo < hi <= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dim = d * d
    cdf = lambda f: 1 - (1 - f) ** (dim - 1)  # noqa: E731
    c = cdf(lo) + rng.random() * (cdf(hi) - cdf(lo))
    f = 1 - (1 - c) ** (1 / (dim - 1))
    omega = bell_vector(ErrorElement.zero(1, d))
    perp = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    perp -= omega * (omega.conj() @ perp)
    perp /= np.linalg.norm(perp)
    psi = np.sqrt(f) * omega + np.sqrt(1 - f) * perp
    return DenseState(d, np.outer(psi, psi.conj()))


def two_copy_distribution(bds: BdsState) -> ErrorDistribution:
    """p(e) = p_{k1,l1} p_{k2,l2} in the (k1, k2, l1, l2) index layout."""
    p = bds.probs
    joint = np.einsum("ac,bd->abcd", p, p)
    return ErrorDistribution(bds.d, joint.ravel())


# --- JSON state files -------------------------------------------------------


def state_to_dict(state) -> dict:
    if isinstance(state, BdsState):
        return {"d": state.d, "kind": "bds", "bell_probs": state.to_list()}
    m = state.matrix
    return {
        "d": state.d,
        "kind": "dense",
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def state_from_dict(data: dict):
    try:
        d = int(data["d"])
        kind = data["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidState(f"state file needs 'd' and 'kind': {exc}") from None
    if kind == "bds":
        return BdsState.from_list(data["bell_probs"], d)
    if kind == "dense":
        arr = np.asarray(data["matrix"], dtype=float)
        if arr.ndim != 3 or arr.shape[-1] != 2:
            raise InvalidState("'matrix' must be a nested list of [re, im] pairs")
        return DenseState(d, arr[..., 0] + 1j * arr[..., 1])
    raise InvalidState(f"unknown state kind {kind!r}")


def load_state(path) -> BdsState | DenseState:
    return state_from_dict(json.loads(Path(path).read_text()))


def save_state(state, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state), indent=2) + "\n")
