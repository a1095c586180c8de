"""Two-copy stabilizer distillation: FIMAX, a fixed-stabilizer runner and a dense oracle.

Fast path
    For a Bell-diagonal input the output of one round only depends on the
    coset probabilities P(C) inside the kept syndrome class E(s) and on the
    Weyl labels of the canonic coset actions. ``fimax_select`` maximizes
    P(C)/P(E(s)) over every stabilizer and coset; ``fimax_step`` applies the
    corresponding update to the Bell probabilities.

Dense path
    ``standard_form_oracle`` projects an explicit A1 A2 B1 B2 density matrix
    onto the measured codespaces, decodes with U^-1 (x) (U*)^-1 and traces
    out the first pair. It is the reference the fast path is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .encoding import EncodingMatrix, canonic_encoding, coset_action, conjugate_error
from .field_phase import check_prime
from .stabilizer import CosetId, Stabilizer, all_cosets, enumerate_stabilizers
from .states import BdsState, DenseState, bell_diagonal, two_copy_distribution, weyl_twirl
from .weyl import ErrorElement, all_elements, weyl_matrix

STALL_TOL = 1e-12
TIE_TOL = 1e-12


class DegenerateInput(ValueError):
    pass


class ImpossiblePostselection(ValueError):
    pass


# --- precomputed structure ----------------------------------------------------


@dataclass(frozen=True)
class StabilizerTable:
    """Index arrays for all stabilizers at one d.

    ``coset_index[i, e]`` is the position of the coset of element ``e`` among
    the d^3 cosets of stabilizer ``i``; cosets are ordered by representative.
    """

    d: int
    stabilizers: tuple
    cosets: tuple
    syndrome: np.ndarray = field(repr=False)
    coset_index: np.ndarray = field(repr=False)
    coset_syndrome: np.ndarray = field(repr=False)
    coset_label: np.ndarray = field(repr=False)

    def position(self, stab: Stabilizer) -> int:
        return self.stabilizers.index(stab)


@lru_cache(maxsize=None)
def stabilizer_table(d: int) -> StabilizerTable:
    d = check_prime(d)
    stabs = tuple(enumerate_stabilizers(d))
    elements = all_elements(2, d)
    n_el, n_c = d**4, d**3
    syn = np.zeros((len(stabs), n_el), dtype=np.int64)
    cidx = np.zeros((len(stabs), n_el), dtype=np.int64)
    csyn = np.zeros((len(stabs), n_c), dtype=np.int64)
    clab = np.zeros((len(stabs), n_c, 2), dtype=np.int64)
    cosets = []
    for i, st in enumerate(stabs):
        cs = sorted(all_cosets(st), key=lambda c: c.representative)
        pos = {}
        for j, c in enumerate(cs):
            csyn[i, j] = c.syndrome
            clab[i, j] = coset_action(st, c).label
            for e in c.members:
                pos[e.index] = j
        for e in elements:
            syn[i, e.index] = st.syndrome(e)
            cidx[i, e.index] = pos[e.index]
        cosets.append(tuple(cs))
    for arr in (syn, cidx, csyn, clab):
        arr.setflags(write=False)
    return StabilizerTable(d, stabs, tuple(cosets), syn, cidx, csyn, clab)


def coset_probabilities(table: StabilizerTable, p2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P(C) with shape (n_stab, d^3), P(E(s)) with shape (n_stab, d))."""
    n_s, d = len(table.stabilizers), table.d
    offs = np.arange(n_s)[:, None]
    pc = np.bincount((table.coset_index + offs * d**3).ravel(), np.tile(p2, n_s), n_s * d**3)
    pe = np.bincount((table.syndrome + offs * d).ravel(), np.tile(p2, n_s), n_s * d)
    return pc.reshape(n_s, d**3), pe.reshape(n_s, d)


# --- records ------------------------------------------------------------------


@dataclass(frozen=True)
class FimaxChoice:
    stabilizer: Stabilizer
    coset: CosetId
    syndrome: int
    predicted_fidelity: float
    success_probability: float
    action: tuple
    correction: tuple


@dataclass(frozen=True)
class IterationRecord:
    choice: FimaxChoice
    fidelity_before: float
    fidelity_after: float

    def to_dict(self) -> dict:
        c = self.choice
        return {
            "fidelity_before": self.fidelity_before,
            "fidelity_after": self.fidelity_after,
            "success_probability": c.success_probability,
            "generator": list(c.stabilizer.generator.flat),
            "coset_representative": list(c.coset.representative.flat),
            "syndrome": int(c.syndrome),
            "correction": [int(v) for v in c.correction],
        }


@dataclass(frozen=True)
class DistillationRun:
    records: tuple
    reached_target: bool
    efficiency: float
    final_state: object = field(default=None, repr=False, compare=False)

    @property
    def n_iterations(self) -> int:
        return len(self.records)

    def to_dict(self) -> dict:
        return {
            "records": [r.to_dict() for r in self.records],
            "reached_target": bool(self.reached_target),
            "efficiency": float(self.efficiency),
        }


# --- fast path ----------------------------------------------------------------


def _choice(table: StabilizerTable, i: int, j: int, pc, pe) -> FimaxChoice:
    d = table.d
    s = int(table.coset_syndrome[i, j])
    lab = tuple(int(v) for v in table.coset_label[i, j])
    return FimaxChoice(
        stabilizer=table.stabilizers[i],
        coset=table.cosets[i][j],
        syndrome=s,
        predicted_fidelity=float(pc[i, j] / pe[i, s]),
        success_probability=float(pe[i, s]),
        action=lab,
        correction=((-lab[0]) % d, (-lab[1]) % d),
    )


def selection_ratios(bds: BdsState) -> tuple[StabilizerTable, np.ndarray, np.ndarray, np.ndarray]:
    """P(C)/P(E(s)) for every (stabilizer, coset); NaN where P(E(s)) = 0."""
    table = stabilizer_table(bds.d)
    p2 = two_copy_distribution(bds).probs
    pc, pe = coset_probabilities(table, p2)
    denom = np.take_along_axis(pe, table.coset_syndrome, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(denom > 0, pc / np.where(denom > 0, denom, 1), np.nan)
    return table, ratio, pc, pe


def fimax_select(bds: BdsState) -> FimaxChoice:
    table, ratio, pc, pe = selection_ratios(bds)
    if np.all(np.isnan(ratio)):
        raise DegenerateInput("every syndrome class has probability zero")
    best = np.nanmax(ratio)
    # first entry within TIE_TOL of the maximum: stabilizers and cosets are
    # stored in lexicographic order, so this is the deterministic tie-break
    i, j = np.argwhere(np.nan_to_num(ratio, nan=-1.0) >= best - TIE_TOL)[0]
    return _choice(table, int(i), int(j), pc, pe)


def _update(bds: BdsState, table: StabilizerTable, i: int, s: int, correction_label, pc, pe):
    d = bds.d
    if pe[i, s] <= 0:
        raise ImpossiblePostselection(f"P(E({s})) = 0 for {table.stabilizers[i]}")
    out = np.zeros((d, d))
    ck, cl = correction_label
    for j in np.flatnonzero(table.coset_syndrome[i] == s):
        k, l = table.coset_label[i, j]
        out[(k - ck) % d, (l - cl) % d] += pc[i, j]
    return BdsState(d, out / pe[i, s]), float(pe[i, s])


def fimax_step(bds: BdsState) -> tuple[BdsState, IterationRecord]:
    choice = fimax_select(bds)
    table = stabilizer_table(bds.d)
    i = table.position(choice.stabilizer)
    p2 = two_copy_distribution(bds).probs
    pc, pe = coset_probabilities(table, p2)
    out, _ = _update(bds, table, i, choice.syndrome, choice.action, pc, pe)
    return out, IterationRecord(choice, bds.fidelity(), out.fidelity())


def generic_step(
    bds: BdsState, stab: Stabilizer, s: int, correction_coset: CosetId
) -> tuple[BdsState, float]:
    """One round with caller-fixed stabilizer, kept syndrome and correction coset."""
    table = stabilizer_table(bds.d)
    i = table.position(stab)
    p2 = two_copy_distribution(bds).probs
    pc, pe = coset_probabilities(table, p2)
    label = coset_action(stab, correction_coset).label
    return _update(bds, table, i, s % bds.d, label, pc, pe)


# --- coset fidelities ---------------------------------------------------------


@lru_cache(maxsize=None)
def _weyl_stack(d: int) -> np.ndarray:
    stack = np.array([[weyl_matrix(k, l, d) for l in range(d)] for k in range(d)])
    stack.setflags(write=False)
    return stack


def weyl_coefficients(block: np.ndarray) -> np.ndarray:
    """beta[..., k, l] = Tr(W_{k,l}^dag T) / d for a block or a stack of blocks."""
    d = block.shape[-1]
    # Tr(W^dag T) = sum_ij conj(W_ij) T_ij
    return np.einsum("klij,...ij->...kl", _weyl_stack(d).conj(), block) / d


def coset_fidelities(enc: EncodingMatrix, coset: CosetId, block: int | None = None) -> np.ndarray:
    """f_C[k, l] for the action arriving in codespace ``block`` (default: s, i.e. b = 0)."""
    blocks = conjugate_error(enc, coset.representative)
    y = coset.syndrome if block is None else block
    return np.abs(weyl_coefficients(blocks.target_block(y))) ** 2


def coset_fidelity(enc: EncodingMatrix, coset: CosetId, label, block: int | None = None) -> float:
    k, l = label
    return float(coset_fidelities(enc, coset, block)[k % enc.d, l % enc.d])


def coset_fidelity_tensor(enc: EncodingMatrix) -> np.ndarray:
    """f[j, y, k, l] for every coset j (table order) and arrival codespace y."""
    d = enc.d
    table = stabilizer_table(d)
    i = table.position(enc.stabilizer)
    blocks = np.empty((d**3, d, d, d), dtype=complex)
    for j, c in enumerate(table.cosets[i]):
        eb = conjugate_error(enc, c.representative)
        for y in range(d):
            blocks[j, y] = eb.target_block(y)
    return np.abs(weyl_coefficients(blocks)) ** 2


def output_fidelities(bds: BdsState, enc: EncodingMatrix, s: int, block: int | None = None) -> np.ndarray:
    """F[k, l] of the uncorrected output for kept syndrome s, via coset fidelities."""
    table = stabilizer_table(bds.d)
    i = table.position(enc.stabilizer)
    pc, pe = coset_probabilities(table, two_copy_distribution(bds).probs)
    if pe[i, s] <= 0:
        raise ImpossiblePostselection(f"P(E({s})) = 0")
    y = s if block is None else block
    out = np.zeros((bds.d, bds.d))
    for j in np.flatnonzero(table.coset_syndrome[i] == s):
        out += pc[i, j] * coset_fidelities(enc, table.cosets[i][j], y)
    return out / pe[i, s]


# --- dense oracle ---------------------------------------------------------------


def _aabb_perm(d: int) -> np.ndarray:
    # index permutation A1 B1 A2 B2 -> A1 A2 B1 B2
    return np.arange(d**4).reshape(d, d, d, d).transpose(0, 2, 1, 3).ravel()


def two_copy_dense(state) -> np.ndarray:
    """rho (x) rho reordered to A1 A2 B1 B2."""
    if isinstance(state, BdsState):
        state = state.to_dense()
    m = np.kron(state.matrix, state.matrix)
    p = _aabb_perm(state.d)
    return m[np.ix_(p, p)]


def _decode_ops(enc: EncodingMatrix, a: int, b: int) -> np.ndarray:
    u = enc.unitary
    left = u.conj().T @ enc.projector(a)
    right = u.T @ enc.projector(b, conjugate=True)
    return np.kron(left, right)


def _trace_first_pair(sigma: np.ndarray, d: int) -> np.ndarray:
    t = sigma.reshape((d,) * 8)
    # axes: A1 A2 B1 B2 | A1' A2' B1' B2'
    return np.einsum("iajbicjd->abcd", t).reshape(d * d, d * d)


def standard_form_oracle_unnormalized(rho2: np.ndarray, enc: EncodingMatrix, a: int, b: int) -> np.ndarray:
    k = _decode_ops(enc, a, b)
    return _trace_first_pair(k @ rho2 @ k.conj().T, enc.d)


def standard_form_oracle(rho2: np.ndarray, enc: EncodingMatrix, a: int, b: int) -> tuple[DenseState, float]:
    """Measure outcomes (a, b), decode, discard the first pair; returns (state, Prob(a, b))."""
    out = standard_form_oracle_unnormalized(rho2, enc, a, b)
    prob = float(np.trace(out).real)
    if prob <= 1e-14:
        raise ImpossiblePostselection(f"outcome (a={a}, b={b}) has probability {prob:.3e}")
    out = out / prob
    return DenseState(enc.d, (out + out.conj().T) / 2), prob


def apply_local_weyl(state: DenseState, label) -> DenseState:
    """(W_{k,l} (x) 1) rho (W_{k,l} (x) 1)^dag."""
    w = np.kron(weyl_matrix(label[0], label[1], state.d), np.eye(state.d))
    return DenseState(state.d, w @ state.matrix @ w.conj().T)


def dense_fimax_step(state: DenseState, choice: FimaxChoice) -> tuple[DenseState, float]:
    """Run the chosen round on the dense two-copy state, averaged over b with a - b = s."""
    enc = canonic_encoding(choice.stabilizer)
    rho2 = two_copy_dense(state)
    d = state.d
    acc = np.zeros((d * d, d * d), dtype=complex)
    for b in range(d):
        acc += standard_form_oracle_unnormalized(rho2, enc, (b + choice.syndrome) % d, b)
    prob = float(np.trace(acc).real)
    if prob <= 1e-14:
        raise ImpossiblePostselection("kept syndrome class has probability zero")
    out = DenseState(d, (acc + acc.conj().T) / (2 * prob))
    return apply_local_weyl(out, choice.correction), prob


# --- iteration ----------------------------------------------------------------


def efficiency(probabilities) -> float:
    probabilities = list(probabilities)
    return math.prod(probabilities) * 2.0 ** (-len(probabilities))


def distill(
    state,
    target_fidelity: float = 0.999,
    max_iterations: int = 200,
    nonbds_mode: str = "twirl",
) -> DistillationRun:
    """Iterate FIMAX until the target fidelity, a stall or the iteration cap.

    Dense inputs are either twirled once (``"twirl"``) or driven with their
    Bell diagonal as selection data while the dense state itself is
    propagated (``"diag"``).
    """
    if not 0 < target_fidelity < 1:
        raise ValueError("target fidelity must lie in (0, 1)")
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    if nonbds_mode not in ("twirl", "diag"):
        raise ValueError("nonbds_mode must be 'twirl' or 'diag'")
    if isinstance(state, DenseState) and nonbds_mode == "twirl":
        state = weyl_twirl(state)

    records = []
    fid = state.fidelity()
    reached = fid >= target_fidelity
    while not reached and len(records) < max_iterations:
        if isinstance(state, BdsState):
            new, rec = fimax_step(state)
        else:
            choice = fimax_select(BdsState(state.d, bell_diagonal(state.matrix, state.d)))
            new, prob = dense_fimax_step(state, choice)
            rec = IterationRecord(replace(choice, success_probability=prob), fid, new.fidelity())
        if rec.fidelity_after - fid < STALL_TOL:
            break
        records.append(rec)
        state, fid = new, rec.fidelity_after
        reached = fid >= target_fidelity

    eff = efficiency(r.choice.success_probability for r in records) if reached else 0.0
    return DistillationRun(tuple(records), reached, eff, state)
