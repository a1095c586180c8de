"""Numerical verification suites behind ``stabdistill verify``.

Each suite returns a list of :class:`Check` results holding the worst residual
seen for one invariant and the tolerance it is held to.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import encoding as enc_mod
from .encoding import canonic_encoding, coset_action, conjugate_error, random_composed_encoding
from .field_phase import phase_value
from .protocol import (
    apply_local_weyl,
    coset_fidelity_tensor,
    coset_probabilities,
    fimax_select,
    generic_step,
    stabilizer_table,
    standard_form_oracle,
    two_copy_dense,
)
from .states import BdsState, bell_diagonal, two_copy_distribution
from .weyl import (
    ErrorElement,
    adjoint,
    all_elements,
    bell_basis,
    dense_matrix,
    eigensystem,
    eigenvector_shift,
    multiply,
    symplectic_product,
    weyl_matrix,
)


@dataclass
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<48s} max residual {self.residual:.3e} (tol {self.tol:.0e})"


def random_bds(d: int, rng: np.random.Generator) -> BdsState:
    return BdsState(d, rng.dirichlet(np.ones(d * d)).reshape(d, d))


def _pairs(d: int, rng: np.random.Generator, n_random: int = 100):
    """All single-copy pairs plus random two-copy pairs."""
    ones = all_elements(1, d)
    yield from itertools.product(ones, ones)
    for _ in range(n_random):
        yield (
            ErrorElement(tuple(rng.integers(0, d, 4)), d),
            ErrorElement(tuple(rng.integers(0, d, 4)), d),
        )


def algebra_suite(d: int, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    group = adj = bil = 0.0
    for e, f in _pairs(d, rng):
        pw = multiply(e, f)
        group = max(group, np.abs(pw.dense() - dense_matrix(e) @ dense_matrix(f)).max())
        adj = max(adj, np.abs(adjoint(e).dense() - dense_matrix(e).conj().T).max())
        g = ErrorElement(tuple(rng.integers(0, d, len(e.flat))), d)
        bil = max(bil, (symplectic_product(g, e + f) - symplectic_product(g, e) - symplectic_product(g, f)) % d)
    eig = shift = 0.0
    for a, b in itertools.product(range(d), repeat=2):
        es = eigensystem(a, b, d)
        v = es.vectors
        eig = max(eig, np.abs(v.conj().T @ v - np.eye(d)).max())
        for lam in range(d):
            eig = max(eig, np.linalg.norm(weyl_matrix(a, b, d) @ v[:, lam] - es.value(lam) * v[:, lam]))
        for x, y in itertools.product(range(d), repeat=2):
            sm = eigenvector_shift(a, b, x, y, d)
            w = weyl_matrix(x, y, d)
            for lam in range(d):
                r = w @ v[:, lam] - phase_value(sm.phase(lam)) * v[:, (lam + sm.shift) % d]
                shift = max(shift, np.linalg.norm(r))
    mult = 0.0
    for g in all_elements(2, d)[1:]:
        ev = np.linalg.eigvals(dense_matrix(g))
        angles = np.round(np.angle(ev) * d / np.pi).astype(int) % (2 * d)
        counts = np.unique(angles, return_counts=True)[1]
        mult = max(mult, abs(len(counts) - d) + np.abs(counts - d).max())
    trace_id = 0.0
    for _ in range(50):
        dim = int(rng.integers(2, 10))
        m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        omega = np.eye(dim).reshape(-1) / np.sqrt(dim)
        lhs = omega.conj() @ np.kron(m, np.eye(dim)) @ omega
        trace_id = max(trace_id, abs(lhs - np.trace(m) / dim))
    return [
        Check(f"d={d} Weyl group law", group, 1e-12),
        Check(f"d={d} adjoint", adj, 1e-12),
        Check(f"d={d} symplectic bilinearity", bil, 0),
        Check(f"d={d} eigensystems", eig, 1e-12),
        Check(f"d={d} eigenvector shifts", shift, 1e-12),
        Check(f"d={d} generator spectra (d values, multiplicity d)", mult, 0),
        Check(f"d={d} maximally entangled trace identity", trace_id, 1e-12),
    ]


def encodings_suite(d: int, seed: int = 0, n_composed: int = 10) -> list[Check]:
    rng = np.random.default_rng(seed)
    table = stabilizer_table(d)
    elements = all_elements(2, d)
    code = analytic = syn_shift = kernel = basis = prop6 = 0.0
    f_label = f_coset = 0.0
    for i, st in enumerate(table.stabilizers):
        u = canonic_encoding(st)
        code = max(code, u.codeword_residual())
        for e in elements:
            blocks = conjugate_error(u, e)
            act = enc_mod.error_action(st, e)
            for x in range(d):
                analytic = max(analytic, np.abs(blocks.blocks[x] - act.block(x)).max())
                moved = dense_matrix(e) @ u.unitary[:, x * d : (x + 1) * d]
                proj = u.projector((x + blocks.syndrome) % d)
                syn_shift = max(syn_shift, np.abs(moved - proj @ moved).max())
        for c in table.cosets[i]:
            trivial = coset_action(st, c).label == (0, 0)
            if c.syndrome == 0 and trivial != c.is_stabilizer():
                kernel = 1.0
        for s in range(d):
            cs = [c for c in table.cosets[i] if c.syndrome == s]
            states = np.column_stack(
                [np.kron(weyl_matrix(*coset_action(st, c).label, d), np.eye(d)).reshape(d**2, d**2)
                 @ (np.eye(d).reshape(-1) / np.sqrt(d)) for c in cs]
            )
            basis = max(basis, np.abs(states.conj().T @ states - np.eye(d * d)).max())
        encs = [u] + [random_composed_encoding(u, rng) for _ in range(n_composed)]
        for v in encs[1:]:
            ys = [
                (u.unitary.conj().T @ v.unitary)[x * d : (x + 1) * d, x * d : (x + 1) * d]
                for x in range(d)
            ]
            e = elements[int(rng.integers(1, d**4))]
            tu, tv = conjugate_error(u, e), conjugate_error(v, e)
            for x in range(d):
                y = (x + tu.syndrome) % d
                prop6 = max(prop6, np.abs(tv.blocks[x] - ys[y].conj().T @ tu.blocks[x] @ ys[x]).max())
        for v in encs:
            f = coset_fidelity_tensor(v)
            f_label = max(f_label, np.abs(f.sum(axis=(2, 3)) - 1).max())
            for s in range(d):
                mask = table.coset_syndrome[i] == s
                f_coset = max(f_coset, np.abs(f[mask].sum(axis=0) - 1).max())
    return [
        Check(f"d={d} canonic codeword property", code, 1e-12),
        Check(f"d={d} analytic coset actions vs dense", analytic, 1e-10),
        Check(f"d={d} syndrome shift of codewords", syn_shift, 1e-10),
        Check(f"d={d} trivial action iff stabilizer (in E(0))", kernel, 0),
        Check(f"d={d} coset action states orthonormal", basis, 1e-10),
        Check(f"d={d} composed encoding block transform", prop6, 1e-10),
        Check(f"d={d} sum over labels of f_C", f_label, 1e-9),
        Check(f"d={d} sum over cosets of f_C", f_coset, 1e-9),
    ]


def oracle_suite(d: int, seed: int = 0, n_states: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed)
    table = stabilizer_table(d)
    basis = bell_basis(d)
    equiv = offdiag = total = 0.0
    for _ in range(n_states):
        bds = random_bds(d, rng)
        rho2 = two_copy_dense(bds)
        for i, st in enumerate(table.stabilizers):
            u = canonic_encoding(st)
            acc = 0.0
            for a, b in itertools.product(range(d), repeat=2):
                s = (a - b) % d
                out, prob = standard_form_oracle(rho2, u, a, b)
                acc += prob
                c_hat = next(c for c in table.cosets[i] if c.syndrome == s)
                fast, p_s = generic_step(bds, st, s, c_hat)
                lab = coset_action(st, c_hat).label
                corrected = apply_local_weyl(out, ((-lab[0]) % d, (-lab[1]) % d))
                m = basis.conj().T @ corrected.matrix @ basis
                equiv = max(equiv, np.abs(bell_diagonal(corrected.matrix, d) - fast.probs).max())
                equiv = max(equiv, abs(prob - p_s / d))
                offdiag = max(offdiag, np.abs(m - np.diag(np.diag(m))).max())
            total = max(total, abs(acc - 1))
    return [
        Check(f"d={d} dense oracle vs fast path", equiv, 1e-9),
        Check(f"d={d} oracle output Bell-diagonal", offdiag, 1e-9),
        Check(f"d={d} outcome probabilities sum to 1", total, 1e-9),
    ]


def maximality_suite(d: int, seed: int = 0, n_states: int = 100, n_encodings: int = 20) -> list[Check]:
    """Max one-step fidelity over stabilizers, composed encodings, labels, syndromes and codespaces."""
    rng = np.random.default_rng(seed)
    table = stabilizer_table(d)
    tensors = []
    for st in table.stabilizers:
        u = canonic_encoding(st)
        encs = [u] + [random_composed_encoding(u, rng) for _ in range(n_encodings)]
        tensors.append(np.stack([coset_fidelity_tensor(v) for v in encs]))
    f_all = np.stack(tensors)  # (stab, enc, coset, block, k, l)
    excess = -np.inf
    for _ in range(n_states):
        bds = random_bds(d, rng)
        pred = fimax_select(bds).predicted_fidelity
        pc, pe = coset_probabilities(table, two_copy_distribution(bds).probs)
        for s in range(d):
            mask = table.coset_syndrome == s  # (stab, coset)
            w = np.where(mask, pc, 0.0) / np.where(pe[:, [s]] > 0, pe[:, [s]], np.inf)
            fid = np.einsum("ic,iecykl->ieykl", w, f_all)
            excess = max(excess, float(fid.max() - pred))
    return [Check(f"d={d} no protocol beats FIMAX fidelity", max(excess, 0.0), 1e-9)]


SUITES = {
    "algebra": algebra_suite,
    "encodings": encodings_suite,
    "oracle": oracle_suite,
    "maximality": maximality_suite,
}


def run_suite(name: str, ds, seed: int = 0) -> list[Check]:
    fn = SUITES[name]
    out = []
    for d in ds:
        out.extend(fn(d, seed=seed))
    return out
