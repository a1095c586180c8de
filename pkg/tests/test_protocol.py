import itertools
import math

import numpy as np
import pytest

from stabdistill.encoding import canonic_encoding, coset_action, random_composed_encoding
from stabdistill.protocol import (
    DegenerateInput,
    ImpossiblePostselection,
    coset_fidelity,
    coset_fidelities,
    dense_fimax_step,
    distill,
    efficiency,
    fimax_select,
    fimax_step,
    generic_step,
    output_fidelities,
    stabilizer_table,
    standard_form_oracle,
    two_copy_dense,
)
from stabdistill.stabilizer import Stabilizer, cosets_in, enumerate_stabilizers
from stabdistill.states import BdsState, DenseState, bell_diagonal, isotropic, offline, random_pure
from stabdistill.weyl import ErrorElement

from conftest import random_bds

P_CMAX = 0.56**2 + 2 * 0.055**2
P_E1 = 0.50335


def test_worked_state_selection(worked_state):
    c = fimax_select(worked_state)
    assert c.syndrome == 1
    assert c.action == (0, 1) and c.correction == (0, 2)
    assert c.success_probability == pytest.approx(P_E1, abs=1e-12)
    assert c.predicted_fidelity == pytest.approx(P_CMAX / P_E1, abs=1e-12)
    # deterministic tie-break lands on the first of several equivalent stabilizers
    assert c.stabilizer.generator.flat == (0, 0, 1, 1)
    assert c.coset.representative.flat == (2, 2, 0, 0)


def test_worked_state_step(worked_state):
    out, rec = fimax_step(worked_state)
    assert rec.fidelity_after == pytest.approx(0.635, abs=1e-3)
    assert rec.fidelity_after == pytest.approx(rec.choice.predicted_fidelity, abs=1e-12)
    rest = sorted(out.to_list()[1:], reverse=True)
    assert rest[:2] == pytest.approx([0.13, 0.13], abs=0.01)
    assert rest[2:] == pytest.approx([0.02] * 6, abs=0.01)
    assert out.fidelity() == max(out.to_list())


def test_worked_state_z_pair_ties(worked_state):
    st = Stabilizer(ErrorElement.from_kl([1, 1], [0, 0], 3))
    c = st.coset_of(ErrorElement.from_copies([(2, 1), (2, 1)], 3))
    out, p = generic_step(worked_state, st, 1, c)
    best, _ = fimax_step(worked_state)
    assert out.fidelity() == pytest.approx(best.fidelity(), abs=1e-12)
    assert p == pytest.approx(P_E1, abs=1e-12)
    ratios = sorted(
        (generic_step(worked_state, st, 1, cc)[0].fidelity() for cc in cosets_in(st, 1)), reverse=True
    )
    assert ratios[1:3] == pytest.approx([0.13, 0.13], abs=0.01)
    assert ratios[3:] == pytest.approx([0.02] * 6, abs=0.01)


def test_worked_state_stabilizer_coset_s0(worked_state):
    st = Stabilizer(ErrorElement.from_kl([1, 1], [0, 0], 3))
    s_coset = cosets_in(st, 0)[0]
    assert s_coset.is_stabilizer()
    out, p = generic_step(worked_state, st, 0, s_coset)
    p_s = 0.055**2 * 3  # only the identity error and +-g have weight off (2,1)
    assert out.fidelity() == pytest.approx(p_s / p, abs=1e-12)


def test_pure_input():
    c = fimax_select(isotropic(3, 1))
    assert c.predicted_fidelity == 1 and c.success_probability == 1
    assert c.coset.is_stabilizer()
    out, _ = fimax_step(isotropic(3, 1))
    assert out.fidelity() == 1


def test_impossible_postselection():
    st = enumerate_stabilizers(3)[0]
    pure = isotropic(3, 1)
    c = cosets_in(st, 1)[0]
    with pytest.raises(ImpossiblePostselection):
        generic_step(pure, st, 1, c)


def test_degenerate_guard(monkeypatch):
    import stabdistill.protocol as proto

    bds = isotropic(2, 0.5)
    table = stabilizer_table(2)
    nan = np.full((len(table.stabilizers), 8), np.nan)
    monkeypatch.setattr(proto, "selection_ratios", lambda b: (table, nan, nan, nan))
    with pytest.raises(DegenerateInput):
        proto.fimax_select(bds)


@pytest.mark.parametrize("d", [2, 3])
def test_fimax_is_generic_at_argmax(d):
    rng = np.random.default_rng(d)
    for _ in range(5):
        bds = random_bds(d, rng)
        c = fimax_select(bds)
        a, _ = fimax_step(bds)
        b, p = generic_step(bds, c.stabilizer, c.syndrome, c.coset)
        assert np.array_equal(a.probs, b.probs)
        assert p == c.success_probability


def test_isotropic_d2_closure():
    bds = isotropic(2, 0.4)
    for st in enumerate_stabilizers(2):
        out, _ = generic_step(bds, st, 0, cosets_in(st, 0)[0])
        assert out.probs.sum() == pytest.approx(1, abs=1e-12)


def test_offline_first_step():
    _, rec = fimax_step(offline(0.7))
    assert rec.fidelity_before == pytest.approx(0.7 / 3 + 0.3 / 9)
    assert rec.fidelity_after > 1 / 3


def test_canonic_coset_fidelity_is_delta():
    for st in enumerate_stabilizers(3)[::5]:
        enc = canonic_encoding(st)
        for c in cosets_in(st, 2):
            f = coset_fidelities(enc, c)
            lab = coset_action(st, c).label
            expected = np.zeros((3, 3))
            expected[lab] = 1
            assert np.abs(f - expected).max() < 1e-12
            assert coset_fidelity(enc, c, lab) == pytest.approx(1, abs=1e-12)


def test_coset_fidelity_sums_composed():
    rng = np.random.default_rng(17)
    for st in enumerate_stabilizers(3)[::9]:
        v = random_composed_encoding(canonic_encoding(st), rng)
        for s in range(3):
            cs = cosets_in(st, s)
            fs = np.array([coset_fidelities(v, c) for c in cs])
            assert np.abs(fs.sum(axis=(1, 2)) - 1).max() < 1e-9
            assert np.abs(fs.sum(axis=0) - 1).max() < 1e-9


def test_output_fidelities_match_update():
    bds = random_bds(3, np.random.default_rng(5))
    c = fimax_select(bds)
    f = output_fidelities(bds, canonic_encoding(c.stabilizer), c.syndrome)
    out, _ = fimax_step(bds)
    assert f[c.action] == pytest.approx(out.fidelity(), abs=1e-12)


def test_oracle_pure_input():
    for d in (2, 3):
        rho2 = two_copy_dense(isotropic(d, 1))
        st = enumerate_stabilizers(d)[3]
        enc = canonic_encoding(st)
        for a in range(d):
            out, p = standard_form_oracle(rho2, enc, a, a)
            assert p == pytest.approx(1 / d, abs=1e-12)
            assert out.fidelity() == pytest.approx(1, abs=1e-12)
        with pytest.raises(ImpossiblePostselection):
            standard_form_oracle(rho2, enc, 1, 0)


@pytest.mark.parametrize("d", [2, 3])
def test_oracle_matches_fast_path(d):
    rng = np.random.default_rng(100 + d)
    bds = random_bds(d, rng)
    rho2 = two_copy_dense(bds)
    for st in enumerate_stabilizers(d)[:: 4 if d == 3 else 1]:
        enc = canonic_encoding(st)
        total = 0.0
        for a, b in itertools.product(range(d), repeat=2):
            out, prob = standard_form_oracle(rho2, enc, a, b)
            total += prob
            s = (a - b) % d
            fast, p_s = generic_step(bds, st, s, cosets_in(st, s)[0])
            lab = coset_action(st, cosets_in(st, s)[0]).label
            shifted = np.roll(bell_diagonal(out.matrix, d), (-lab[0], -lab[1]), axis=(0, 1))
            assert np.abs(shifted - fast.probs).max() < 1e-9
            assert prob == pytest.approx(p_s / d, abs=1e-12)
        assert total == pytest.approx(1, abs=1e-12)


def test_dense_step_matches_fast_path():
    bds = random_bds(3, np.random.default_rng(9))
    c = fimax_select(bds)
    dense_out, p = dense_fimax_step(bds.to_dense(), c)
    fast, _ = fimax_step(bds)
    assert p == pytest.approx(c.success_probability, abs=1e-12)
    assert np.abs(bell_diagonal(dense_out.matrix, 3) - fast.probs).max() < 1e-12


def test_efficiency_formula():
    assert efficiency([]) == 1
    assert efficiency([0.5, 0.8]) == pytest.approx(0.1)


def test_distill_examples():
    run = distill(isotropic(3, 1))
    assert run.n_iterations == 0 and run.reached_target and run.efficiency == 1
    run = distill(isotropic(3, 0.26))
    assert run.reached_target and run.records[-1].fidelity_after >= 0.999
    probs = [r.choice.success_probability for r in run.records]
    assert run.efficiency == pytest.approx(math.prod(probs) / 2 ** len(probs), rel=1e-12)
    for r0, r1 in zip(run.records, run.records[1:]):
        assert r0.fidelity_after == r1.fidelity_before
    for r in run.records:
        assert r.fidelity_after == pytest.approx(r.choice.predicted_fidelity, abs=1e-12)
    assert distill(offline(0.7)).reached_target
    assert distill(isotropic(2, 0.35)).reached_target


def test_distill_failures():
    for p in (0.0, 0.2, 0.25):
        run = distill(isotropic(3, p))
        assert not run.reached_target and run.efficiency == 0
    run = distill(BdsState.from_list([1 / 9] * 9, 3))
    assert not run.reached_target and run.n_iterations == 0


def test_distill_iteration_cap():
    run = distill(isotropic(3, 0.26), max_iterations=2)
    assert run.n_iterations == 2 and not run.reached_target and run.efficiency == 0


def test_distill_argument_checks():
    with pytest.raises(ValueError):
        distill(isotropic(2, 0.5), target_fidelity=1.0)
    with pytest.raises(ValueError):
        distill(isotropic(2, 0.5), max_iterations=0)
    with pytest.raises(ValueError):
        distill(isotropic(2, 0.5), nonbds_mode="other")


def test_distill_dense_modes():
    bds = isotropic(2, 0.4)
    a = distill(bds.to_dense(), nonbds_mode="twirl")
    b = distill(bds.to_dense(), nonbds_mode="diag")
    assert a.reached_target and b.reached_target
    assert a.n_iterations == b.n_iterations
    assert a.efficiency == pytest.approx(b.efficiency, rel=1e-9)
    rho = random_pure(2, 3)
    run = distill(rho, nonbds_mode="diag")
    assert isinstance(run.final_state, DenseState)


def test_run_json_keys(worked_state):
    d = distill(worked_state).to_dict()
    assert set(d) == {"records", "reached_target", "efficiency"}
    rec = d["records"][0]
    assert set(rec) == {
        "fidelity_before", "fidelity_after", "success_probability",
        "generator", "coset_representative", "syndrome", "correction",
    }
    assert len(rec["generator"]) == 4 and len(rec["correction"]) == 2
    assert rec["fidelity_after"] == pytest.approx(0.63, abs=0.01)
