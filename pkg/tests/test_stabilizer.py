import itertools

import numpy as np
import pytest

from stabdistill.stabilizer import (
    ErrorDistribution,
    InvalidGenerator,
    Stabilizer,
    all_cosets,
    canonical_generator,
    coset_probability,
    cosets_in,
    enumerate_stabilizers,
    partition_probability,
    syndrome_partition,
)
from stabdistill.states import two_copy_distribution
from stabdistill.weyl import ErrorElement, all_elements


def kl(k, l, d=3):
    return ErrorElement.from_kl(k, l, d)


@pytest.mark.parametrize("d,count", [(2, 15), (3, 40), (5, 156)])
def test_stabilizer_count(d, count):
    stabs = enumerate_stabilizers(d)
    assert len(stabs) == count == (d * d + 1) * (d + 1)
    assert all(len(set(s.members)) == d for s in stabs)


@pytest.mark.parametrize("d", [2, 3])
def test_subgroups_cover_once(d):
    seen = {}
    for s in enumerate_stabilizers(d):
        for m in s.members[1:]:
            assert m not in seen
            seen[m] = s
    assert len(seen) + 1 == d**4


def test_canonical_generator():
    a = canonical_generator(kl([1, 0], [1, 0]))
    assert a == canonical_generator(kl([2, 0], [2, 0])) == kl([1, 0], [1, 0])
    e = ErrorElement((0, 1, 1, 0), 2)
    assert canonical_generator(e) == e
    assert canonical_generator(canonical_generator(kl([2, 1], [0, 2]))) == canonical_generator(kl([2, 1], [0, 2]))
    with pytest.raises(InvalidGenerator):
        canonical_generator(ErrorElement.zero(2, 3))


@pytest.mark.parametrize("d", [2, 3])
def test_partition_sizes(d):
    for st in enumerate_stabilizers(d):
        classes = [syndrome_partition(st, s) for s in range(d)]
        assert [len(c) for c in classes] == [d**3] * d
        assert st.generator in classes[0]
        for s in range(d):
            cs = cosets_in(st, s)
            assert len(cs) == d * d
            members = [e for c in cs for e in c.members]
            assert len(members) == len(set(members)) == d**3
            assert set(members) == classes[s]


def test_z_pair_coset():
    st = Stabilizer(kl([1, 1], [0, 0]))
    c = st.coset_of(kl([0, 0], [1, 1]))
    assert set(c.members) == {kl([0, 0], [1, 1]), kl([1, 1], [1, 1]), kl([2, 2], [1, 1])}
    assert c.representative == kl([0, 0], [1, 1])
    assert c.syndrome == 1


def test_coset_of_constant():
    rng = np.random.default_rng(3)
    stabs = enumerate_stabilizers(3)
    for _ in range(200):
        st = stabs[rng.integers(len(stabs))]
        e = ErrorElement(tuple(rng.integers(0, 3, 4)), 3)
        c = st.coset_of(e)
        assert all(st.coset_of(e + h) == c for h in st.members)
        assert all(st.syndrome(m) == c.syndrome for m in c.members)


def test_uniform_coset_probability():
    dist = ErrorDistribution.uniform(3)
    st = enumerate_stabilizers(3)[7]
    for c in all_cosets(st):
        assert coset_probability(dist, c) == pytest.approx(1 / 27, abs=1e-15)


def test_worked_state_probabilities(worked_state):
    dist = two_copy_distribution(worked_state)
    st = Stabilizer(kl([1, 1], [0, 0]))
    c = st.coset_of(kl([2, 2], [1, 1]))
    assert coset_probability(dist, c) == pytest.approx(0.31965, abs=1e-12)
    assert partition_probability(dist, st, 1) == pytest.approx(0.50335, abs=1e-12)
    assert sum(partition_probability(dist, st, s) for s in range(3)) == pytest.approx(1, abs=1e-12)
    for s in range(3):
        total = sum(coset_probability(dist, c) for c in cosets_in(st, s))
        assert total == pytest.approx(partition_probability(dist, st, s), abs=1e-12)


def test_distribution_validation():
    with pytest.raises(ValueError):
        ErrorDistribution(2, np.ones(16))
    with pytest.raises(ValueError):
        ErrorDistribution(2, np.ones(8) / 8)
