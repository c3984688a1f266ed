from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given

from addcoal.cut_tree import build_cut_tree
from addcoal.excursion_ops import (
    drifted_records, excursion_counts, first_excursion, largest_excursion, p_process,
    p_process_mismatches, x_b,
)
from addcoal.fragmentation import fragmentation_timeline
from addcoal.model import RANK, ContractViolation, CutSchedule, RootedTree, component_masses, fixture
from addcoal.pacman import bertoin_function
from addcoal.samplers import ExcursionGrid, Seed, sample_excursion_grid

from conftest import exp_instances, rank_instances


def _F(name):
    return bertoin_function(build_cut_tree(*fixture(name)))


@pytest.mark.parametrize("t,records,lengths", [
    (Fr(3, 2), (0, Fr(2, 3), 1), (Fr(2, 3), Fr(1, 3))),
    (Fr(1, 2), (0, 1), (1,)),
    (2, (0, Fr(1, 3), Fr(2, 3), 1), (Fr(1, 3),) * 3),
])
def test_p3_records(t, records, lengths):
    d = drifted_records(_F("P3"), t)
    assert d.records == records
    assert d.sorted_lengths() == lengths


def test_negative_drift_rejected():
    with pytest.raises(ContractViolation):
        drifted_records(_F("P3"), -1)


def test_x_b_grid_examples():
    e = sample_excursion_grid(2**10, Seed(3))
    assert x_b(e, 0) == (1.0,)
    assert first_excursion(e, 0) == 1.0
    hump = ExcursionGrid(np.array([0.0, 1.0, 0.0]))
    assert x_b(hump, 0) == (1.0,)


def test_x_b_large_drift():
    worst = max(largest_excursion(sample_excursion_grid(2**14, Seed(8).child("s", i)), 1e3)
                for i in range(100))
    assert worst <= 0.05


@pytest.mark.parametrize("name,steps", [
    ("P3", [(0, 1), (1, Fr(2, 3)), (2, Fr(1, 3))]),
    ("P4", [(0, 1), (1, Fr(3, 4)), (2, Fr(1, 2)), (3, Fr(1, 4))]),
])
def test_p_process_examples(name, steps):
    assert p_process(_F(name)).steps() == steps


def test_p_process_single_edge():
    F = bertoin_function(build_cut_tree(RootedTree(2, 1, ((1, 2),)), CutSchedule(RANK, (1,))))
    assert p_process(F).steps() == [(0, 1), (1, Fr(1, 2))]


@given(rank_instances)
def test_coupling_identity_exact(inst):
    tree, sched = inst
    F = bertoin_function(build_cut_tree(tree, sched))
    times = sorted(sched.times)
    grid = [0] + times + [Fr(a + b, 2) for a, b in zip(times, times[1:])]
    for t in grid:
        want = component_masses(tree, sched, t)
        assert drifted_records(F, t).sorted_lengths() == want
        assert excursion_counts(F, t, tree.n) == [m * tree.n for m in want]
    assert p_process_mismatches(F, fragmentation_timeline(tree, sched)) == []


@given(exp_instances)
def test_coupling_identity_float(inst):
    tree, sched = inst
    F = bertoin_function(build_cut_tree(tree, sched))
    for t in sched.times:
        got = drifted_records(F, t).sorted_lengths()
        want = component_masses(tree, sched, t)
        assert len(got) == len(want)
        assert max(abs(a - b) for a, b in zip(got, want)) <= 1e-9
