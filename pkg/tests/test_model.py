from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from addcoal.model import (
    EXPONENTIAL, RANK, ContractViolation, CutSchedule, RootedTree, component_masses, fixture,
    instance_from_dict, instance_to_dict, load_instance, save_instance, validate_schedule,
    validate_tree,
)

from conftest import exp_instances, rank_instances


def test_validate_tree_examples():
    assert validate_tree(RootedTree(1, 1, ())) == []
    assert validate_tree(fixture("P3")[0]) == []
    probs = validate_tree(RootedTree(3, 1, ((1, 2), (1, 2))))
    assert any("duplicate" in p for p in probs)


def test_validate_tree_other_violations():
    assert any("root" in p for p in validate_tree(RootedTree(3, 4, ((1, 2), (2, 3)))))
    assert any("self-loop" in p for p in validate_tree(RootedTree(2, 1, ((1, 1),))))
    assert any("cycle" in p for p in validate_tree(RootedTree(3, 1, ((1, 2), (2, 3), (3, 1)))))
    assert validate_tree(RootedTree(4, 1, ((1, 2), (3, 4), (3, 4))))


def test_validate_schedule():
    tree, _ = fixture("P3")
    assert validate_schedule(tree, CutSchedule(RANK, (1, 2))) == []
    assert validate_schedule(tree, CutSchedule(RANK, (1, 1)))
    assert validate_schedule(tree, CutSchedule(RANK, (1, 3)))
    assert validate_schedule(tree, CutSchedule(EXPONENTIAL, (0.5, -1.0)))
    with pytest.raises(ContractViolation):
        CutSchedule("geometric", (1,))


@pytest.mark.parametrize("t,want", [(0.5, (1,)), (1.5, (Fr(2, 3), Fr(1, 3))), (1.0, (Fr(2, 3), Fr(1, 3)))])
def test_component_masses_p3(t, want):
    assert component_masses(*fixture("P3"), t) == tuple(Fr(w) for w in want)


def test_component_masses_length_mismatch():
    tree, _ = fixture("P3")
    with pytest.raises(ContractViolation):
        component_masses(tree, CutSchedule(RANK, (1,)), 1)


def _scipy_counts(tree, sched, t):
    eu, ev = tree.edge_arrays()
    keep = np.asarray(sched.times, dtype=float) <= t
    keep = ~keep
    g = coo_matrix((np.ones(keep.sum()), (eu[keep], ev[keep])), shape=(tree.n, tree.n))
    _, lab = connected_components(g, directed=False)
    return sorted(np.bincount(lab).tolist(), reverse=True)


@given(rank_instances)
def test_component_masses_match_scipy(inst):
    tree, sched = inst
    for t in [0, *sched.times, 0.5 + max(sched.times, default=0)]:
        got = component_masses(tree, sched, t)
        assert sum(got) == 1
        assert list(got) == sorted(got, reverse=True)
        assert [m * tree.n for m in got] == _scipy_counts(tree, sched, t)


@given(exp_instances)
def test_component_masses_float(inst):
    tree, sched = inst
    for t in sched.times:
        got = component_masses(tree, sched, t)
        assert abs(sum(got) - 1) <= 1e-12
        assert [round(m * tree.n) for m in got] == _scipy_counts(tree, sched, t)


@given(rank_instances)
def test_refinement(inst):
    tree, sched = inst
    prev = None
    for t in range(0, tree.n + 1):
        cur = component_masses(tree, sched, t)
        if prev is not None:
            # one more removed edge splits exactly one block in two
            assert len(cur) - len(prev) == (1 if 1 <= t <= tree.n - 1 else 0)
            assert max(cur) <= max(prev)
        prev = cur


def test_instance_roundtrip(tmp_path):
    for name in ("P3", "C3", "P4", "FIG1"):
        tree, sched = fixture(name)
        assert instance_from_dict(instance_to_dict(tree, sched)) == (tree, sched)
        path = tmp_path / f"{name}.json"
        save_instance(path, tree, sched)
        assert load_instance(path) == (tree, sched)
