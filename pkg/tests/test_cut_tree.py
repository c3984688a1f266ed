import io
import json
from fractions import Fraction as Fr

import pytest
from hypothesis import given

from addcoal.cut_tree import (
    build_cut_tree, components_from_cut_tree, dump_cut_tree, height, leaf_distance, same_shape,
    tau_from_lengths,
)
from addcoal.fragmentation import fragmentation_timeline, truncated_distance
from addcoal.model import RANK, ContractViolation, CutSchedule, RootedTree, component_masses, fixture

from conftest import exp_instances, rank_instances

EDGE = (RootedTree(2, 1, ((1, 2),)), CutSchedule(RANK, (1,)))


def test_p3_structure():
    ct = build_cut_tree(*fixture("P3"))
    b1 = int(ct.entry[ct.rho])
    assert ct.tau[b1] == 1 and ct.length[b1] == 1
    assert (int(ct.near_v[b1]), int(ct.far_v[b1])) == (2, 3)
    assert list(ct.leaves_under(int(ct.far[b1]))) == [2]
    b2 = int(ct.entry[b1])
    assert ct.tau[b2] == 2 and ct.length[b2] == Fr(2, 3)
    assert ct.half_routing(b2) == 1
    assert all(ct.mass[x] == Fr(1, 3) for x in range(3))


def test_c3_structure():
    ct = build_cut_tree(*fixture("C3"))
    b1 = int(ct.entry[ct.rho])
    assert ct.length[b1] == 1 and list(ct.leaves_under(int(ct.far[b1]))) == [1]
    b2 = int(ct.entry[b1])
    assert ct.length[b2] == Fr(2, 3) and list(ct.leaves_under(int(ct.far[b2]))) == [2]


def test_single_edge():
    ct = build_cut_tree(RootedTree(2, 1, ((1, 2),)), CutSchedule(RANK, (1,)))
    b = int(ct.entry[ct.rho])
    assert ct.length[b] == 1 and ct.mass[0] == ct.mass[1] == Fr(1, 2)


def test_duplicate_times_rejected():
    with pytest.raises(ContractViolation):
        build_cut_tree(RootedTree(3, 1, ((1, 2), (2, 3))), CutSchedule(RANK, (2, 2)))


def test_tau_recovery_examples():
    for name, want in (("P3", [1, 2]), ("P4", [1, 2, 3])):
        ct = build_cut_tree(*fixture(name))
        assert sorted(tau_from_lengths(ct).values()) == want
    ct = build_cut_tree(*EDGE)
    assert list(tau_from_lengths(ct).values()) == [1]


@pytest.mark.parametrize("name,t,want", [("P3", 1.5, (Fr(2, 3), Fr(1, 3))), ("P3", 0.5, (1,)),
                                          ("P4", 2.5, (Fr(1, 2), Fr(1, 4), Fr(1, 4)))])
def test_components_examples(name, t, want):
    assert components_from_cut_tree(build_cut_tree(*fixture(name)), t) == want


def test_leaf_distance_examples():
    ct = build_cut_tree(*fixture("P3"))
    assert leaf_distance(ct, 1, 2) == 0
    assert leaf_distance(ct, 1, 3) == Fr(2, 3)
    assert leaf_distance(build_cut_tree(*EDGE), 1, 2) == 0


@given(rank_instances)
def test_exact_identities(inst):
    tree, sched = inst
    ct = build_cut_tree(tree, sched)
    tl = fragmentation_timeline(tree, sched)
    rec = tau_from_lengths(ct)
    assert all(rec[b] == ct.tau[b] for b in ct.branchpoints)
    for t in range(tree.n + 1):
        assert components_from_cut_tree(ct, t) == component_masses(tree, sched, t)
    for i in range(1, tree.n + 1):
        for j in range(i + 1, min(tree.n, i + 3) + 1):
            assert leaf_distance(ct, i, j) == truncated_distance(tree, sched, i, j)
    assert height(ct) >= 0
    assert sum(ct.mass[: tree.n]) == 1
    assert len(tl.events) == tree.n - 1


@given(exp_instances)
def test_float_tau_recovery(inst):
    ct = build_cut_tree(*inst)
    rec = tau_from_lengths(ct)
    for b in ct.branchpoints:
        assert abs(rec[b] - ct.tau[b]) <= 1e-9 * ct.tau[b]


def test_same_shape_detects_changes():
    ct = build_cut_tree(*fixture("P4"))
    assert same_shape(ct, ct.copy()) is None
    tau = ct.tau.copy()
    tau[ct.n] += 1
    assert "tau" in same_shape(ct, ct.copy(tau=tau))


def test_dump_is_nested_json():
    buf = io.StringIO()
    dump_cut_tree(build_cut_tree(*fixture("P3")), buf)
    root = json.loads(buf.getvalue())["root"]
    assert root["tau"] == 1 and root["length_to_parent"] == 1
    assert root["children"][1] == {"vertex": 3, "mass": "1/3"}
    assert root["children"][0]["length_to_parent"] == "2/3"
