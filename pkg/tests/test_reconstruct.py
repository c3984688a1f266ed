from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given

from addcoal.cut_tree import build_cut_tree, same_shape
from addcoal.model import RANK, ContractViolation, CutSchedule, RootedTree, fixture
from addcoal.pacman import BreakpointFunction, bertoin_function
from addcoal.reconstruct import (
    RoutedCutTree, complete_routings, instance_key, phi_rebuild, xi_stick_breaking,
)
from addcoal.samplers import Seed

from conftest import exp_instances, rank_instances

EDGE = (RootedTree(2, 1, ((1, 2),)), CutSchedule(RANK, (1,)))


def test_xi_p3():
    ct = build_cut_tree(*fixture("P3"))
    X = xi_stick_breaking(bertoin_function(ct))
    assert same_shape(ct, X) is None
    b1 = int(X.entry[X.rho])
    b2 = int(X.entry[b1])
    # spine 1 + 2/3 = 5/3, branchpoints at distances 1 and 5/3
    assert X.root_distance(b1) == 1 and X.root_distance(b2) == Fr(5, 3)
    assert (X.tau[b1], X.tau[b2]) == (1, 2)
    assert X.mass[int(X.far[b1])] == X.mass[int(X.far[b2])] == Fr(1, 3)


def test_xi_single_edge():
    X = xi_stick_breaking(BreakpointFunction([0, Fr(1, 2), 1], [0, Fr(3, 2), 0], True))
    b = int(X.entry[X.rho])
    assert X.tau[b] == 3 and X.mass[0] == X.mass[1] == Fr(1, 2)


def test_xi_p4():
    ct = build_cut_tree(*fixture("P4"))
    X = xi_stick_breaking(bertoin_function(ct))
    assert same_shape(ct, X) is None
    assert sorted(X.tau[b] for b in X.branchpoints) == [1, 2, 3]


def test_xi_rejects_malformed():
    with pytest.raises(ContractViolation):
        xi_stick_breaking(BreakpointFunction([0, Fr(1, 2), 1], [0, -1, 0], True))
    with pytest.raises(ContractViolation):
        xi_stick_breaking(BreakpointFunction([0, 1], [0, 1], True))


def test_phi_true_examples():
    for inst in (fixture("P3"), EDGE):
        rebuilt = phi_rebuild(complete_routings(build_cut_tree(*inst), true=True))
        assert instance_key(*rebuilt) == instance_key(*inst)


def test_phi_c3_shuffle():
    tree, sched = fixture("C3")
    ct = build_cut_tree(tree, sched)
    b1, b2 = ct.n, ct.n + 1
    z = np.full(2 * ct.n, -1, dtype=np.int64)
    z[b1], z[b2] = ct.leaf(3), ct.leaf(1)
    new_tree, new_sched = phi_rebuild(RoutedCutTree(ct, z))
    assert instance_key(new_tree, new_sched) == (3, 1, (((1, 3), 2), ((2, 3), 1)))
    assert bertoin_function(build_cut_tree(new_tree, new_sched)) == bertoin_function(ct)
    assert instance_key(new_tree, new_sched) != instance_key(tree, sched)


def test_phi_rejects_bad_routing():
    ct = build_cut_tree(*fixture("C3"))
    z = np.full(2 * ct.n, -1, dtype=np.int64)
    z[ct.n], z[ct.n + 1] = ct.leaf(2), ct.leaf(1)  # leaf 2 is on the far side of beta1
    with pytest.raises(ContractViolation):
        phi_rebuild(RoutedCutTree(ct, z))


def test_sampled_routing_frequency_c3():
    ct = build_cut_tree(*fixture("C3"))
    hits = sum(int(complete_routings(ct, Seed(5).child("z", i)).z[ct.n]) == ct.leaf(3)
               for i in range(10**4))
    assert abs(hits / 10**4 - 0.5) <= 0.05


@given(rank_instances)
def test_roundtrips_exact(inst):
    tree, sched = inst
    ct = build_cut_tree(tree, sched)
    F = bertoin_function(ct)
    if tree.n > 1:
        assert same_shape(ct, xi_stick_breaking(F)) is None
    assert instance_key(*phi_rebuild(complete_routings(ct, true=True))) == instance_key(tree, sched)
    rebuilt = phi_rebuild(complete_routings(ct, Seed(1)))
    assert bertoin_function(build_cut_tree(*rebuilt)) == F


@given(exp_instances)
def test_xi_float(inst):
    tree, _ = inst
    if tree.n == 1:
        return
    ct = build_cut_tree(*inst)
    assert same_shape(ct, xi_stick_breaking(bertoin_function(ct)), tol=1e-9) is None
