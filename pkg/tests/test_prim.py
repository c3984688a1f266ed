import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from addcoal.model import EXPONENTIAL, RANK, ContractViolation, CutSchedule, RootedTree, fixture
from addcoal.prim import (
    PrimEncoder, components_are_intervals, dump_path_csv, forest_component_counts,
    path_component_counts, path_component_sizes, prim_order, prim_path,
)

from conftest import rank_instances


def test_figure1():
    tree, sched = fixture("FIG1")
    assert prim_order(tree, sched) == tuple(range(1, 16))
    path = prim_path(tree, sched, 6)
    assert path.values.tolist() == [0, 0, 1, 0, -1, 0, -1, -2, -1, -2, -3, -3, -4, -5, -6, -7]
    assert path_component_counts(path) == [4, 3, 3, 2, 1, 1, 1]
    assert forest_component_counts(tree, sched, 6) == [4, 3, 3, 2, 1, 1, 1]


def test_small_orders():
    path3 = RootedTree(3, 1, ((1, 2), (2, 3)))
    assert prim_order(path3, CutSchedule(RANK, (1, 2))) == (1, 2, 3)
    star = RootedTree(4, 1, ((1, 2), (1, 3), (1, 4)))
    assert prim_order(star, CutSchedule(RANK, (3, 1, 2))) == (1, 3, 4, 2)
    assert prim_order(RootedTree(1, 1, ()), CutSchedule(RANK, ())) == (1,)


def test_requires_ranks():
    tree, _ = fixture("P3")
    with pytest.raises(ContractViolation):
        prim_order(tree, CutSchedule(EXPONENTIAL, (0.3, 0.1)))
    with pytest.raises(ContractViolation):
        prim_path(tree, CutSchedule(RANK, (1, 2)), 3)


@given(rank_instances)
def test_path_encodes_forest(inst):
    tree, sched = inst
    n = tree.n
    enc = PrimEncoder(tree, sched)
    assert enc.path(n - 1).values.tolist() == [-i for i in range(n + 1)]
    full = enc.path(0)
    assert full.values[-1] == -1 and path_component_counts(full) == [n]
    assert path_component_sizes(enc.path(n - 1)) == (Fraction(1, n),) * n
    for k in range(n):
        path = enc.path(k)
        assert path_component_counts(path) == forest_component_counts(tree, sched, k)
        assert components_are_intervals(tree, sched, k, enc.order)
        assert np.array_equal(path.values, prim_path(tree, sched, k).values)


def test_dump_csv():
    buf = io.StringIO()
    dump_path_csv(prim_path(*fixture("P3"), 1), buf)
    assert buf.getvalue().splitlines()[0] == "i,S_i"
