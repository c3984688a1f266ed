"""Numba and plain-Python kernels must agree bit for bit."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from addcoal import kernels
from addcoal.cut_tree import build_cut_tree
from addcoal.model import EXPONENTIAL, RANK
from addcoal.prim import _csr
from addcoal.samplers import Seed, sample_excursion_grid, sample_instance

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def both(name, *args):
    a = kernels.variant(name, False)(*[x.copy() if isinstance(x, np.ndarray) else x for x in args])
    b = kernels.variant(name, True)(*[x.copy() if isinstance(x, np.ndarray) else x for x in args])
    return a, b


def same(a, b):
    if isinstance(a, tuple):
        assert len(a) == len(b)
        for x, y in zip(a, b):
            same(x, y)
    else:
        np.testing.assert_array_equal(np.asarray(a), np.asarray(b))


seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(2, 60)


@given(sizes, seeds)
def test_prufer(n, s):
    code = Seed(s).rng().integers(0, n, size=n - 2, dtype=np.int64)
    same(*both("prufer_decode", code, n))


@given(sizes, seeds, st.sampled_from([RANK, EXPONENTIAL]))
def test_genealogy_kernels(n, s, mode):
    tree, sched = sample_instance(n, mode, Seed(s))
    eu, ev = tree.edge_arrays()
    order = sched.order()
    a, b = both("merge_tree", n, eu, ev, order)
    same(a, b)
    same(*both("orient_cuts", n, 0, eu, ev, order, *a))


@given(sizes, seeds)
def test_prim_and_components(n, s):
    tree, sched = sample_instance(n, RANK, Seed(s))
    ptr, nbr, lab = _csr(tree, np.asarray(sched.times, dtype=np.int64))
    same(*both("prim_order", n, 0, ptr, nbr, lab))
    eu, ev = tree.edge_arrays()
    keep = np.asarray(sched.times) > n // 2
    same(*both("component_sizes", n, eu, ev, keep))


@given(sizes, seeds)
def test_spine(n, s):
    ct = build_cut_tree(*sample_instance(n, EXPONENTIAL, Seed(s)))
    tau = np.where(np.isinf(ct.tau), 0.0, ct.tau).astype(float)
    args = (n, ct.entry, ct.far, tau, ct.mass.astype(float), np.zeros(n - 1), np.zeros(n - 1))
    same(*both("spine_accumulate", *args))


@given(seeds, st.sampled_from([0.0, 0.5, 1.0, 3.0]))
def test_record_kernels(s, t):
    e = sample_excursion_grid(2**9, Seed(s))
    h = e.abscissae
    for name in ("first_record", "record_mask", "largest_gap"):
        same(*both(name, e.values, h, t, 1e-12))


def test_active_flag_matches_binding():
    assert kernels.component_sizes is kernels.variant("component_sizes")
