"""Prim order and the Prim path of an edge-labelled tree.

Deleting the ``k`` largest labels leaves a forest.  Listing vertices in Prim
order and summing (children in the forest - 1) gives a lattice path whose
excursions above its running minimum have the component sizes as lengths.
"""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .model import RANK, ContractViolation, CutSchedule, RootedTree, mass_list


@dataclass(frozen=True)
class PrimPath:
    order: tuple
    values: np.ndarray
    k: int

    @property
    def n(self):
        return len(self.order)


def _require_ranks(tree, schedule):
    if schedule.mode != RANK:
        raise ContractViolation("the Prim encoding needs rank labels")
    if len(schedule.times) != len(tree.edges):
        raise ContractViolation("schedule length does not match the edge count")


def _csr(tree: RootedTree, labels):
    n = tree.n
    eu, ev = tree.edge_arrays()
    src = np.concatenate((eu, ev))
    dst = np.concatenate((ev, eu))
    lab = np.concatenate((labels, labels)).astype(np.int64)
    idx = np.argsort(src, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, src + 1, 1)
    return np.cumsum(ptr), dst[idx], lab[idx]


def prim_order(tree: RootedTree, schedule: CutSchedule) -> tuple:
    """Vertices starting at the root; next is the unlisted neighbour with the smallest edge label."""
    _require_ranks(tree, schedule)
    if tree.n == 1:
        return (tree.root,)
    ptr, nbr, lab = _csr(tree, np.asarray(schedule.times, dtype=np.int64))
    order = kernels.prim_order(tree.n, tree.root - 1, ptr, nbr, lab)
    return tuple((order + 1).tolist())


def _parents(tree: RootedTree, order):
    """Parent of each vertex (0 for the root): the neighbour listed earlier."""
    pos = np.empty(tree.n + 1, dtype=np.int64)
    pos[list(order)] = np.arange(tree.n)
    parent = np.zeros(tree.n + 1, dtype=np.int64)
    for a, b in tree.edges:
        if pos[a] < pos[b]:
            parent[b] = a
        else:
            parent[a] = b
    return parent


class PrimEncoder:
    """Prim order and the parent edge of every vertex, shared across ``k``."""

    def __init__(self, tree: RootedTree, schedule: CutSchedule):
        _require_ranks(tree, schedule)
        self.tree = tree
        self.order = prim_order(tree, schedule)
        parent = _parents(tree, self.order)
        n = tree.n
        lab = np.zeros(n + 1, dtype=np.int64)  # label of the edge to the parent
        for (a, b), t in zip(tree.edges, schedule.times):
            lab[b if parent[b] == a else a] = t
        nonroot = np.flatnonzero(parent[1:]) + 1
        self._child = nonroot
        self._parent = parent[nonroot]
        self._lab = lab[nonroot]
        self._order = np.asarray(self.order, dtype=np.int64)

    def path(self, k: int) -> PrimPath:
        n = self.tree.n
        if not 0 <= k <= n - 1:
            raise ContractViolation(f"removed-edge count {k} outside 0..{n - 1}")
        kept = self._lab < n - k
        children = np.bincount(self._parent[kept], minlength=n + 1)
        x = children[self._order]
        values = np.concatenate(([0], np.cumsum(x - 1)))
        return PrimPath(self.order, values, k)


def prim_path(tree: RootedTree, schedule: CutSchedule, k: int) -> PrimPath:
    """Path S_i = sum_{j<=i} (X_j - 1) for the forest without the ``k`` largest labels."""
    return PrimEncoder(tree, schedule).path(k)


def path_component_counts(path: PrimPath) -> list:
    """Gaps between successive strict new minima of S, nonincreasing."""
    S = path.values
    prev_min = np.minimum.accumulate(S)
    new_min = np.flatnonzero(S[1:] < prev_min[:-1]) + 1
    starts = np.concatenate(([0], new_min))
    return sorted(np.diff(starts).tolist(), reverse=True)


def path_component_sizes(path: PrimPath) -> tuple:
    n = path.n
    return mass_list(Fraction(c, n) for c in path_component_counts(path))


def forest_component_counts(tree: RootedTree, schedule: CutSchedule, k: int) -> list:
    """Direct union-find over the kept edges."""
    n = tree.n
    eu, ev = tree.edge_arrays()
    keep = np.asarray(schedule.times, dtype=np.int64) < n - k
    return sorted(kernels.component_sizes(n, eu, ev, keep).tolist(), reverse=True)


def components_are_intervals(tree: RootedTree, schedule: CutSchedule, k: int, order=None) -> bool:
    """Whether each forest component is a contiguous block of the Prim order."""
    if order is None:
        order = prim_order(tree, schedule)
    n = tree.n
    parent = _parents(tree, order)
    label = {}
    for (a, b), lab in zip(tree.edges, schedule.times):
        child = b if parent[b] == a else a
        label[child] = lab
    comp = {}
    for v in order:
        p = parent[v]
        comp[v] = comp[p] if p and label[v] < n - k else v
    seq = [comp[v] for v in order]
    runs = sum(1 for i in range(len(seq)) if i == 0 or seq[i] != seq[i - 1])
    return runs == len(Counter(seq))


def largest_fraction(path: PrimPath) -> float:
    return path_component_counts(path)[0] / path.n


def dump_path_csv(path: PrimPath, fh):
    w = csv.writer(fh)
    w.writerow(["i", "S_i"])
    for i, s in enumerate(path.values.tolist()):
        w.writerow([i, s])
