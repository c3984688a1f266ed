"""The cut-tree: binary genealogy of the fragmentation.

Node ids: leaves ``0..n-1`` (leaf ``j`` is vertex ``j+1``), branchpoints
``n..2n-2`` ordered by cut time (so every parent precedes its children) and
the root ``rho = 2n-1``, whose single child is stored in ``entry[rho]``.
Each branchpoint has an entry side (holding the reference vertex of the
component being cut) and a far side (whose reference is the far endpoint).
"""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fragmentation import genealogy
from .model import ContractViolation, CutSchedule, RootedTree, encode_number, mass_list


@dataclass(eq=False)
class CutTree:
    n: int
    exact: bool
    entry: np.ndarray
    far: np.ndarray
    parent: np.ndarray
    tau: np.ndarray
    mass: np.ndarray
    length: np.ndarray
    near_v: np.ndarray
    far_v: np.ndarray
    cut_edge: np.ndarray
    _ranges: tuple = field(default=None, repr=False)
    _int_tau: object = field(default=None, repr=False)

    @property
    def rho(self) -> int:
        return 2 * self.n - 1

    @property
    def root_leaf(self) -> int:
        """Leaf of the original root (the leaf followed first by Pac-Man)."""
        x = self.rho
        while x >= self.n:
            x = int(self.entry[x])
        return x

    @property
    def branchpoints(self) -> range:
        return range(self.n, 2 * self.n - 1)

    def is_leaf(self, x) -> bool:
        return x < self.n

    def vertex(self, leaf) -> int:
        return int(leaf) + 1

    def leaf(self, vertex) -> int:
        if not 1 <= vertex <= self.n:
            raise ContractViolation(f"unknown leaf/vertex id {vertex}")
        return int(vertex) - 1

    def half_routing(self, b) -> int:
        """Leaf of the far side attached to branchpoint ``b`` (root: leaf of the root)."""
        if b == self.rho:
            return self.root_leaf
        return self.leaf(int(self.far_v[b]))

    def children(self, x):
        if x == self.rho:
            return (int(self.entry[x]),)
        if x < self.n:
            return ()
        return int(self.entry[x]), int(self.far[x])

    def depth_order(self):
        """Nodes in preorder, entry child before far child."""
        out = []
        stack = [self.rho]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(reversed(self.children(x)))
        return out

    def leaf_ranges(self):
        """``(order, lo, count)``: leaves in preorder and each node's slice into it."""
        if self._ranges is None:
            order = [x for x in self.depth_order() if x < self.n]
            pos = np.empty(self.n, dtype=np.int64)
            pos[order] = np.arange(self.n)
            lo = np.zeros(2 * self.n, dtype=np.int64)
            cnt = np.zeros(2 * self.n, dtype=np.int64)
            lo[: self.n] = pos
            cnt[: self.n] = 1
            for x in reversed(self.depth_order()):
                if x >= self.n:
                    kids = self.children(x)
                    lo[x] = min(lo[c] for c in kids)
                    cnt[x] = sum(cnt[c] for c in kids)
            self._ranges = (np.asarray(order, dtype=np.int64), lo, cnt)
        return self._ranges

    def leaves_under(self, x):
        order, lo, cnt = self.leaf_ranges()
        return order[lo[x] : lo[x] + cnt[x]]

    def contains(self, x, leaf) -> bool:
        _, lo, cnt = self.leaf_ranges()
        return lo[x] <= lo[leaf] < lo[x] + cnt[x]

    def integer_tau(self):
        """Times as int64 (leaves get a huge sentinel), or None when not all integral."""
        if self._int_tau is None:
            ok = self.exact and all(
                isinstance(t, int) or (isinstance(t, Fraction) and t.denominator == 1)
                for t in self.tau[self.n :]
            )
            if ok:
                arr = np.full(2 * self.n, np.iinfo(np.int64).max, dtype=np.int64)
                arr[self.n :] = [int(t) for t in self.tau[self.n :]]
                self._int_tau = arr
            else:
                self._int_tau = False
        return self._int_tau if self._int_tau is not False else None

    def ancestors(self, x):
        """``[x, parent(x), ..., rho]``."""
        out = [x]
        while x != self.rho:
            x = int(self.parent[x])
            out.append(x)
        return out

    def root_distance(self, x):
        return sum(self.length[y] for y in self.ancestors(x))

    def copy(self, **changes):
        fields = {
            k: getattr(self, k)
            for k in ("n", "exact", "entry", "far", "parent", "tau", "mass", "length",
                      "near_v", "far_v", "cut_edge")
        }
        for k, v in fields.items():
            if isinstance(v, np.ndarray):
                fields[k] = v.copy()
        fields.update(changes)
        return CutTree(**fields)


def _number_array(values, exact):
    if exact:
        arr = np.empty(len(values), dtype=object)
        arr[:] = list(values)
        return arr
    return np.asarray(values, dtype=float)


def build_cut_tree(tree: RootedTree, schedule: CutSchedule) -> CutTree:
    """Cut-tree of ``(tree, schedule)``; segment lengths are mass times elapsed time."""
    g = genealogy(tree, schedule)
    n = tree.n
    exact = schedule.exact
    zero = 0 if exact else 0.0
    tau = [math.inf] * n + [zero] * n
    times = schedule.times
    for k in range(n - 1):
        tau[n + k] = times[int(g.order[k])]
    size = g.size
    if exact:
        mass = [Fraction(int(size[x]), n) for x in range(2 * n - 1)] + [Fraction(1)]
    else:
        mass = [float(size[x]) / n for x in range(2 * n - 1)] + [1.0]
    length = [zero] * (2 * n)
    for x in range(n, 2 * n - 1):
        length[x] = mass[x] * (tau[x] - tau[int(g.parent[x])])
    cut_edge = np.full(2 * n, -1, dtype=np.int64)
    cut_edge[n : 2 * n - 1] = g.order
    return CutTree(
        n=n,
        exact=exact,
        entry=g.entry,
        far=g.far,
        parent=g.parent,
        tau=_number_array(tau, exact),
        mass=_number_array(mass, exact),
        length=_number_array(length, exact),
        near_v=g.near_v.copy(),
        far_v=g.far_v.copy(),
        cut_edge=cut_edge,
    )


def tau_from_lengths(ct: CutTree) -> dict:
    """Recover each branchpoint time as the sum of length/mass down its root path."""
    rec = {ct.rho: 0}
    out = {}
    for b in ct.branchpoints:
        p = int(ct.parent[b])
        rec[b] = rec[p] + ct.length[b] / ct.mass[b]
        out[b] = rec[b]
    return out


def components_from_cut_tree(ct: CutTree, t) -> tuple:
    """Masses of subtrees hanging below a cut at time <= t whose own first cut is later."""
    nodes = np.arange(2 * ct.n - 1)
    tau = ct.integer_tau()
    if tau is None:
        tau, cut = ct.tau, t
    else:
        cut = math.floor(t)
    keep = np.asarray((tau[ct.parent[nodes]] <= cut) & (tau[nodes] > cut), dtype=bool)
    return mass_list(ct.mass[nodes[keep]].tolist())


def path_length(ct: CutTree, a, b):
    """Total segment length on the cut-tree path between nodes ``a`` and ``b``."""
    up_a = ct.ancestors(a)
    on_a = set(up_a)
    total = 0
    x = b
    while x not in on_a:
        total += ct.length[x]
        x = int(ct.parent[x])
    for y in up_a:
        if y == x:
            break
        total += ct.length[y]
    return total


def leaf_distance(ct: CutTree, i: int, j: int):
    """Distance between the leaves of vertices ``i`` and ``j``."""
    return path_length(ct, ct.leaf(i), ct.leaf(j))


def height(ct: CutTree):
    """Largest distance from the root (leaf segments have length 0)."""
    dist = {ct.rho: 0}
    best = 0
    for x in ct.depth_order()[1:]:
        dist[x] = dist[int(ct.parent[x])] + ct.length[x]
        if dist[x] > best:
            best = dist[x]
    return best


def mass_mismatches(ct: CutTree, timeline) -> list:
    """Branchpoints whose side masses disagree with the recorded fragment sizes."""
    bad = []
    for k, ev in enumerate(timeline.events):
        b = ct.n + k
        far = ct.mass[int(ct.far[b])]
        entry = ct.mass[int(ct.entry[b])]
        if far != timeline.mass(ev.far_size) or entry != timeline.mass(ev.size - ev.far_size):
            bad.append(b)
    return bad


# ---------------------------------------------------------------------------
# comparison


def same_shape(a: CutTree, b: CutTree, compare_vertices=False, tol=0):
    """Ordered (entry, far) isomorphism with equal times, masses and lengths.

    Returns ``None`` when equal, else a short description of the first
    difference found.
    """
    if a.n != b.n:
        return f"leaf counts differ ({a.n} vs {b.n})"

    def close(x, y):
        if x == y:
            return True
        if tol and not (math.isinf(x) or math.isinf(y)):
            return abs(x - y) <= tol * max(1.0, abs(x), abs(y))
        return False

    stack = [(a.rho, b.rho)]
    while stack:
        x, y = stack.pop()
        kx, ky = a.children(x), b.children(y)
        if len(kx) != len(ky):
            return f"node kinds differ at {x}/{y}"
        if x != a.rho:
            for attr in ("tau", "mass", "length"):
                if not close(getattr(a, attr)[x], getattr(b, attr)[y]):
                    return f"{attr} differs at {x}/{y}"
            if x >= a.n and a.half_routing(x) is not None:
                hx = a.leaves_under(int(a.far[x]))
                hy = b.leaves_under(int(b.far[y]))
                ix = list(hx).index(a.half_routing(x))
                iy = list(hy).index(b.half_routing(y))
                if ix != iy:
                    return f"half-routing differs at {x}/{y}"
            if compare_vertices and x < a.n and x != y:
                return f"leaf vertex differs at {x}/{y}"
        stack.extend(zip(kx, ky))
    return None


# ---------------------------------------------------------------------------
# files


def cut_tree_to_dict(ct: CutTree) -> dict:
    """Nested node records, root child first."""
    def leaf_record(x):
        return {"vertex": ct.vertex(x), "mass": encode_number(ct.mass[x])}

    def bp_record(x):
        return {
            "tau": encode_number(ct.tau[x]),
            "mass": encode_number(ct.mass[x]),
            "length_to_parent": encode_number(ct.length[x]),
            "cut_edge": int(ct.cut_edge[x]),
            "u": int(ct.near_v[x]),
            "v": int(ct.far_v[x]),
            "children": [],
        }

    records = {}
    for x in reversed(ct.depth_order()):
        if x == ct.rho:
            continue
        if x < ct.n:
            records[x] = leaf_record(x)
        else:
            rec = bp_record(x)
            rec["children"] = [records.pop(int(ct.entry[x])), records.pop(int(ct.far[x]))]
            records[x] = rec
    return {"n": ct.n, "exact": ct.exact, "root": records[int(ct.entry[ct.rho])]}


def dump_cut_tree(ct: CutTree, fh):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * ct.n + 100))
    try:
        json.dump(cut_tree_to_dict(ct), fh)
    finally:
        sys.setrecursionlimit(old)
