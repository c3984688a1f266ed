"""Back from F to the cut-tree (stick-breaking) and from a routed cut-tree to a tree."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cut_tree import CutTree, _number_array
from .excursion_ops import root_records
from .model import EXPONENTIAL, RANK, ContractViolation, CutSchedule, RootedTree
from .pacman import BreakpointFunction
from .samplers import as_seed


def xi_stick_breaking(F: BreakpointFunction) -> CutTree:
    """Rebuild the cut-tree from the jumps of the root process of F.

    A piece is a grid range ``i0..i1`` carrying the function
    ``G_j = F_j - c*h_j + d`` (local abscissa ``s = h_j - h_i0``) with both
    endpoint values taken as 0.  Each jump of its root process at drift ``t``
    adds a spine branchpoint; the severed range becomes a new piece with
    drift raised by ``t``.  Leaves are numbered by grid interval, so the
    interval ``(0, h_1]`` is vertex 1.
    """
    problems = F.problems()
    if problems:
        raise ContractViolation("malformed breakpoint function: " + "; ".join(problems))
    exact = F.exact
    h, vals = F.h, F.values
    M = len(h) - 1  # number of leaves
    zero = Fraction(0) if exact else 0.0

    # branchpoint records: [tau, mass, length, -, entry slot, far slot, half-routing leaf]
    bps = []
    # stack entries: (i0, i1, c, d, tau_offset, parent_slot)
    # parent_slot is (bp index, slot) or None for the root
    stack = [(0, M, zero, zero, zero, None)]
    attach = []  # (child kind, child id, parent slot)
    while stack:
        i0, i1, c, d, offset, slot = stack.pop()
        if i1 == i0 + 1:
            attach.append(("leaf", i0, slot))
            continue
        s = h[i0 + 1 : i1 + 1] - h[i0]
        g = vals[i0 + 1 : i1 + 1] - c * h[i0 + 1 : i1 + 1] + d
        g[-1] = zero
        idx, rates = root_records(s, g, exact, start=0)
        if idx[-1] != len(s) - 1 or any(r <= 0 for r in rates[:-1]):
            raise ContractViolation("breakpoint function has an interior zero after drifting")
        prev_t = zero
        prev_p = s[-1]
        cur = slot
        spine_end_leaf = i0  # interval (h_i0, h_i0+1]
        for k in range(len(idx) - 2, -1, -1):
            t = rates[k]
            p = s[idx[k]]
            b = len(bps)
            bps.append([offset + t, prev_p, prev_p * (t - prev_t), None, None, None, None])
            attach.append(("bp", b, cur))
            hi = i0 + 1 + idx[k + 1]
            lo = i0 + 1 + idx[k]
            stack.append((lo, hi, c + t, d + t * h[i0], offset + t, (b, 5)))
            bps[b][6] = lo  # spine end of the far piece: its first interval
            cur = (b, 4)
            prev_t, prev_p = t, p
        attach.append(("leaf", spine_end_leaf, cur))

    # number branchpoints by time (parents come first since times increase downward)
    nb = len(bps)
    if nb != M - 1:
        raise ContractViolation("breakpoint function does not encode a binary cut-tree")
    n = M
    order = sorted(range(nb), key=lambda b: (bps[b][0], b))
    node_id = {b: n + k for k, b in enumerate(order)}
    rho = 2 * n - 1
    entry = np.full(2 * n, -1, dtype=np.int64)
    far = np.full(2 * n, -1, dtype=np.int64)
    parent = np.full(2 * n, -1, dtype=np.int64)
    for kind, ident, slot in attach:
        x = ident if kind == "leaf" else node_id[ident]
        if slot is None:
            entry[rho] = x
            parent[x] = rho
        else:
            pb, which = slot
            p = node_id[pb]
            (entry if which == 4 else far)[p] = x
            parent[x] = p
    one = Fraction(1) if exact else 1.0
    tau = [float("inf")] * n + [zero] * n
    mass = [(h[j + 1] - h[j]) for j in range(n)] + [zero] * (n - 1) + [one]
    length = [zero] * (2 * n)
    far_v = np.full(2 * n, -1, dtype=np.int64)
    for b in range(nb):
        x = node_id[b]
        tau[x] = bps[b][0]
        mass[x] = bps[b][1]
        length[x] = bps[b][2]
        far_v[x] = bps[b][6] + 1
    if n == 1:
        entry[rho] = 0
        parent[0] = rho
    return CutTree(
        n=n,
        exact=exact,
        entry=entry,
        far=far,
        parent=parent,
        tau=_number_array(tau, exact),
        mass=_number_array(mass, exact),
        length=_number_array(length, exact),
        near_v=np.full(2 * n, -1, dtype=np.int64),
        far_v=far_v,
        cut_edge=np.full(2 * n, -1, dtype=np.int64),
    )


@dataclass(eq=False)
class RoutedCutTree:
    """A cut-tree plus an entry-side routing leaf ``z[b]`` for every branchpoint."""

    ct: CutTree
    z: np.ndarray

    def problems(self):
        out = []
        for b in self.ct.branchpoints:
            zb = int(self.z[b])
            if not 0 <= zb < self.ct.n or not self.ct.contains(int(self.ct.entry[b]), zb):
                out.append(f"routing of {b} is not on its entry side")
        return out


def complete_routings(ct: CutTree, seed=None, true=False) -> RoutedCutTree:
    """Entry-side routings: the true near endpoints, or uniform leaves drawn from ``seed``."""
    z = np.full(2 * ct.n, -1, dtype=np.int64)
    if true:
        for b in ct.branchpoints:
            if ct.near_v[b] < 1:
                raise ContractViolation("cut-tree carries no near endpoints")
            z[b] = ct.leaf(int(ct.near_v[b]))
        return RoutedCutTree(ct, z)
    if seed is None:
        raise ContractViolation("sampled routings need a seed")
    rng = as_seed(seed).child("routing").rng()
    _, lo, cnt = ct.leaf_ranges()
    order = ct.leaf_ranges()[0]
    for b in ct.branchpoints:
        e = int(ct.entry[b])
        z[b] = order[lo[e] + rng.integers(cnt[e])]
    return RoutedCutTree(ct, z)


def phi_rebuild(rct: RoutedCutTree):
    """One edge ``(z_b, half-routing of b)`` cut at ``tau_b`` per branchpoint."""
    problems = rct.problems()
    if problems:
        raise ContractViolation("; ".join(problems))
    ct = rct.ct
    edges, times = [], []
    for b in ct.branchpoints:
        edges.append((ct.vertex(int(rct.z[b])), ct.vertex(ct.half_routing(b))))
        times.append(ct.tau[b])
    tree = RootedTree(ct.n, ct.vertex(ct.root_leaf), tuple(edges))
    if ct.exact:
        if not all(Fraction(t).denominator == 1 for t in times):
            raise ContractViolation("exact cut-tree with non-integer times has no rank schedule")
        return tree, CutSchedule(RANK, tuple(int(t) for t in times))
    return tree, CutSchedule(EXPONENTIAL, tuple(float(t) for t in times))


def instance_key(tree: RootedTree, schedule: CutSchedule):
    """Labelled instance up to edge order and orientation."""
    pairs = sorted((tuple(sorted(e)), t) for e, t in zip(tree.edges, schedule.times))
    return tree.n, tree.root, tuple(pairs)
