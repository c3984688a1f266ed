"""Fragmentation of a tree by timed edge cuts (the Aldous-Pitman side)."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .model import ContractViolation, CutSchedule, RootedTree, masses_from_counts, require_instance, unit_mass


@dataclass(frozen=True)
class Genealogy:
    """Raw arrays describing how cuts split components (node ids as in kernels)."""

    n: int
    order: np.ndarray
    size: np.ndarray
    entry: np.ndarray
    far: np.ndarray
    near_v: np.ndarray
    far_v: np.ndarray
    parent: np.ndarray


def genealogy(tree: RootedTree, schedule: CutSchedule, check=True) -> Genealogy:
    if check:
        require_instance(tree, schedule)
    n = tree.n
    eu, ev = tree.edge_arrays()
    order = schedule.order()
    child_a, child_b, size = kernels.merge_tree(n, eu, ev, order)
    if n > 1 and child_a[0] < 0:
        raise ContractViolation("edge set contains a cycle")
    entry, far, near_v, far_v, parent = kernels.orient_cuts(
        n, tree.root - 1, eu, ev, order, child_a, child_b, size
    )
    return Genealogy(n, order, size, entry, far, near_v + 1, far_v + 1, parent)


@dataclass(frozen=True)
class CutEvent:
    time: object
    edge: tuple
    u: int
    v: int
    far_size: int
    ref: int
    size: int
    edge_index: int

    def as_dict(self):
        return {
            "time": self.time,
            "edge": list(self.edge),
            "u": self.u,
            "v": self.v,
            "far_size": self.far_size,
            "ref": self.ref,
            "size": self.size,
        }


@dataclass(frozen=True)
class FragmentationTimeline:
    n: int
    root: int
    exact: bool
    events: tuple
    rootmass: tuple

    def mass(self, count):
        return unit_mass(count, self.n, self.exact)

    def rootmass_at(self, t):
        value = self.rootmass[0][1]
        for time, m in self.rootmass[1:]:
            if time <= t:
                value = m
            else:
                break
        return value


def fragmentation_timeline(tree: RootedTree, schedule: CutSchedule) -> FragmentationTimeline:
    """Replay the cuts in time order, recording which side keeps the reference vertex."""
    g = genealogy(tree, schedule)
    n = tree.n
    events = []
    refs = {n: tree.root} if n > 1 else {}
    rootmass = [(0, unit_mass(1, 1, schedule.exact))]
    root_count = n
    for k in range(n - 1):
        node = n + k
        e = int(g.order[k])
        ref = refs[node]
        far_node = int(g.far[node])
        far_size = int(g.size[far_node])
        size = int(g.size[node])
        v = int(g.far_v[node])
        events.append(
            CutEvent(schedule.times[e], tree.edges[e], int(g.near_v[node]), v, far_size, ref, size, e)
        )
        entry_node = int(g.entry[node])
        if entry_node >= n:
            refs[entry_node] = ref
        if far_node >= n:
            refs[far_node] = v
        if ref == tree.root:
            root_count -= far_size
            rootmass.append((schedule.times[e], unit_mass(root_count, n, schedule.exact)))
    return FragmentationTimeline(n, tree.root, schedule.exact, tuple(events), tuple(rootmass))


def x_ap(timeline: FragmentationTimeline, t) -> tuple:
    """Sorted component masses at time ``t`` (cuts at exactly ``t`` included)."""
    if t < 0:
        raise ContractViolation("time must be nonnegative")
    sizes = {timeline.root: timeline.n}
    for ev in timeline.events:
        if ev.time > t:
            break
        sizes[ev.ref] -= ev.far_size
        sizes[ev.v] = ev.far_size
    return masses_from_counts(sizes.values(), timeline.n, timeline.exact)


def x_ap_sweep(timeline: FragmentationTimeline, times):
    """``x_ap`` at each of the nondecreasing ``times``, in one pass over the events."""
    sizes = {timeline.root: timeline.n}
    out = []
    i = 0
    events = timeline.events
    for t in times:
        while i < len(events) and events[i].time <= t:
            ev = events[i]
            sizes[ev.ref] -= ev.far_size
            sizes[ev.v] = ev.far_size
            i += 1
        out.append(masses_from_counts(sizes.values(), timeline.n, timeline.exact))
    return out


def direct_bertoin_points(timeline: FragmentationTimeline):
    """Breakpoints ``(h, F(h))`` of the Bertoin function computed from cuts alone.

    Follows each chain of cutpoints c_1, c_2, ... where c_i falls in the piece
    severed at the previous cut: ``h`` accumulates the masses left on the
    near side and ``F`` the same masses weighted by their cut times.
    No cut-tree is involved.
    """
    n = timeline.n
    acc = {timeline.root: (0, 0)}
    points = [(0, 0), (n, 0)]
    for ev in timeline.events:
        h, f = acc[ev.ref]
        kept = ev.size - ev.far_size
        h1 = h + kept
        f1 = f + ev.time * kept
        points.append((h1, f1))
        acc[ev.v] = (h1, f1)
    points.sort(key=lambda p: p[0])
    if timeline.exact:
        return [(Fraction(h, n), Fraction(f) / n) for h, f in points]
    return [(h / n, f / n) for h, f in points]


# ---------------------------------------------------------------------------
# per-vertex mass trajectories (brute force, for distance identities)


def _component_of(adj, alive, x):
    seen = {x}
    queue = deque([x])
    while queue:
        a = queue.popleft()
        for b, e in adj[a]:
            if alive[e] and b not in seen:
                seen.add(b)
                queue.append(b)
    return seen


def vertex_mass_steps(tree: RootedTree, schedule: CutSchedule, x: int):
    """``[(time, mass)]``: mass of the component of ``x`` right after each change.

    Brute-force flood fill after every cut.  The last entry is the time at
    which ``x`` becomes isolated.
    """
    adj = {v: [] for v in range(1, tree.n + 1)}
    for e, (a, b) in enumerate(tree.edges):
        adj[a].append((b, e))
        adj[b].append((a, e))
    alive = [True] * len(tree.edges)
    comp = _component_of(adj, alive, x)
    steps = [(0, unit_mass(len(comp), tree.n, schedule.exact))]
    for e in sorted(range(len(tree.edges)), key=lambda i: schedule.times[i]):
        alive[e] = False
        a, b = tree.edges[e]
        if a in comp:
            comp = _component_of(adj, alive, x)
            steps.append((schedule.times[e], unit_mass(len(comp), tree.n, schedule.exact)))
            if len(comp) == 1:
                break
    return steps


def separation_time(tree: RootedTree, schedule: CutSchedule, i: int, j: int):
    """First cut time on the tree path between ``i`` and ``j``."""
    adj = {v: [] for v in range(1, tree.n + 1)}
    for e, (a, b) in enumerate(tree.edges):
        adj[a].append((b, e))
        adj[b].append((a, e))
    prev = {i: None}
    queue = deque([i])
    while queue:
        a = queue.popleft()
        for b, e in adj[a]:
            if b not in prev:
                prev[b] = (a, e)
                queue.append(b)
    best = None
    x = j
    while prev[x] is not None:
        a, e = prev[x]
        s = schedule.times[e]
        best = s if best is None else min(best, s)
        x = a
    return best


def truncated_distance(tree: RootedTree, schedule: CutSchedule, i: int, j: int):
    """sum over x in {i, j} of the integral of mu_s(x) from the separation time of
    i and j to the isolation time of x (pieces of atoms never vanish, hence the cap)."""
    if i == j:
        return 0
    t0 = separation_time(tree, schedule, i, j)
    total = 0
    for x in (i, j):
        steps = vertex_mass_steps(tree, schedule, x)
        for (s, m), (s_next, _) in zip(steps, steps[1:]):
            lo = max(s, t0)
            if s_next > lo:
                total += m * (s_next - lo)
    return total
