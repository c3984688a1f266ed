"""Pac-Man exploration of a cut-tree and the Bertoin function F.

Pac-Man starts at the root with a budget ``h`` and walks towards a target
leaf (initially the leaf of the original root).  At the first node whose
target-side subtree fits in the remaining budget it eats that subtree,
scoring ``tau * mass``, then retargets to the node's half-routing leaf.
F(h) is the total score once the budget is exhausted.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .cut_tree import CutTree
from .model import ContractViolation, encode_number


@dataclass(frozen=True)
class RecordChain:
    nodes: tuple
    targets: tuple

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class PacManTrace:
    h: object
    chain: RecordChain
    eaten: tuple
    final: int
    value: object

    @property
    def eaten_mass(self):
        return sum((m for _, m in self.eaten), 0)


@dataclass(eq=False)
class BreakpointFunction:
    """F as breakpoints ``(h_j, F(h_j))``, linear in between."""

    h: np.ndarray
    values: np.ndarray
    exact: bool
    _ints: tuple = field(default=None, repr=False)

    def __post_init__(self):
        dtype = object if self.exact else float
        self.h = np.asarray(self.h, dtype=dtype)
        self.values = np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.h.shape[0]

    def __eq__(self, other):
        if not isinstance(other, BreakpointFunction) or len(self) != len(other):
            return False
        return bool(np.all(self.h == other.h) and np.all(self.values == other.values))

    def points(self):
        return list(zip(self.h.tolist(), self.values.tolist()))

    def at(self, x):
        """Linear interpolation between breakpoints."""
        if not 0 <= x <= 1:
            raise ContractViolation("F is defined on [0, 1]")
        j = int(np.searchsorted(self.h, x, side="left"))
        if self.h[j] == x:
            return self.values[j]
        h0, h1 = self.h[j - 1], self.h[j]
        v0, v1 = self.values[j - 1], self.values[j]
        return v0 + (v1 - v0) * (x - h0) / (h1 - h0)

    def nearest(self, x):
        j = int(np.argmin(np.abs(self.h.astype(float) - float(x))))
        return self.h[j], self.values[j]

    def integer_form(self):
        """``(D, H, V)`` with ``h = H/D`` and ``F = V/D`` (exact functions only)."""
        if not self.exact:
            raise ContractViolation("integer form needs exact breakpoints")
        if self._ints is None:
            fr_h = [Fraction(x) for x in self.h]
            fr_v = [Fraction(x) for x in self.values]
            d = 1
            for x in fr_h + fr_v:
                d = d * x.denominator // np.gcd(d, x.denominator)
            H = [int(x * d) for x in fr_h]
            V = [int(x * d) for x in fr_v]
            big = max(max(map(abs, H)), max(map(abs, V)), d)
            dtype = np.int64 if big < 2**40 else object
            self._ints = (d, np.array(H, dtype=dtype), np.array(V, dtype=dtype))
        return self._ints

    def problems(self):
        out = []
        if len(self) < 2:
            return ["fewer than two breakpoints"]
        if self.h[0] != 0 or self.h[-1] != 1:
            out.append("grid must start at 0 and end at 1")
        if not np.all(self.h[1:] > self.h[:-1]):
            out.append("grid is not strictly increasing")
        if self.values[0] != 0 or self.values[-1] != 0:
            out.append("F(0) and F(1) must vanish")
        if np.any(self.values < 0):
            out.append("F takes negative values")
        return out


# ---------------------------------------------------------------------------
# record chains


def _lca_toward(ct: CutTree, x, leaf):
    """Deepest ancestor of ``x`` (or ``x`` itself) whose subtree holds ``leaf``."""
    a = x
    while a != ct.rho and not ct.contains(a, leaf):
        a = int(ct.parent[a])
    return a


def record_sequence(ct: CutTree, x) -> RecordChain:
    """Backward record chain leading Pac-Man from the root to ``x``.

    Raises when the half-routings are inconsistent (a step makes no progress).
    """
    L = ct.root_leaf
    nodes, targets = [ct.rho], [L]
    if x == ct.rho:
        return RecordChain(tuple(nodes), tuple(targets))
    B = ct.rho
    for _ in range(2 * ct.n + 1):
        nxt = _lca_toward(ct, x, L)
        if nxt == B:
            raise ContractViolation(f"half-routing at {B} does not lead into its far side")
        nodes.append(nxt)
        if nxt == x:
            targets.append(x if x < ct.n else ct.half_routing(x))
            return RecordChain(tuple(nodes), tuple(targets))
        B = nxt
        L = ct.half_routing(nxt)
        if not ct.contains(int(ct.far[nxt]), L):
            raise ContractViolation(f"half-routing of {nxt} is not on its far side")
        targets.append(L)
    raise ContractViolation(f"record chain of {x} does not terminate")


def h_triple(ct: CutTree, b) -> tuple:
    """``(h0, h1, h2)`` of branchpoint ``b`` from its record chain."""
    if not ct.n <= b < 2 * ct.n - 1:
        raise ContractViolation(f"{b} is not a branchpoint")
    chain = record_sequence(ct, b)
    h1 = sum((ct.mass[int(ct.entry[a])] for a in chain.nodes[1:]), 0)
    return h1 - ct.mass[int(ct.entry[b])], h1, h1 + ct.mass[int(ct.far[b])]


# ---------------------------------------------------------------------------
# single runs


def _budget_count(ct: CutTree, h):
    if not 0 <= h <= 1:
        raise ContractViolation("budget must lie in [0, 1]")
    if ct.exact:
        k = Fraction(h) * ct.n
        if k.denominator != 1:
            raise ContractViolation(f"budget {h} is off the breakpoint grid")
        return int(k)
    k = round(float(h) * ct.n)
    if abs(float(h) * ct.n - k) > 1e-9 * ct.n:
        raise ContractViolation(f"budget {h} is off the breakpoint grid")
    return k


def pacman_run(ct: CutTree, h) -> PacManTrace:
    """Run Pac-Man with budget ``h``; ties go to the ancestor (first hit on the path)."""
    rem = _budget_count(ct, h)
    _, _, cnt = ct.leaf_ranges()
    L = ct.root_leaf
    nodes, targets = [ct.rho], [L]
    value = 0 if ct.exact else 0.0
    if rem == 0:
        return PacManTrace(h, RecordChain((ct.rho,), (L,)), (), L, value)
    eaten = []
    y = ct.rho
    while True:
        while True:
            if y < ct.n:
                raise ContractViolation(f"budget {h} is off the breakpoint grid")
            if y == ct.rho:
                c = int(ct.entry[y])
            else:
                c = int(ct.entry[y]) if ct.contains(int(ct.entry[y]), L) else int(ct.far[y])
            if cnt[c] <= rem:
                break
            y = c
        m = ct.mass[c]
        if y != ct.rho:
            value = value + ct.tau[y] * m
        eaten.append((y, m))
        rem -= int(cnt[c])
        if y != ct.rho:
            nodes.append(y)
        if rem == 0:
            targets.append(ct.half_routing(y) if y != ct.rho else L)
            break
        L = ct.half_routing(y)
        targets.append(L)
    if len(targets) > len(nodes):
        targets = targets[: len(nodes)]
    return PacManTrace(h, RecordChain(tuple(nodes), tuple(targets)), tuple(eaten), y, value)


# ---------------------------------------------------------------------------
# the whole function


def _grid(ct: CutTree, pairs):
    one = Fraction(1) if ct.exact else 1.0
    zero = Fraction(0) if ct.exact else 0.0
    pairs = sorted(pairs, key=lambda p: p[0])
    h = [zero] + [p[0] for p in pairs] + [one]
    v = [zero] + [p[1] for p in pairs] + [zero]
    return BreakpointFunction(h, v, ct.exact)


def bertoin_function_reference(ct: CutTree) -> BreakpointFunction:
    """F on the grid {0, 1, h1(b)} by one Pac-Man run per branchpoint."""
    pairs = []
    for b in ct.branchpoints:
        h1 = h_triple(ct, b)[1]
        pairs.append((h1, pacman_run(ct, h1).value))
    return _grid(ct, pairs)


def h1_values(ct: CutTree):
    """``(h1, F(h1))`` for every branchpoint (index k is node n+k), single pass."""
    n = ct.n
    m = n - 1
    if m == 0:
        dtype = object if ct.exact else float
        return np.zeros(0, dtype=dtype), np.zeros(0, dtype=dtype)
    _, _, cnt = ct.leaf_ranges()
    if ct.exact:
        tau = ct.tau[n : 2 * n - 1]
        if all(isinstance(t, int) or (isinstance(t, Fraction) and t.denominator == 1) for t in tau):
            # integer fast path: counts and integer times, scaled back afterwards
            tau_i = np.zeros(2 * n, dtype=np.int64)
            tau_i[n : 2 * n - 1] = [int(t) for t in tau]
            hc, fc = kernels.spine_accumulate(
                n, ct.entry, ct.far, tau_i, cnt.astype(np.int64),
                np.zeros(m, dtype=np.int64), np.zeros(m, dtype=np.int64),
            )
            h = np.array([Fraction(int(x), n) for x in hc], dtype=object)
            f = np.array([Fraction(int(x), n) for x in fc], dtype=object)
            return h, f
        tau = ct.tau.copy()
        tau[:n] = 0
        return kernels.spine_accumulate(
            n, ct.entry, ct.far, tau, ct.mass,
            np.array([Fraction(0)] * m, dtype=object), np.array([Fraction(0)] * m, dtype=object),
        )
    tau = np.where(np.isinf(ct.tau), 0.0, ct.tau).astype(float)
    return kernels.spine_accumulate(
        n, ct.entry, ct.far, tau, ct.mass.astype(float), np.zeros(m), np.zeros(m)
    )


def bertoin_function(ct: CutTree, reference=False) -> BreakpointFunction:
    if reference:
        return bertoin_function_reference(ct)
    h, f = h1_values(ct)
    return _grid(ct, zip(h.tolist(), f.tolist()))


# ---------------------------------------------------------------------------
# structural checks


def node_spans(ct: CutTree) -> dict:
    """Grid interval ``(lo, hi]`` owned by each node: entry side first, then far side."""
    zero = Fraction(0) if ct.exact else 0.0
    top = int(ct.entry[ct.rho])
    spans = {top: (zero, zero + ct.mass[top])}
    for x in ct.depth_order():
        if x < ct.n or x == ct.rho:
            continue
        lo, hi = spans[x]
        e, f = int(ct.entry[x]), int(ct.far[x])
        mid = lo + ct.mass[e]
        spans[e] = (lo, mid)
        spans[f] = (mid, hi)
    return spans


def leaf_intervals(ct: CutTree) -> dict:
    """``vertex -> (lo, hi]``: the budget interval mapped onto each leaf."""
    spans = node_spans(ct)
    return {ct.vertex(x): spans[x] for x in range(ct.n)}


def pushforward_mismatches(ct: CutTree, tol=0) -> list:
    """Branchpoints whose (h0, h1, h2) disagree with the interval they should own."""
    spans = node_spans(ct)
    bad = []
    for b in ct.branchpoints:
        h0, h1, h2 = h_triple(ct, b)
        lo, hi = spans[b]
        mid = lo + ct.mass[int(ct.entry[b])]
        if any(abs(a - c) > tol for a, c in ((h0, lo), (h1, mid), (h2, hi))):
            bad.append(b)
    leaves = sorted(spans[x] for x in range(ct.n))
    prev = 0
    for lo, hi in leaves:
        if abs(lo - prev) > tol:
            bad.append(("gap", lo))
        prev = hi
    if abs(prev - 1) > tol:
        bad.append(("end", prev))
    return bad


def lipschitz_violations(ct: CutTree, F: BreakpointFunction, pairs) -> list:
    """Grid index pairs breaking |F(h)-F(h')| <= tau(pi_h)|h-h'| + d(pi_h, pi_h')."""
    from .cut_tree import path_length

    out = []
    for i, j in pairs:
        a, b = pacman_run(ct, F.h[i]), pacman_run(ct, F.h[j])
        x, y = a.final, b.final
        if x not in ct.ancestors(y):
            continue
        tau = ct.tau[x] if x != ct.rho else 0
        bound = tau * abs(F.h[i] - F.h[j]) + path_length(ct, x, y)
        if abs(F.values[i] - F.values[j]) > bound:
            out.append((i, j))
    return out


def dump_bertoin_csv(F: BreakpointFunction, fh):
    w = csv.writer(fh)
    w.writerow(["h", "F"])
    for h, v in F.points():
        w.writerow([encode_number(h), encode_number(v)])
