"""Rooted trees, cut schedules and component masses.

Vertices are labelled ``1..n``.  Every vertex carries mass ``1/n``; in rank
mode masses are :class:`fractions.Fraction`, in exponential mode floats.
"""
from __future__ import annotations

import json
import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels

RANK = "rank"
EXPONENTIAL = "exponential"
MODES = (RANK, EXPONENTIAL)


class ContractViolation(ValueError):
    """Raised when an operation is called outside its precondition."""


@dataclass(frozen=True)
class RootedTree:
    n: int
    root: int
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))

    def edge_arrays(self):
        """0-based endpoint arrays ``(eu, ev)``."""
        if not self.edges:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        arr = np.asarray(self.edges, dtype=np.int64) - 1
        return arr[:, 0].copy(), arr[:, 1].copy()

    def canonical(self):
        return self.n, self.root, tuple(sorted(tuple(sorted(e)) for e in self.edges))


@dataclass(frozen=True)
class CutSchedule:
    mode: str
    times: tuple

    def __post_init__(self):
        if self.mode not in MODES:
            raise ContractViolation(f"unknown schedule mode {self.mode!r}")
        conv = int if self.mode == RANK else float
        object.__setattr__(self, "times", tuple(conv(t) for t in self.times))

    @property
    def exact(self):
        return self.mode == RANK

    def order(self):
        """Edge indices by increasing cut time."""
        return np.argsort(np.asarray(self.times, dtype=float), kind="stable").astype(np.int64)


@lru_cache(maxsize=1 << 16)
def unit_mass(count, n, exact):
    return Fraction(count, n) if exact else count / n


def cut_after(times, t, exact):
    """Boolean mask of ``times > t`` (integer times compared against floor(t) when exact)."""
    if exact:
        return np.asarray(times, dtype=np.int64) > math.floor(t)
    return np.asarray(times, dtype=float) > float(t)


def masses_from_counts(counts, n, exact):
    """Nonincreasing masses ``count/n`` (sorting the integers, not the masses)."""
    return tuple(unit_mass(int(c), n, exact) for c in sorted(counts, reverse=True))


def mass_list(values):
    """Sort a collection of masses nonincreasingly."""
    values = list(values)
    if values and all(type(v) is Fraction and v.denominator < 2**26 for v in values):
        # distinct fractions with small denominators never collide as floats
        return tuple(sorted(values, key=float, reverse=True))
    return tuple(sorted(values, reverse=True))


def validate_tree(tree: RootedTree) -> list[str]:
    """Return a list of human-readable invariant violations (empty when valid)."""
    problems = []
    n = tree.n
    if not isinstance(n, int) or n < 1:
        return [f"vertex count must be a positive integer, got {n!r}"]
    if not 1 <= tree.root <= n:
        problems.append(f"root {tree.root} is not a vertex id in 1..{n}")
    if len(tree.edges) != n - 1:
        problems.append(f"expected {n - 1} edges, got {len(tree.edges)}")
    seen = set()
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in tree.edges:
        if not (1 <= a <= n and 1 <= b <= n):
            problems.append(f"edge ({a},{b}) has an endpoint outside 1..{n}")
            continue
        if a == b:
            problems.append(f"self-loop at vertex {a}")
            continue
        key = (min(a, b), max(a, b))
        if key in seen:
            problems.append(f"duplicate edge {key}")
            continue
        seen.add(key)
        ra, rb = find(a), find(b)
        if ra == rb:
            problems.append(f"edge {key} closes a cycle")
        else:
            parent[ra] = rb
    if not problems:
        roots = {find(v) for v in range(1, n + 1)}
        if len(roots) != 1:
            problems.append(f"graph is disconnected ({len(roots)} components)")
    return problems


def validate_schedule(tree: RootedTree, schedule: CutSchedule) -> list[str]:
    problems = []
    times = schedule.times
    if len(times) != len(tree.edges):
        problems.append(f"schedule has {len(times)} times for {len(tree.edges)} edges")
    if len(set(times)) != len(times):
        problems.append("cut times are not distinct")
    if schedule.mode == RANK and sorted(times) != list(range(1, len(times) + 1)):
        problems.append("rank times are not a permutation of 1..n-1")
    if schedule.mode == EXPONENTIAL and any(not t > 0 for t in times):
        problems.append("exponential times must be strictly positive")
    return problems


def require_instance(tree, schedule):
    problems = validate_tree(tree) + validate_schedule(tree, schedule)
    if problems:
        raise ContractViolation("; ".join(problems))


def component_masses(tree: RootedTree, schedule: CutSchedule, t) -> tuple:
    """Masses of the components left after removing every edge cut at time <= t."""
    if len(schedule.times) != len(tree.edges):
        raise ContractViolation("schedule length does not match the edge count")
    eu, ev = tree.edge_arrays()
    keep = cut_after(schedule.times, t, schedule.exact)
    counts = kernels.component_sizes(tree.n, eu, ev, keep)
    return masses_from_counts(counts.tolist(), tree.n, schedule.exact)


# ---------------------------------------------------------------------------
# fixtures


def fixture(name: str):
    """Canonical small instances ``P3``, ``C3``, ``P4`` and ``FIG1``."""
    if name == "P3":
        return RootedTree(3, 1, ((1, 2), (2, 3))), CutSchedule(RANK, (2, 1))
    if name == "C3":
        return RootedTree(3, 1, ((1, 2), (1, 3))), CutSchedule(RANK, (1, 2))
    if name == "P4":
        return RootedTree(4, 1, ((1, 2), (2, 3), (3, 4))), CutSchedule(RANK, (3, 2, 1))
    if name == "FIG1":
        return FIGURE1_TREE, CutSchedule(RANK, FIGURE1_LABELS)
    raise KeyError(name)


# edge-labelled plane tree with vertices already numbered in Prim order
FIGURE1_TREE = RootedTree(
    15,
    1,
    (
        (1, 2), (1, 5), (1, 8), (2, 3), (2, 4), (4, 13), (13, 14), (13, 15),
        (5, 6), (5, 7), (5, 11), (11, 12), (8, 9), (8, 10),
    ),
)
FIGURE1_LABELS = (4, 9, 11, 3, 7, 14, 10, 13, 1, 5, 12, 8, 2, 6)


# ---------------------------------------------------------------------------
# instance files


def encode_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def decode_number(x, exact):
    if isinstance(x, str):
        return Fraction(x)
    if exact:
        return Fraction(x)
    return float(x)


def instance_to_dict(tree: RootedTree, schedule: CutSchedule) -> dict:
    return {
        "n": tree.n,
        "root": tree.root,
        "edges": [list(e) for e in tree.edges],
        "cut_times": list(schedule.times),
        "mode": schedule.mode,
    }


def instance_from_dict(data: dict):
    tree = RootedTree(int(data["n"]), int(data["root"]), tuple(tuple(e) for e in data["edges"]))
    schedule = CutSchedule(data.get("mode", RANK), tuple(data["cut_times"]))
    return tree, schedule


def save_instance(path, tree, schedule):
    with open(path, "w") as fh:
        json.dump(instance_to_dict(tree, schedule), fh)


def load_instance(path):
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def masses_to_json(masses: Sequence):
    return [encode_number(m) for m in masses]
