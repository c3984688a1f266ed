"""Random inputs: Cayley trees, cut clocks, Brownian excursions, tagged masses."""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .model import EXPONENTIAL, RANK, ContractViolation, CutSchedule, RootedTree


@dataclass(frozen=True)
class Seed:
    """A master seed plus a derivation path of ``(tag, index)`` pairs.

    The same ``(master, path)`` always yields the same generator state, so
    replica ``i`` of an experiment is reproducible on its own.
    """

    master: int
    path: tuple = field(default=())

    def child(self, tag: str, index: int = 0) -> "Seed":
        return Seed(self.master, self.path + ((tag, int(index)),))

    def spawn_key(self):
        key = []
        for tag, index in self.path:
            key.extend((zlib.crc32(tag.encode()), index))
        return tuple(key)

    def rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master & (2**64 - 1), spawn_key=self.spawn_key())
        return np.random.Generator(np.random.PCG64(seq))


def as_seed(seed) -> Seed:
    return seed if isinstance(seed, Seed) else Seed(int(seed))


def sample_cayley(n: int, seed) -> RootedTree:
    """Uniform labelled tree on ``1..n`` rooted at 1, via a random Pruefer code."""
    if n < 1:
        raise ContractViolation("a tree needs at least one vertex")
    if n == 1:
        return RootedTree(1, 1, ())
    rng = as_seed(seed).child("cayley").rng()
    code = rng.integers(0, n, size=n - 2, dtype=np.int64)
    eu, ev = kernels.prufer_decode(code, n)
    return RootedTree(n, 1, tuple(zip((eu + 1).tolist(), (ev + 1).tolist())))


def sample_cut_schedule(tree: RootedTree, mode: str, seed) -> CutSchedule:
    """Rank mode: a uniform labelling by 1..n-1.  Exponential: i.i.d. sqrt(n)*Exp(1)."""
    m = tree.n - 1
    rng = as_seed(seed).child("cuts").rng()
    if mode == RANK:
        return CutSchedule(RANK, tuple((rng.permutation(m) + 1).tolist()))
    if mode in (EXPONENTIAL, "exp"):
        while True:
            times = np.sqrt(tree.n) * rng.standard_exponential(m)
            if np.unique(times).size == m and np.all(times > 0):
                return CutSchedule(EXPONENTIAL, tuple(times.tolist()))
    raise ContractViolation(f"unknown schedule mode {mode!r}")


def sample_instance(n: int, mode: str, seed):
    seed = as_seed(seed)
    tree = sample_cayley(n, seed)
    return tree, sample_cut_schedule(tree, mode, seed)


@dataclass(frozen=True)
class ExcursionGrid:
    """Excursion values ``e_0..e_m`` at abscissae ``i/m``."""

    values: np.ndarray

    @property
    def m(self) -> int:
        return self.values.shape[0] - 1

    @property
    def abscissae(self) -> np.ndarray:
        return np.arange(self.m + 1) / self.m

    def at(self, x: float) -> float:
        return float(self.values[int(round(x * self.m))])


def vervaat(bridge: np.ndarray) -> np.ndarray:
    """Rotate a bridge ``b_0..b_m`` (b_0 = b_m) cyclically at its argmin."""
    m = bridge.shape[0] - 1
    k = int(np.argmin(bridge[:m]))
    idx = (np.arange(m + 1) + k) % m
    out = bridge[idx] - bridge[k]
    out[0] = 0.0
    out[m] = 0.0
    return out


def sample_excursion_grid(m: int, seed) -> ExcursionGrid:
    """Gaussian random-walk bridge with step sd ``m**-0.5``, Vervaat-rotated."""
    if m < 2 or m & (m - 1):
        raise ContractViolation("grid size must be a power of two >= 2")
    rng = as_seed(seed).child("excursion").rng()
    walk = np.concatenate(([0.0], np.cumsum(rng.standard_normal(m)) / np.sqrt(m)))
    bridge = walk - np.arange(m + 1) / m * walk[m]
    bridge[m] = 0.0
    return ExcursionGrid(vervaat(bridge))


def tagged_mass(z, t):
    """Root-fragment mass for a standard normal ``z`` at drift ``t``: z^2/(z^2+t^2)."""
    z2 = np.square(z)
    return z2 / (z2 + t * t) if t != 0 else np.ones_like(z2)


def sample_tagged_mass(t: float, count: int, seed) -> np.ndarray:
    """Draws of 1/(1+S_t) with S the 1/2-stable subordinator of exponent sqrt(2 lambda)."""
    if t < 0:
        raise ContractViolation("drift must be nonnegative")
    z = as_seed(seed).child("tagged").rng().standard_normal(count)
    return tagged_mass(z, t)
