"""Excursions of f(h) - t*h above its running infimum, and the root process P_t."""
from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .model import ContractViolation, encode_number, mass_list
from .pacman import BreakpointFunction
from .samplers import ExcursionGrid

FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class RecordDecomposition:
    t: object
    records: tuple
    lengths: tuple

    def sorted_lengths(self):
        return mass_list(self.lengths)

    def as_dict(self):
        return {
            "t": encode_number(self.t),
            "records": [encode_number(x) for x in self.records],
            "lengths": [encode_number(x) for x in self.lengths],
        }

    def dump(self, fh):
        json.dump(self.as_dict(), fh)


def _exact_record_mask(F: BreakpointFunction, t):
    d, H, V = F.integer_form()
    t = Fraction(t)
    p, q = t.numerator, t.denominator
    g = q * V - p * H
    prev = np.minimum.accumulate(g)
    mask = np.empty(g.shape[0], dtype=bool)
    mask[0] = True
    mask[1:] = g[1:] <= prev[:-1]
    return mask


def _float_record_mask(values, h, t):
    values = np.asarray(values, dtype=float)
    h = np.asarray(h, dtype=float)
    scale = max(1.0, float(np.max(np.abs(values))), abs(t) * float(h[-1]))
    mask = kernels.record_mask(values, h, float(t), FLOAT_TOL * scale)
    mask[-1] = True
    return mask


def record_mask(f, t):
    """Weak records of ``f(h) - t*h`` (``<=`` the running minimum so far)."""
    if t < 0:
        raise ContractViolation("drift must be nonnegative")
    if isinstance(f, ExcursionGrid):
        return _float_record_mask(f.values, f.abscissae, t)
    if f.exact:
        return _exact_record_mask(f, t)
    return _float_record_mask(f.values, f.h, t)


def drifted_records(f, t) -> RecordDecomposition:
    mask = record_mask(f, t)
    h = f.abscissae if isinstance(f, ExcursionGrid) else f.h
    pos = h[mask]
    lengths = pos[1:] - pos[:-1]
    return RecordDecomposition(t, tuple(pos.tolist()), tuple(lengths.tolist()))


def excursion_counts(F: BreakpointFunction, t, n):
    """Sorted excursion lengths times ``n`` as integers (exact functions on a 1/n grid)."""
    mask = _exact_record_mask(F, t)
    d, H, _ = F.integer_form()
    pos = H[mask]
    gaps = (pos[1:] - pos[:-1]) * n
    if d != 1 and np.any(gaps % d):
        raise ContractViolation("excursion lengths are not multiples of 1/n")
    return sorted((int(x) // d for x in gaps), reverse=True)


def x_b(e: ExcursionGrid, t) -> tuple:
    """Sorted excursion lengths of the drifted grid excursion."""
    return drifted_records(e, t).sorted_lengths()


def first_excursion(e: ExcursionGrid, t) -> float:
    """Length of the excursion starting at 0 (the tagged fragment)."""
    v = e.values
    h = e.abscissae
    scale = max(1.0, float(v.max()), t)
    return float(h[kernels.first_record(v, h, float(t), FLOAT_TOL * scale)])


def largest_excursion(e: ExcursionGrid, t) -> float:
    v = e.values
    h = e.abscissae
    scale = max(1.0, float(v.max()), t)
    return float(kernels.largest_gap(v, h, float(t), FLOAT_TOL * scale))


# ---------------------------------------------------------------------------
# P process


@dataclass(frozen=True)
class PProcess:
    """Right-continuous step function starting at 1 at t = 0."""

    jump_times: tuple
    values: tuple

    def value(self, t):
        return self.values[bisect.bisect_right(self.jump_times, t)]

    def steps(self):
        return list(zip((0,) + tuple(self.jump_times), self.values))


def root_records(h, values, exact, start=1):
    """Grid indices of strict prefix minima of ``values/h`` from ``start`` onward.

    With those indices ``i_0 < i_1 < ...`` the process is P_t = h[i_k] for t in
    ``[r(i_k), r(i_{k-1}))``.
    """
    idx, rates = [], []
    best = None
    for j in range(start, len(h)):
        r = values[j] / h[j]
        if best is None or (r < best if exact else r < best - FLOAT_TOL * max(1.0, abs(best))):
            best = r
            idx.append(j)
            rates.append(r)
    return idx, rates


def p_process(F: BreakpointFunction) -> PProcess:
    """P_t = min{h > 0 on the grid : F(h) <= t h}."""
    idx, rates = root_records(F.h, F.values, F.exact)
    # records have decreasing rates; the last one is h = 1 with rate 0
    times, vals = [], [F.h[idx[-1]]]
    for j in range(len(idx) - 2, -1, -1):
        times.append(rates[j])
        vals.append(F.h[idx[j]])
    return PProcess(tuple(times), tuple(vals))


def p_process_mismatches(F: BreakpointFunction, timeline, tol=0) -> list:
    """Differences between P and the root-component mass trajectory."""
    P = p_process(F)
    want = timeline.rootmass
    got = P.steps()
    if len(want) != len(got):
        return [("length", len(got), len(want))]
    out = []
    for (ta, ma), (tb, mb) in zip(got, want):
        if abs(ta - tb) > tol * max(1, abs(tb)) or abs(ma - mb) > tol:
            out.append(((ta, ma), (tb, mb)))
    return out
