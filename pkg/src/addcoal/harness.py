"""Experiments, oracles and reports.

Each experiment is reproducible from ``(name, parameters, seed)``: replica
``i`` draws from ``Seed(seed).child(name, i)`` only.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .cut_tree import (
    build_cut_tree,
    components_from_cut_tree,
    height,
    leaf_distance,
    mass_mismatches,
    same_shape,
    tau_from_lengths,
)
from .excursion_ops import (
    excursion_counts,
    first_excursion,
    largest_excursion,
    p_process_mismatches,
    record_mask,
)
from .fragmentation import direct_bertoin_points, fragmentation_timeline, truncated_distance, x_ap_sweep
from .model import EXPONENTIAL, RANK, ContractViolation, component_masses, encode_number, fixture
from .pacman import bertoin_function, pacman_run, pushforward_mismatches, record_sequence
from .prim import PrimEncoder, forest_component_counts, path_component_counts, prim_order
from .reconstruct import complete_routings, instance_key, phi_rebuild, xi_stick_breaking
from .samplers import Seed, sample_cayley, sample_cut_schedule, sample_excursion_grid, sample_instance, sample_tagged_mass


# ---------------------------------------------------------------------------
# oracles


def multiset_equal(a, b, tol=0):
    """``(equal, max deviation)`` after sorting both sides."""
    a, b = sorted(a), sorted(b)
    if len(a) != len(b):
        return False, float("inf")
    if not a:
        return True, 0.0
    dev = max(abs(x - y) for x, y in zip(a, b))
    return dev <= tol, float(dev)


def ks_two_sample(a, b) -> float:
    """Largest gap between the two empirical distribution functions."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ContractViolation("both samples must be nonempty")
    x = np.concatenate((a, b))
    fa = np.searchsorted(a, x, side="right") / a.size
    fb = np.searchsorted(b, x, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    name: str
    passed: bool
    statistic: object = None
    tolerance: object = None
    runtime: float = 0.0
    note: str = ""


@dataclass
class Report:
    experiment: str
    parameters: dict
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    def check(self, name, passed, statistic=None, tolerance=None, runtime=0.0, note=""):
        self.checks.append(Check(name, bool(passed), statistic, tolerance, runtime, note))

    def as_dict(self):
        return {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self, **kw):
        return json.dumps(self.as_dict(), default=_json_default, **kw)


def _json_default(x):
    if isinstance(x, Fraction):
        return encode_number(x)
    if isinstance(x, np.generic):
        return x.item()
    return str(x)


class Tally:
    """Per-check failure counters with the first offending replica kept."""

    def __init__(self, names):
        self.fail = {k: 0 for k in names}
        self.first = {}
        self.worst = {k: 0.0 for k in names}

    def record(self, name, ok, where, dev=0.0):
        if not ok:
            self.fail[name] += 1
            self.first.setdefault(name, where)
        self.worst[name] = max(self.worst[name], float(dev))

    def emit(self, report, tol, runtime, notes=None):
        for name, count in self.fail.items():
            note = f"first failure: {self.first[name]}" if count else ""
            if notes and name in notes:
                note = (notes[name] + "; " + note).strip("; ")
            report.check(name, count == 0, {"failures": count, "max_dev": self.worst[name]}, tol, runtime, note)


# ---------------------------------------------------------------------------
# helpers


def _instances(cfg, name, mode):
    """Fixture instance if requested, else ``reps`` random ones with n in 2..cfg.n."""
    if cfg.get("instance"):
        tree, sched = fixture(cfg["instance"])
        yield cfg["instance"], tree, sched
        return
    root = Seed(cfg["seed"]).child(name)
    for i in range(cfg["reps"]):
        s = root.child("rep", i)
        n = int(s.child("size").rng().integers(2, cfg["n"] + 1))
        tree, sched = sample_instance(n, mode, s)
        yield i, tree, sched


def _check_times(sched):
    """Every cut time plus every midpoint between consecutive ones, and one later time."""
    times = sorted(sched.times)
    out = [0]
    for a, b in zip(times, times[1:]):
        out += [a, (Fraction(a) + Fraction(b)) / 2 if sched.exact else (a + b) / 2]
    if times:
        out += [times[-1], times[-1] + 1]
    return out


def _corrupt(ct):
    """Shift the first cut time by half a unit (still below the second one)."""
    tau = ct.tau.copy()
    tau[ct.n] = tau[ct.n] + Fraction(1, 2)
    return ct.copy(tau=tau)


# ---------------------------------------------------------------------------
# experiments


def exp_coupling(cfg, exact=True):
    """Excursion lengths of the drifted F against component masses (+ structural checks)."""
    name = "coupling-exact" if exact else "coupling-float"
    rep = Report(name, _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    names = ["coupling"]
    if exact:
        names += [
            "budget_conservation",
            "reference_matches_single_pass",
            "boundedness",
            "interval_pushforward",
            "p_process_rootmass",
            "leaf_distance_identity",
            "half_routing_consistency",
            "mass_correspondence",
            "tau_recovery",
            "cut_tree_components",
            "direct_definition",
        ]
    tally = Tally(names)
    count = 0
    for where, tree, sched in _instances(cfg, name, RANK if exact else EXPONENTIAL):
        count += 1
        ct = build_cut_tree(tree, sched)
        if cfg.get("corrupt"):
            ct = _corrupt(ct)
        F = bertoin_function(ct)
        n = tree.n
        if exact:
            for t in _check_times(sched):
                want = [m.numerator * (n // m.denominator) for m in component_masses(tree, sched, t)]
                ok = excursion_counts(F, t, n) == want
                tally.record("coupling", ok, (where, n, str(t)))
            _structural(tally, where, tree, sched, ct, F, cfg)
        else:
            eu, ev = tree.edge_arrays()
            times = np.asarray(sched.times)
            h = F.h
            for t in _check_times(sched):
                mask = record_mask(F, t)
                pos = h[mask]
                got = np.sort(np.diff(pos))[::-1]
                want = np.sort(kernels.component_sizes(n, eu, ev, times > t))[::-1] / n
                ok, dev = multiset_equal(got.tolist(), want.tolist(), cfg["tol"])
                tally.record("coupling", ok, (where, n, t), dev)
    runtime = time.perf_counter() - t0
    tol = 0 if exact else cfg["tol"]
    tally.emit(rep, tol, runtime)
    rep.check("instances", count > 0, count, None, runtime)
    _runtime_check(rep, cfg, runtime)
    return rep


def _structural(tally, where, tree, sched, ct, F, cfg):
    n = tree.n
    # Pac-Man runs at every grid point spend exactly their budget
    ok = True
    for hj, vj in zip(F.h, F.values):
        tr = pacman_run(ct, hj)
        ok &= tr.eaten_mass == hj and tr.value == vj
    tally.record("budget_conservation", ok, where)
    tally.record("reference_matches_single_pass", bertoin_function(ct, reference=True) == F, where)
    tally.record("boundedness", max(F.values) <= height(ct), where)
    tally.record("interval_pushforward", not pushforward_mismatches(ct), where)
    timeline = fragmentation_timeline(tree, sched)
    tally.record("p_process_rootmass", not p_process_mismatches(F, timeline), where)
    rng = Seed(cfg["seed"]).child("pairs", hash(str(where)) & 0xFFFF).rng()
    ok = True
    for _ in range(min(3, n * (n - 1) // 2)):
        i, j = rng.choice(np.arange(1, n + 1), size=2, replace=False)
        ok &= leaf_distance(ct, int(i), int(j)) == truncated_distance(tree, sched, int(i), int(j))
    tally.record("leaf_distance_identity", ok, where)
    try:
        for b in ct.branchpoints:
            record_sequence(ct, b)
        ok = True
    except ContractViolation:
        ok = False
    tally.record("half_routing_consistency", ok, where)
    tally.record("mass_correspondence", not mass_mismatches(ct, timeline), where)
    rec = tau_from_lengths(ct)
    tally.record("tau_recovery", all(rec[b] == ct.tau[b] for b in ct.branchpoints), where)
    times = _check_times(sched)
    ok = all(
        components_from_cut_tree(ct, t) == ref
        for t, ref in zip(times, x_ap_sweep(timeline, times))
    )
    tally.record("cut_tree_components", ok, where)
    tally.record("direct_definition", direct_bertoin_points(timeline) == F.points(), where)


def exp_prim_exact(cfg):
    rep = Report("prim-exact", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    tally = Tally(["prim_identity"])
    count = 0
    for where, tree, sched in _instances(cfg, "prim-exact", RANK):
        count += 1
        enc = PrimEncoder(tree, sched)
        for k in range(tree.n):
            ok = path_component_counts(enc.path(k)) == forest_component_counts(tree, sched, k)
            tally.record("prim_identity", ok, (where, tree.n, k))
    runtime = time.perf_counter() - t0
    tally.emit(rep, 0, runtime)
    rep.check("instances", count > 0, count, None, runtime)
    _runtime_check(rep, cfg, runtime)
    return rep


FIG1_ORDER = tuple(range(1, 16))
FIG1_PATH = (0, 0, 1, 0, -1, 0, -1, -2, -1, -2, -3, -3, -4, -5, -6, -7)
FIG1_SIZES = [4, 3, 3, 2, 1, 1, 1]


def exp_figure1(cfg):
    rep = Report("figure1", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    tree, sched = fixture("FIG1")
    order = prim_order(tree, sched)
    rep.check("prim_order", order == FIG1_ORDER, list(order), 0)
    path = PrimEncoder(tree, sched).path(6)
    rep.check("path_ordinates", tuple(path.values.tolist()) == FIG1_PATH, path.values.tolist(), 0)
    sizes = path_component_counts(path)
    rep.check("component_sizes", sizes == FIG1_SIZES, sizes, 0)
    rep.check("forest_oracle", forest_component_counts(tree, sched, 6) == FIG1_SIZES, None, 0,
              time.perf_counter() - t0)
    return rep


def exp_tau_recovery(cfg):
    rep = Report("tau-recovery", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    tally = Tally(["exact", "float"])
    for mode, label in ((RANK, "exact"), (EXPONENTIAL, "float")):
        for where, tree, sched in _instances(cfg, "tau-recovery-" + mode, mode):
            ct = build_cut_tree(tree, sched)
            rec = tau_from_lengths(ct)
            if label == "exact":
                ok = all(rec[b] == ct.tau[b] for b in ct.branchpoints)
                tally.record(label, ok, where)
            else:
                dev = max((abs(rec[b] - ct.tau[b]) / ct.tau[b] for b in ct.branchpoints), default=0.0)
                tally.record(label, dev <= cfg["tol"], where, dev)
    runtime = time.perf_counter() - t0
    tally.emit(rep, {"exact": 0, "float": cfg["tol"]}, runtime)
    _runtime_check(rep, cfg, runtime)
    return rep


def exp_xi_roundtrip(cfg):
    rep = Report("xi-roundtrip", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    tally = Tally(["isomorphic", "same_function"])
    for where, tree, sched in _instances(cfg, "xi-roundtrip", RANK):
        ct = build_cut_tree(tree, sched)
        F = bertoin_function(ct)
        X = xi_stick_breaking(F)
        diff = same_shape(ct, X)
        tally.record("isomorphic", diff is None, (where, diff))
        tally.record("same_function", bertoin_function(X) == F, where)
    runtime = time.perf_counter() - t0
    tally.emit(rep, 0, runtime)
    _runtime_check(rep, cfg, runtime)
    return rep


def exp_phi_true(cfg):
    rep = Report("phi-true", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    tally = Tally(["labelled_equality"])
    for where, tree, sched in _instances(cfg, "phi-true", RANK):
        ct = build_cut_tree(tree, sched)
        rebuilt = phi_rebuild(complete_routings(ct, true=True))
        tally.record("labelled_equality", instance_key(*rebuilt) == instance_key(tree, sched), where)
    runtime = time.perf_counter() - t0
    tally.emit(rep, 0, runtime)
    _runtime_check(rep, cfg, runtime)
    return rep


def exp_phi_sampled(cfg):
    rep = Report("phi-sampled", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    tally = Tally(["function_preserved", "function_preserved_via_xi"])
    differ = 0
    total = 0
    root = Seed(cfg["seed"]).child("routing-seeds")
    for where, tree, sched in _instances(cfg, "phi-sampled", RANK):
        ct = build_cut_tree(tree, sched)
        F = bertoin_function(ct)
        X = xi_stick_breaking(F)
        for r in range(cfg["routings"]):
            s = root.child(str(where), r)
            rebuilt = phi_rebuild(complete_routings(ct, s))
            total += 1
            differ += instance_key(*rebuilt) != instance_key(tree, sched)
            tally.record("function_preserved", bertoin_function(build_cut_tree(*rebuilt)) == F, (where, r))
            via = phi_rebuild(complete_routings(X, s))
            tally.record("function_preserved_via_xi", bertoin_function(build_cut_tree(*via)) == F, (where, r))
    runtime = time.perf_counter() - t0
    tally.emit(rep, 0, runtime)
    rep.check("shuffle_observed", differ > 0, {"differing": differ, "rebuilds": total}, ">= 1", runtime)
    _runtime_check(rep, cfg, runtime)
    return rep


def _excursions(cfg, tag, count, m):
    root = Seed(cfg["seed"]).child(tag)
    for i in range(count):
        yield sample_excursion_grid(m, root.child("rep", i))


def exp_tagged_law(cfg):
    rep = Report("tagged-law", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    ts = cfg["t"]
    grid_side = {t: [] for t in ts}
    for e in _excursions(cfg, "tagged-law", cfg["reps"], cfg["grid"]):
        for t in ts:
            grid_side[t].append(first_excursion(e, t))
    for t in ts:
        law = sample_tagged_mass(t, cfg["reps"], Seed(cfg["seed"]).child("tagged-law-z", int(t * 1000)))
        d = ks_two_sample(grid_side[t], law)
        rep.check(f"ks_t={t}", d <= cfg["ks"], d, cfg["ks"], time.perf_counter() - t0,
                  "calibrated threshold; 5% two-sample critical value is 1.36*sqrt(2/reps)")
    _runtime_check(rep, cfg, time.perf_counter() - t0)
    return rep


def _ap_largest(n, t, seed):
    tree = sample_cayley(n, seed)
    sched = sample_cut_schedule(tree, EXPONENTIAL, seed)
    eu, ev = tree.edge_arrays()
    sizes = kernels.component_sizes(n, eu, ev, np.asarray(sched.times) > t)
    return sizes.max() / n


def exp_cross_law(cfg):
    rep = Report("cross-law", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    t = cfg["t"][0]
    root = Seed(cfg["seed"]).child("cross-law-ap")
    ap = [_ap_largest(cfg["n"], t, root.child("rep", i)) for i in range(cfg["reps"])]
    xb = [largest_excursion(e, t) for e in _excursions(cfg, "cross-law-xb", cfg["reps"], cfg["grid"])]
    d = ks_two_sample(ap, xb)
    runtime = time.perf_counter() - t0
    rep.check(f"ks_t={t}", d <= cfg["ks"], d, cfg["ks"], runtime,
              f"means {np.mean(ap):.4f} vs {np.mean(xb):.4f}")
    _runtime_check(rep, cfg, runtime)
    return rep


def exp_f_marginal(cfg):
    rep = Report("f-marginal", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    x = cfg.get("h", 0.5)
    root = Seed(cfg["seed"]).child("f-marginal")
    disc = []
    for i in range(cfg["reps"]):
        tree, sched = sample_instance(cfg["n"], EXPONENTIAL, root.child("rep", i))
        F = bertoin_function(build_cut_tree(tree, sched))
        disc.append(float(F.nearest(x)[1]))
    cont = [e.at(x) for e in _excursions(cfg, "f-marginal-e", cfg["reps"], cfg["grid"])]
    d = ks_two_sample(disc, cont)
    runtime = time.perf_counter() - t0
    rep.check(f"ks_h={x}", d <= cfg["ks"], d, cfg["ks"], runtime,
              f"means {np.mean(disc):.4f} vs {np.mean(cont):.4f}")
    _runtime_check(rep, cfg, runtime)
    return rep


def exp_prim_scaling(cfg):
    """Largest component under floor(t sqrt n) and floor(t n) removals against X_B(t)."""
    rep = Report("prim-scaling", _params(cfg), cfg["seed"])
    t0 = time.perf_counter()
    n = cfg["n"]
    ts = cfg["t"]
    sqrt_side = {t: [] for t in ts}
    lin_side = {t: [] for t in ts}
    root = Seed(cfg["seed"]).child("prim-scaling")
    for i in range(cfg["reps"]):
        s = root.child("rep", i)
        tree = sample_cayley(n, s)
        sched = sample_cut_schedule(tree, RANK, s)
        enc = PrimEncoder(tree, sched)
        for t in ts:
            k_sqrt = min(n - 1, int(np.floor(t * np.sqrt(n))))
            k_lin = min(n - 1, int(np.floor(t * n)))
            sqrt_side[t].append(path_component_counts(enc.path(k_sqrt))[0] / n)
            lin_side[t].append(path_component_counts(enc.path(k_lin))[0] / n)
    xb = {t: [] for t in ts}
    for e in _excursions(cfg, "prim-scaling-xb", cfg["reps"], cfg["grid"]):
        for t in ts:
            xb[t].append(largest_excursion(e, t))
    for t in ts:
        d = ks_two_sample(sqrt_side[t], xb[t])
        rep.check(f"sqrt_scaling_t={t}", d <= cfg["ks"], d, cfg["ks"], time.perf_counter() - t0)
        d = ks_two_sample(lin_side[t], xb[t])
        rep.check(f"linear_scaling_t={t}", d >= cfg["ks_reject"], d, cfg["ks_reject"],
                  time.perf_counter() - t0, "must be rejected")
    _runtime_check(rep, cfg, time.perf_counter() - t0)
    return rep


# ---------------------------------------------------------------------------
# orchestration


EXPERIMENTS = {
    "coupling-exact": (lambda c: exp_coupling(c, True),
                       dict(reps=200, n=200, budget=30.0)),
    "coupling-float": (lambda c: exp_coupling(c, False),
                       dict(reps=50, n=2000, tol=1e-9, budget=60.0)),
    "prim-exact": (exp_prim_exact, dict(reps=200, n=500, budget=60.0)),
    "figure1": (exp_figure1, dict()),
    "tau-recovery": (exp_tau_recovery, dict(reps=100, n=1000, tol=1e-9, budget=20.0)),
    "xi-roundtrip": (exp_xi_roundtrip, dict(reps=100, n=500, budget=30.0)),
    "phi-true": (exp_phi_true, dict(reps=100, n=500, budget=20.0)),
    "phi-sampled": (exp_phi_sampled, dict(reps=100, n=500, routings=5, budget=60.0)),
    "tagged-law": (exp_tagged_law, dict(reps=4000, grid=2**15, t=[0.5, 1.0, 2.0], ks=0.04, budget=120.0)),
    "cross-law": (exp_cross_law, dict(reps=2000, n=2000, grid=2**14, t=[1.0], ks=0.05, budget=180.0)),
    "f-marginal": (exp_f_marginal, dict(reps=2000, n=2000, grid=2**14, ks=0.05, budget=120.0)),
    "prim-scaling": (exp_prim_scaling, dict(reps=2000, n=10**4, grid=2**14, t=[0.5, 1.0], ks=0.07,
                                            ks_reject=0.3, budget=180.0)),
}


def default_config(name):
    if name not in EXPERIMENTS:
        raise ContractViolation(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    cfg = dict(EXPERIMENTS[name][1])
    cfg.update(experiment=name, seed=cfg.get("seed", 20240601))
    return cfg


def _params(cfg):
    return {k: v for k, v in cfg.items() if k not in ("experiment", "seed")}


def _runtime_check(rep, cfg, runtime):
    if cfg.get("budget"):
        rep.check("runtime", runtime <= cfg["budget"], round(runtime, 3), cfg["budget"], runtime)


def run_suite(config) -> Report:
    """Run one named experiment; missing parameters take the experiment defaults."""
    name = config.get("experiment")
    cfg = default_config(name)
    cfg.update({k: v for k, v in config.items() if v is not None})
    for key in ("reps", "n", "grid"):
        if key in cfg and (not isinstance(cfg[key], (int, np.integer)) or cfg[key] < 1):
            raise ContractViolation(f"parameter {key} must be a positive integer")
    if "t" in cfg and not isinstance(cfg["t"], (list, tuple)):
        cfg["t"] = [cfg["t"]]
    return EXPERIMENTS[name][0](cfg)
