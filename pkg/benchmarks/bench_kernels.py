"""Time every kernel in its numba and plain-Python flavour.

    python benchmarks/bench_kernels.py --n 20000 --grid 16384 --repeat 3
    python benchmarks/bench_kernels.py --suite coupling-float

With ``--suite`` the whole experiment is also run twice in subprocesses,
once with ADDCOAL_NO_NUMBA=1, and the wall times are compared.

The numba flavour is compiled (and cached) on a warm-up call that is not
timed.  Both flavours are checked for equal output before timing.
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from addcoal import kernels
from addcoal.cut_tree import build_cut_tree
from addcoal.model import EXPONENTIAL, RANK
from addcoal.prim import _csr
from addcoal.samplers import Seed, sample_excursion_grid, sample_instance


def workloads(n, grid, seed):
    s = Seed(seed)
    tree, sched = sample_instance(n, RANK, s.child("rank"))
    eu, ev = tree.edge_arrays()
    order = sched.order()
    merged = kernels.py_merge_tree(n, eu, ev, order)
    ptr, nbr, lab = _csr(tree, np.asarray(sched.times, dtype=np.int64))
    ct = build_cut_tree(*sample_instance(n, EXPONENTIAL, s.child("exp")))
    tau = np.where(np.isinf(ct.tau), 0.0, ct.tau).astype(float)
    e = sample_excursion_grid(grid, s.child("grid"))
    code = s.child("code").rng().integers(0, n, size=n - 2, dtype=np.int64)
    rec = (e.values, e.abscissae, 1.0, 1e-12)
    return {
        "prufer_decode": (code, n),
        "merge_tree": (n, eu, ev, order),
        "orient_cuts": (n, 0, eu, ev, order, *merged),
        "prim_order": (n, 0, ptr, nbr, lab),
        "component_sizes": (n, eu, ev, np.asarray(sched.times) > n // 2),
        "spine_accumulate": (n, ct.entry, ct.far, tau, ct.mass.astype(float), np.zeros(n - 1), np.zeros(n - 1)),
        "first_record": rec,
        "record_mask": rec,
        "largest_gap": rec,
    }


def _fresh(args):
    return [a.copy() if isinstance(a, np.ndarray) else a for a in args]


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        a = _fresh(args)
        t0 = time.perf_counter()
        fn(*a)
        best = min(best, time.perf_counter() - t0)
    return best


def _equal(a, b):
    if isinstance(a, tuple):
        return all(_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def time_suite(suite, plain):
    env = dict(os.environ)
    env.pop("ADDCOAL_NO_NUMBA", None)
    if plain:
        env["ADDCOAL_NO_NUMBA"] = "1"
    cmd = [sys.executable, "-m", "addcoal", "verify", suite, "--json"]
    t0 = time.perf_counter()
    out = subprocess.run(cmd, env=env, capture_output=True, text=True)
    return time.perf_counter() - t0, out.returncode


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n", type=int, default=20000, help="tree size")
    p.add_argument("--grid", type=int, default=2**14, help="excursion grid size")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.add_argument("--suite", default=None, help="also time this exact suite end to end")
    args = p.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rows = []
    for name, wargs in workloads(args.n, args.grid, args.seed).items():
        py, nb = kernels.variant(name, False), kernels.variant(name, True)
        ok = _equal(py(*_fresh(wargs)), nb(*_fresh(wargs)))  # also compiles
        t_py = best_of(py, wargs, args.repeat)
        t_nb = best_of(nb, wargs, args.repeat)
        rows.append({"kernel": name, "python_s": t_py, "numba_s": t_nb, "speedup": t_py / t_nb, "equal": ok})

    suite = None
    if args.suite:
        t_nb, rc_nb = time_suite(args.suite, plain=False)
        t_py, rc_py = time_suite(args.suite, plain=True)
        suite = {"suite": args.suite, "numba_s": t_nb, "python_s": t_py, "exit_codes": [rc_nb, rc_py]}

    if args.json:
        print(json.dumps({"kernels": rows, "suite": suite}, indent=2))
        return
    print(f"n={args.n} grid={args.grid} best of {args.repeat}")
    print(f"{'kernel':18s} {'python':>10s} {'numba':>10s} {'speedup':>8s}  equal")
    for r in rows:
        print(f"{r['kernel']:18s} {r['python_s']:10.4f} {r['numba_s']:10.5f} {r['speedup']:8.1f}  {r['equal']}")
    if suite:
        print(f"suite {suite['suite']}: numba {suite['numba_s']:.1f}s, python {suite['python_s']:.1f}s, "
              f"exit codes {suite['exit_codes']}")


if __name__ == "__main__":
    main()
