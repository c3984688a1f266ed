"""Command line entry point: ``addcoal <command> [options]``."""
from __future__ import annotations

import argparse
import contextlib
import json
import sys

from .cut_tree import build_cut_tree, dump_cut_tree, same_shape
from .excursion_ops import drifted_records, p_process
from .fragmentation import fragmentation_timeline, x_ap
from .harness import run_suite
from .model import EXPONENTIAL, RANK, ContractViolation, encode_number, fixture, load_instance, save_instance
from .pacman import bertoin_function, dump_bertoin_csv
from .reconstruct import complete_routings, instance_key, phi_rebuild, xi_stick_breaking
from .samplers import Seed, sample_excursion_grid, sample_instance

EXACT_SUITES = ("coupling-exact", "coupling-float", "prim-exact", "figure1", "tau-recovery",
                "xi-roundtrip", "phi-true", "phi-sampled")
STAT_SUITES = ("tagged-law", "cross-law", "f-marginal", "prim-scaling")


def _mode(args):
    if getattr(args, "exact", False):
        return RANK
    return EXPONENTIAL if args.mode in ("exp", EXPONENTIAL) else RANK


def _instance(args):
    if args.inp:
        if args.inp.upper() in ("P3", "C3", "P4", "FIG1"):
            return fixture(args.inp.upper())
        return load_instance(args.inp)
    return sample_instance(args.n, _mode(args), Seed(args.seed))


@contextlib.contextmanager
def _open_out(args):
    """The ``--out`` file, or stdout (left open, with a trailing newline)."""
    if args.out:
        with open(args.out, "w") as fh:
            yield fh
    else:
        yield sys.stdout
        print()


def _number(x):
    return encode_number(x)


def cmd_gen(args):
    tree, sched = _instance(args)
    if args.out:
        save_instance(args.out, tree, sched)
    else:
        from .model import instance_to_dict

        json.dump(instance_to_dict(tree, sched), sys.stdout)
        print()
    return 0


def cmd_fragment(args):
    tree, sched = _instance(args)
    tl = fragmentation_timeline(tree, sched)
    t = args.t[0] if args.t else 0
    out = {
        "events": [ev.as_dict() for ev in tl.events],
        "t": t,
        "x_ap": [_number(m) for m in x_ap(tl, t)],
    }
    with _open_out(args) as fh:
        json.dump(out, fh, default=_number)
    return 0


def cmd_cuttree(args):
    tree, sched = _instance(args)
    ct = build_cut_tree(tree, sched)
    with _open_out(args) as fh:
        dump_cut_tree(ct, fh)
    return 0


def cmd_bertoin(args):
    tree, sched = _instance(args)
    F = bertoin_function(build_cut_tree(tree, sched))
    with _open_out(args) as fh:
        dump_bertoin_csv(F, fh)
    return 0


def cmd_xb(args):
    e = sample_excursion_grid(args.grid, Seed(args.seed))
    out = [drifted_records(e, t).as_dict() for t in (args.t or [1.0])]
    if not args.full:
        for d in out:
            d.pop("records")
            d["lengths"] = sorted(d["lengths"], reverse=True)[:20]
    with _open_out(args) as fh:
        json.dump(out, fh)
    return 0


def cmd_reconstruct(args):
    tree, sched = _instance(args)
    ct = build_cut_tree(tree, sched)
    F = bertoin_function(ct)
    X = xi_stick_breaking(F)
    diff = same_shape(ct, X, tol=0 if ct.exact else 1e-9)
    true_rebuild = phi_rebuild(complete_routings(ct, true=True))
    sampled = phi_rebuild(complete_routings(ct, Seed(args.seed).child("cli-routing")))
    sampled_F = bertoin_function(build_cut_tree(*sampled))
    same_F = sampled_F == F if ct.exact else bool(
        len(sampled_F) == len(F) and abs(sampled_F.values - F.values).max() <= 1e-9
    )
    report = {
        "xi_isomorphic": diff is None,
        "xi_difference": diff,
        "phi_true_equal": instance_key(*true_rebuild) == instance_key(tree, sched),
        "phi_sampled_same_function": same_F,
        "phi_sampled_tree_differs": instance_key(*sampled) != instance_key(tree, sched),
        "p_process": [[_number(t), _number(v)] for t, v in p_process(F).steps()] if ct.exact else None,
    }
    print(json.dumps(report))
    ok = report["xi_isomorphic"] and report["phi_true_equal"] and report["phi_sampled_same_function"]
    return 0 if ok else 1


def cmd_suite(args, allowed):
    if args.experiment not in allowed:
        raise ContractViolation(f"unknown experiment {args.experiment!r}; choose from {', '.join(allowed)}")
    cfg = {"experiment": args.experiment, "seed": args.seed_given}
    for key in ("n", "reps", "grid"):
        cfg[key] = getattr(args, key + "_given")
    if args.t:
        cfg["t"] = args.t
    if getattr(args, "instance", None):
        cfg["instance"] = args.instance
    if getattr(args, "corrupt", False):
        cfg["corrupt"] = True
    report = run_suite(cfg)
    if args.json or args.out:
        with _open_out(args) as fh:
            fh.write(report.to_json(indent=2))
    else:
        for c in report.checks:
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.statistic} (tol {c.tolerance}) {c.note}")
        print("PASS" if report.passed else "FAIL", report.experiment)
    return 0 if report.passed else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--mode", choices=("rank", "exp", "exponential"), default="rank")
    common.add_argument("--exact", action="store_true", help="force rank mode (exact arithmetic)")
    common.add_argument("--t", type=float, action="append", help="drift/time; repeatable")
    common.add_argument("--grid", type=int, default=None, help="excursion grid size (power of two)")
    common.add_argument("--reps", type=int, default=None)
    common.add_argument("--in", dest="inp", default=None, help="instance JSON file or fixture name")
    common.add_argument("--out", default=None)
    common.add_argument("--json", action="store_true")

    p = argparse.ArgumentParser(prog="addcoal", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("gen", "sample an instance"),
        ("fragment", "fragmentation timeline and component masses at --t"),
        ("cuttree", "cut-tree as nested JSON"),
        ("bertoin", "Bertoin function as CSV"),
        ("xb", "drifted excursion decomposition of a sampled grid excursion"),
        ("reconstruct", "stick-breaking and rebuild roundtrips"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        if name == "xb":
            s.add_argument("--full", action="store_true", help="include record positions")
    v = sub.add_parser("verify", parents=[common], help="exact acceptance suites")
    v.add_argument("experiment", choices=EXACT_SUITES)
    v.add_argument("--instance", choices=("P3", "C3", "P4", "FIG1"))
    v.add_argument("--corrupt", action="store_true", help="perturb one cut time (negative control)")
    s = sub.add_parser("stats", parents=[common], help="statistical suites")
    s.add_argument("experiment", choices=STAT_SUITES)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    # suites fall back to their own defaults; single-instance commands to small ones
    args.seed_given, args.n_given, args.reps_given, args.grid_given = args.seed, args.n, args.reps, args.grid
    if args.seed is None:
        args.seed = 1
    if args.n is None:
        args.n = 20
    if args.grid is None:
        args.grid = 2**12
    try:
        if args.command == "verify":
            return cmd_suite(args, EXACT_SUITES)
        if args.command == "stats":
            return cmd_suite(args, STAT_SUITES)
        return {
            "gen": cmd_gen,
            "fragment": cmd_fragment,
            "cuttree": cmd_cuttree,
            "bertoin": cmd_bertoin,
            "xb": cmd_xb,
            "reconstruct": cmd_reconstruct,
        }[args.command](args)
    except ContractViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
