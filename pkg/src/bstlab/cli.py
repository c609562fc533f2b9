"""Command line driver: run experiment grids, fit models, validate CSVs,
and evaluate the interleave bound on a stored trace."""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import harness, workloads
from .errors import BstLabError
from .reference_model import interleave_bound, opt_lower_bound

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BAD_ARGS = 2

WORKLOAD_NAMES = {
    "sequential": "sequential",
    "random": "random",
    "workingset": "working_set",
    "unified": "unified",
}

MODEL_NAMES = {
    "lgn": "lgn",
    "lglgn": "lglgn",
    "lgk": "lgk",
    "rho-linear": "rho_linear",
    "rho-cubic": "rho_cubic",
}


def parse_int_expr(tok):
    tok = tok.strip()
    try:
        if "^" in tok:
            base, _, exp = tok.partition("^")
            return int(base) ** int(exp)
        return int(tok)
    except ValueError:
        raise BstLabError("bad-argument", f"not an integer: {tok!r}")


def parse_n_list(text):
    """Comma list of ints; elements may be 2^k; `a..b` expands by doubling."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, _, hi = part.partition("..")
            v = parse_int_expr(lo)
            top = parse_int_expr(hi)
            if v <= 0 or top < v:
                raise BstLabError("bad-argument", f"bad range {part!r}")
            while v <= top:
                out.append(v)
                v *= 2
        else:
            out.append(parse_int_expr(part))
    if not out or any(v <= 0 for v in out):
        raise BstLabError("bad-argument", f"bad n list {text!r}")
    return out


def _one_cell(args):
    structure, workload, n, k, seed, passes, validate_structures = args
    if workload == "sequential" and passes is not None:
        seq = workloads.gen_sequential(n, passes=passes)
    else:
        seq = harness.make_sequence(workload, n, k=k, seed=seed)
    ib = interleave_bound(seq.keys, seq.n).total
    if validate_structures:
        cls = harness.STRUCTURES[structure]
        tree = cls(seq.n)
        for key in seq.keys:
            tree.access(int(key))
            tree.check_invariants()
        rec = harness.run_experiment(structure, seq, ib_value=ib)
        # replace the metered totals with the stepwise run (identical costs,
        # but keep the validated tree's meter to be safe)
        rec.total_cost = int(tree.meter.total_cost)
        rec.access_inits = int(tree.meter.access_inits)
        rec.link_follows = int(tree.meter.link_follows)
        rec.rotations = int(tree.meter.rotations)
        rec.avg_cost = rec.total_cost / seq.m
        return rec
    return harness.run_experiment(structure, seq, ib_value=ib)


def cmd_run(args):
    ns = parse_n_list(args.n)
    ks = [parse_int_expr(t) for t in args.k.split(",")] if args.k else [0]
    workload = WORKLOAD_NAMES[args.workload]
    if workload in ("working_set", "unified") and ks == [0]:
        raise BstLabError("bad-argument", f"{args.workload} requires --k")
    if args.validate_structures and max(ns) > 2 ** 10:
        raise BstLabError("bad-argument",
                          "--validate-structures supports n <= 2^10")
    cells = [(args.structure, workload, n, k, args.seed, args.passes,
              args.validate_structures)
             for n in ns for k in ks]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            records = list(ex.map(_one_cell, cells))
    else:
        records = [_one_cell(c) for c in cells]
    harness.write_csv(args.out, records)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def cmd_fit(args):
    records = harness.read_csv(args.infile)
    model = MODEL_NAMES[args.model]
    if args.y != "avg_cost":
        raise BstLabError("bad-argument", "only --y avg_cost is supported")
    result = harness.fit(records, model)
    print(json.dumps(result, indent=2))
    return EXIT_OK


def cmd_validate(args):
    records = harness.read_csv(args.infile)
    ok, failures = harness.validate(records)
    for rec, lb in failures:
        print(f"FAIL bound: {rec.structure} {rec.workload} n={rec.n} "
              f"k={rec.k} seed={rec.seed}: total_cost={rec.total_cost} "
              f"< lower bound {lb}")
    if args.order:
        order = args.order.split("<")
        if any(s not in harness.STRUCTURES for s in order) or len(order) < 2:
            raise BstLabError("bad-argument", f"bad --order {args.order!r}")
        cells = {}
        for r in records:
            cells.setdefault((r.workload, r.n, r.k, r.seed),
                             {})[r.structure] = r.total_cost
        for cell, costs in sorted(cells.items()):
            present = [s for s in order if s in costs]
            for a, b in zip(present, present[1:]):
                if not costs[a] < costs[b]:
                    ok = False
                    print(f"FAIL order: {cell}: {a}={costs[a]} "
                          f"!< {b}={costs[b]}")
    if ok:
        print(f"ok: {len(records)} records validated")
        return EXIT_OK
    return EXIT_VALIDATION


def cmd_ib(args):
    seq = workloads.read_sequence(args.trace)
    trace = interleave_bound(seq.keys, seq.n)
    print(f"m={seq.m} n={seq.n} ib={trace.total} "
          f"opt_lb={opt_lower_bound(seq.keys, seq.n)}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="bstlab",
                                description="self-adjusting BST laboratory")
    sub = p.add_subparsers(dest="cmd", required=True)

    pr = sub.add_parser("run", help="run an experiment grid")
    pr.add_argument("--structure", required=True,
                    choices=sorted(harness.STRUCTURES))
    pr.add_argument("--workload", required=True,
                    choices=sorted(WORKLOAD_NAMES))
    pr.add_argument("--n", required=True,
                    help="comma list or doubling range, e.g. 2^8..2^17")
    pr.add_argument("--k", default=None, help="comma list of k values")
    pr.add_argument("--passes", type=int, default=None,
                    help="passes for the sequential workload")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--out", required=True)
    pr.add_argument("--workers", type=int, default=1)
    pr.add_argument("--validate-structures", action="store_true",
                    help="check BST and aux-tree invariants after every "
                         "access (n <= 2^10)")
    pr.set_defaults(func=cmd_run)

    pf = sub.add_parser("fit", help="fit a cost model to a CSV")
    pf.add_argument("--model", required=True, choices=sorted(MODEL_NAMES))
    pf.add_argument("--in", dest="infile", required=True)
    pf.add_argument("--x", default=None,
                    help="regressor column (implied by the model)")
    pf.add_argument("--y", default="avg_cost")
    pf.set_defaults(func=cmd_fit)

    pv = sub.add_parser("validate", help="check records against lower bounds")
    pv.add_argument("--in", dest="infile", required=True)
    pv.add_argument("--order", default=None,
                    help="required cost ordering, e.g. splay<multisplay<tango")
    pv.set_defaults(func=cmd_validate)

    pi = sub.add_parser("ib", help="interleave bound of a stored trace")
    pi.add_argument("--trace", required=True)
    pi.set_defaults(func=cmd_ib)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_BAD_ARGS if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except BstLabError as e:
        print(f"error[{e.code}]: {e}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except FileNotFoundError as e:
        print(f"error[bad-argument]: {e}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
