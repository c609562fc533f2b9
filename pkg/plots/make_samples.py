#!/usr/bin/env python3
"""Regenerate the sample CSVs and fit JSONs shipped under plots/samples/.

Requires the bstlab package.  Sizes are kept modest so regeneration stays
under a minute; the figures these feed are illustrative, not the acceptance
measurements.
"""

import csv
import json
import pathlib

from bstlab import harness
from bstlab.harness import fit, ratio_table, run_experiment, write_csv
from bstlab.workloads import gen_random, gen_sequential, gen_working_set

SEED = 1
OUT = pathlib.Path(__file__).parent / "samples"


def ratio_rows(records_a, records_b, label, workload):
    """Ratio series encoded in the harness schema: avg_cost holds the ratio,
    structure holds the 'a/b' label, count columns are zeroed."""
    by_b = {(r.n, r.k, r.seed): r for r in records_b}
    rows = []
    for a in records_a:
        b = by_b[(a.n, a.k, a.seed)]
        rows.append(harness.ExperimentRecord(
            structure=label, workload=workload, n=a.n, k=a.k, m=a.m,
            seed=a.seed, total_cost=0, access_inits=0, link_follows=0,
            rotations=0, avg_cost=a.avg_cost / b.avg_cost, ib=a.ib,
            opt_lb=0))
    return rows


def main():
    OUT.mkdir(exist_ok=True)

    # family 1: sequential avg cost vs lg lg n
    seq = {s: [] for s in ("splay", "tango", "multisplay")}
    for e in range(8, 14):
        s = gen_sequential(2 ** e)
        for name in seq:
            seq[name].append(run_experiment(name, s))
    write_csv(OUT / "sequential.csv", sum(seq.values(), []))

    # family 2: ratio plots (sequential and random)
    write_csv(OUT / "sequential_ratio.csv",
              ratio_rows(seq["tango"], seq["splay"], "tango/splay",
                         "sequential"))
    rnd = {s: [] for s in ("splay", "tango", "multisplay")}
    for e in range(8, 14):
        s = gen_random(2 ** e, seed=SEED)
        for name in rnd:
            rnd[name].append(run_experiment(name, s))
    write_csv(OUT / "random_ratio.csv",
              ratio_rows(rnd["tango"], rnd["splay"], "tango/splay", "random")
              + ratio_rows(rnd["tango"], rnd["multisplay"],
                           "tango/multisplay", "random"))

    # family 3: working-set panels (vs lg k at fixed n, vs lg lg n at fixed k)
    lgk = [run_experiment("splay", gen_working_set(2 ** 12, k, seed=SEED))
           for k in (4, 8, 16, 32, 64, 128, 256)]
    write_csv(OUT / "working_set_lgk.csv", lgk)
    panel = []
    for e in range(10, 15):
        s = gen_working_set(2 ** e, 16, seed=SEED)
        panel.append(run_experiment("splay", s))
        panel.append(run_experiment("tango", s))
    write_csv(OUT / "working_set_lglgn.csv", panel)

    # family 4: fit overlays for k=2 and k=4 multisplay fine grids
    for k, model in ((2, "rho_linear"), (4, "rho_cubic")):
        records = []
        for e in range(5, 14):
            s = gen_working_set(2 ** e, k, seed=SEED)
            records.append(run_experiment("multisplay", s))
        write_csv(OUT / f"fine_k{k}.csv", records)
        with open(OUT / f"fit_k{k}.json", "w") as f:
            json.dump(fit(records, model), f, indent=2)

    # family 5: fixed-n working-set comparison across structures
    fixed = []
    for k in (4, 16, 64):
        s = gen_working_set(2 ** 13, k, seed=SEED)
        for name in ("splay", "multisplay", "tango"):
            fixed.append(run_experiment(name, s))
    write_csv(OUT / "fixed_n_working_set.csv", fixed)
    print(f"samples written to {OUT}")


if __name__ == "__main__":
    main()
