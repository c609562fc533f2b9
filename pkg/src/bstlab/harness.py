"""Benchmark harness: run metered experiments, serialize results, fit cost
models, and validate measured costs against the interleave lower bound."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import BstLabError
from .multisplay import MultiSplayTree
from .reference_model import interleave_bound, opt_lower_bound
from .splay import SplayTree
from .tango import TangoTree
from . import workloads

CSV_FIELDS = ["structure", "workload", "n", "k", "m", "seed", "total_cost",
              "access_inits", "link_follows", "rotations", "avg_cost",
              "ib", "opt_lb"]

STRUCTURES = {
    "splay": SplayTree,
    "tango": TangoTree,
    "multisplay": MultiSplayTree,
}

GENERATORS = {
    "sequential": workloads.gen_sequential,
    "random": workloads.gen_random,
    "working_set": workloads.gen_working_set,
    "unified": workloads.gen_unified,
}


@dataclass
class ExperimentRecord:
    structure: str
    workload: str
    n: int
    k: int       # 0 when the workload has no k parameter
    m: int
    seed: int    # 0 when the workload is deterministic
    total_cost: int
    access_inits: int
    link_follows: int
    rotations: int
    avg_cost: float
    ib: int
    opt_lb: int

    def row(self):
        return [self.structure, self.workload, self.n, self.k, self.m,
                self.seed, self.total_cost, self.access_inits,
                self.link_follows, self.rotations,
                f"{self.avg_cost:.6f}", self.ib, self.opt_lb]


def make_sequence(workload, n, k=0, seed=0):
    """Generate the access sequence for a workload by name."""
    if workload == "sequential":
        return workloads.gen_sequential(n)
    if workload == "random":
        return workloads.gen_random(n, seed)
    if workload == "working_set":
        return workloads.gen_working_set(n, k, seed)
    if workload == "unified":
        return workloads.gen_unified(n, k)
    raise BstLabError("bad-argument", f"unknown workload {workload!r}")


def run_experiment(structure, seq, ib_value=None):
    """Run one structure over one access sequence; returns a record."""
    if structure not in STRUCTURES:
        raise BstLabError("bad-argument", f"unknown structure {structure!r}")
    tree = STRUCTURES[structure](seq.n)
    tree.run(seq.keys)
    meter = tree.meter
    total = meter.total_cost
    if ib_value is None:
        ib_value = interleave_bound(seq.keys, seq.n).total
    lb = max(seq.m, math.ceil(ib_value / 2 - seq.n))
    return ExperimentRecord(
        structure=structure,
        workload=seq.generator,
        n=seq.n,
        k=int(seq.params.get("k", 0)),
        m=seq.m,
        seed=seq.seed,
        total_cost=int(total),
        access_inits=int(meter.access_inits),
        link_follows=int(meter.link_follows),
        rotations=int(meter.rotations),
        avg_cost=total / seq.m,
        ib=int(ib_value),
        opt_lb=int(lb),
    )


def run_grid(structures, workload, ns, ks=(0,), seed=0, ib_cache=None):
    """Run every structure over every (n, k) cell of a workload grid.

    The interleave bound is computed once per sequence and shared across
    structures (it depends only on the sequence).
    """
    if ib_cache is None:
        ib_cache = {}
    records = []
    for n in ns:
        for k in ks:
            seq = make_sequence(workload, n, k=k, seed=seed)
            ck = (workload, n, k, seed)
            if ck not in ib_cache:
                ib_cache[ck] = interleave_bound(seq.keys, seq.n).total
            for s in structures:
                records.append(run_experiment(s, seq, ib_value=ib_cache[ck]))
    return records


# -- delimited output ---------------------------------------------------------


def write_csv(path, records):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_FIELDS)
        for r in records:
            w.writerow(r.row())


def read_csv(path):
    """Read records back; returns a list of ExperimentRecord."""
    out = []
    with open(path, newline="") as f:
        rd = csv.DictReader(f)
        if rd.fieldnames != CSV_FIELDS:
            raise BstLabError("bad-argument",
                              f"unexpected CSV header in {path}")
        for row in rd:
            out.append(ExperimentRecord(
                structure=row["structure"], workload=row["workload"],
                n=int(row["n"]), k=int(row["k"]), m=int(row["m"]),
                seed=int(row["seed"]), total_cost=int(row["total_cost"]),
                access_inits=int(row["access_inits"]),
                link_follows=int(row["link_follows"]),
                rotations=int(row["rotations"]),
                avg_cost=float(row["avg_cost"]), ib=int(row["ib"]),
                opt_lb=int(row["opt_lb"])))
    return out


# -- model fitting ------------------------------------------------------------

FIT_MODELS = ("lgn", "lglgn", "lgk", "rho_linear", "rho_cubic")


def _design(model, records):
    if model == "lgn":
        x = np.array([math.log2(r.n) for r in records])
        cols = [np.ones_like(x), x]
    elif model == "lglgn":
        x = np.array([math.log2(math.log2(r.n)) for r in records])
        cols = [np.ones_like(x), x]
    elif model == "lgk":
        for r in records:
            if r.k < 2:
                raise BstLabError("degenerate-fit",
                                  "lgk model needs k >= 2 on every row")
        x = np.array([math.log2(r.k) for r in records])
        cols = [np.ones_like(x), x]
    elif model in ("rho_linear", "rho_cubic"):
        x = np.array([2.0 * math.log2(r.n) / r.n for r in records])
        deg = 1 if model == "rho_linear" else 3
        cols = [x ** i for i in range(deg + 1)]
    else:
        raise BstLabError("bad-argument", f"unknown fit model {model!r}")
    return x, np.column_stack(cols)


def fit(records, model):
    """Least-squares fit of avg_cost against a model; returns a dict with
    model name, coefficient list, and r2.

    rho models regress on rho(n) = 2 lg n / n, the leading-order probability
    that two random keys share a root-leaf path.  rho_linear reports [A, B]
    for cost = B - (B - A) * rho: A is the cost at rho = 1 and B the
    extrapolated cost at rho = 0.
    """
    if not records:
        raise BstLabError("no-rows", "nothing to fit")
    x, X = _design(model, records)
    y = np.array([r.avg_cost for r in records])
    if X.shape[0] < X.shape[1]:
        raise BstLabError("degenerate-fit",
                          f"{model} needs at least {X.shape[1]} rows")
    if X.shape[1] > 1 and np.ptp(x) == 0.0:
        raise BstLabError("degenerate-fit", "regressor has no variation")
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise BstLabError("degenerate-fit", "design matrix is rank deficient")
    resid = y - X @ coef
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    if model == "rho_linear":
        c0, c1 = coef
        coeffs = [float(c0 + c1), float(c0)]   # [A, B]
    else:
        coeffs = [float(c) for c in coef]
    return {"model": model, "coefficients": coeffs,
            "residual_rms": math.sqrt(ss_res / len(y)), "r_squared": r2}


def predict(fit_result, x):
    """Evaluate a fit at regressor value x (lg n, lg lg n, lg k, or rho)."""
    model = fit_result["model"]
    c = fit_result["coefficients"]
    if model == "rho_linear":
        a, b = c
        return b - (b - a) * x
    if model == "rho_cubic":
        return sum(ci * x ** i for i, ci in enumerate(c))
    return c[0] + c[1] * x


# -- ratio table and validation ------------------------------------------------


def ratio_table(records_a, records_b):
    """Element-wise avg-cost ratios a/b matched on (n, k, seed); returns a
    list of (n, ratio) sorted by n."""
    key_a = {(r.n, r.k, r.seed): r.avg_cost for r in records_a}
    key_b = {(r.n, r.k, r.seed): r.avg_cost for r in records_b}
    if set(key_a) != set(key_b):
        raise BstLabError("bad-argument",
                          "ratio_table requires matched (n, k, seed) sets")
    return [(n, key_a[(n, k, s)] / key_b[(n, k, s)])
            for (n, k, s) in sorted(key_a)]


def validate(records):
    """Check every record against the optimum lower bound.

    Returns (ok, failures): a record fails when its total cost is below
    max(m, ceil(ib / 2) - n) or below m.
    """
    failures = []
    for r in records:
        lb = max(r.m, math.ceil(r.ib / 2 - r.n))
        if r.total_cost < lb:
            failures.append((r, lb))
    return (len(failures) == 0), failures
