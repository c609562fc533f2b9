#!/usr/bin/env python3
"""Render figures from harness CSVs.

Reads the delimited experiment records produced by the bstlab harness and
draws one figure per invocation: avg cost (or cost ratio) against a chosen
x transform, one line per series value, with an optional fitted-curve
overlay loaded from a JSON file produced by `bstlab fit`.

Usage:
    render.py --in results.csv --x lglgn --series structure \\
              [--fit fit.json] [--y avg_cost] --out figure.png
"""

import argparse
import csv
import json
import math
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

EXPECTED_HEADER = ["structure", "workload", "n", "k", "m", "seed",
                   "total_cost", "access_inits", "link_follows", "rotations",
                   "avg_cost", "ib", "opt_lb"]

X_TRANSFORMS = {
    "lgn": (lambda row: math.log2(row["n"]), "lg n"),
    "lglgn": (lambda row: math.log2(math.log2(row["n"])), "lg lg n"),
    "lgk": (lambda row: math.log2(row["k"]), "lg k"),
    "rho": (lambda row: 2.0 * math.log2(row["n"]) / row["n"], "rho(n)"),
}

NUMERIC = {"n": int, "k": int, "m": int, "seed": int, "total_cost": int,
           "access_inits": int, "link_follows": int, "rotations": int,
           "avg_cost": float, "ib": int, "opt_lb": float}


class RenderError(Exception):
    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


def read_rows(path):
    with open(path, newline="") as f:
        rd = csv.DictReader(f)
        if rd.fieldnames != EXPECTED_HEADER:
            raise RenderError("schema-mismatch",
                              f"unexpected header in {path}")
        rows = []
        for raw in rd:
            row = dict(raw)
            for col, conv in NUMERIC.items():
                row[col] = conv(float(raw[col]) if conv is int
                                and "." in raw[col] else raw[col])
            rows.append(row)
    if not rows:
        raise RenderError("no-rows", f"{path} holds no records")
    return rows


def fit_curve(fit_spec, xs):
    """y values of a bstlab fit evaluated at regressor values xs."""
    model = fit_spec["model"]
    c = fit_spec["coefficients"]
    if model == "rho_linear":
        a, b = c
        return [b - (b - a) * x for x in xs]
    if model == "rho_cubic":
        return [sum(ci * x ** i for i, ci in enumerate(c)) for x in xs]
    return [c[0] + c[1] * x for x in xs]


def render(csv_path, x_name, series_col, out_path, fit_path=None,
           y_col="avg_cost", title=None):
    rows = read_rows(csv_path)
    x_of, x_label = X_TRANSFORMS[x_name]
    if x_name == "lgk" and any(row["k"] < 2 for row in rows):
        raise RenderError("schema-mismatch", "lgk needs k >= 2 on every row")

    fig, ax = plt.subplots(figsize=(7, 4.5))
    series = {}
    for row in rows:
        series.setdefault(str(row[series_col]), []).append(row)
    for name in sorted(series):
        pts = sorted((x_of(r), float(r[y_col])) for r in series[name])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=name)

    if fit_path:
        with open(fit_path) as f:
            spec = json.load(f)
        xs = sorted(x_of(r) for r in rows)
        lo, hi = xs[0], xs[-1]
        grid = [lo + (hi - lo) * i / 199 for i in range(200)]
        ax.plot(grid, fit_curve(spec, grid), linestyle="--", color="black",
                label=f"fit: {spec['model']}")

    ax.set_xlabel(x_label)
    ax.set_ylabel(y_col.replace("_", " "))
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--x", required=True, choices=sorted(X_TRANSFORMS))
    p.add_argument("--series", default="structure")
    p.add_argument("--fit", default=None)
    p.add_argument("--y", default="avg_cost")
    p.add_argument("--title", default=None)
    p.add_argument("--out", required=True)
    try:
        args = p.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        render(args.infile, args.x, args.series, args.out,
               fit_path=args.fit, y_col=args.y, title=args.title)
    except (RenderError, FileNotFoundError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
