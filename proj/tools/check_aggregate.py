#!/usr/bin/env python3
"""Recompute an experiment's aggregate CSV from its trial CSV and compare.

usage: check_aggregate.py PREFIX    (reads PREFIX.trials.csv and PREFIX.aggregate.csv)

Standard library only, so it shares no code with the C++ aggregation.
"""

import csv
import math
import statistics
import sys
from collections import OrderedDict


def interp_median(values, width):
    ordered = sorted(values)
    n = len(ordered)
    if n % 2 == 0 and ordered[n // 2 - 1] != ordered[n // 2]:
        # No sample sits on the median; the plain median is reported.
        return statistics.median(ordered)
    return statistics.median_grouped(ordered, width)


def quartiles(values):
    if len(values) == 1:
        return values[0], values[0]
    q = statistics.quantiles(values, n=4, method="inclusive")
    return q[0], q[2]


def expected_rows(trials):
    metrics = ["ur_error", "wer_error", "kendall_norm"]
    metrics += [c for c in trials[0].keys() if c.startswith("top") and c[3:].isdigit()]
    metrics += ["iters"]
    groups = OrderedDict()
    for row in trials:
        groups.setdefault((row["D"], row["P"], row["method"]), []).append(row)
    out = OrderedDict()
    for (d, p, method), rows in groups.items():
        for metric in metrics:
            v = [float(r[metric]) for r in rows]
            med = statistics.median(v)
            im = interp_median(v, 1.0 / int(metric[3:])) if metric.startswith("top") else med
            q25, q75 = quartiles(v)
            out[(d, p, method, metric)] = {"n": len(v), "median": med, "interp_median": im, "q25": q25, "q75": q75}
    return out


def close(a, b):
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)


def main(prefix):
    with open(prefix + ".trials.csv", newline="") as f:
        trials = list(csv.DictReader(f))
    with open(prefix + ".aggregate.csv", newline="") as f:
        agg = list(csv.DictReader(f))
    if not trials:
        print("no trial rows")
        return 1

    want = expected_rows(trials)
    got = OrderedDict(((r["D"], r["P"], r["method"], r["metric"]), r) for r in agg)
    errors = []
    if list(want.keys()) != list(got.keys()):
        errors.append("row keys differ: expected %d rows, found %d" % (len(want), len(got)))
    for key, w in want.items():
        g = got.get(key)
        if g is None:
            continue
        if int(g["n"]) != w["n"]:
            errors.append("%s: n %s != %d" % (key, g["n"], w["n"]))
        for field in ("median", "interp_median", "q25", "q75"):
            if not close(float(g[field]), w[field]):
                errors.append("%s: %s %s != %r" % (key, field, g[field], w[field]))
    for e in errors[:20]:
        print(e)
    print("%d aggregate rows checked, %d mismatches" % (len(want), len(errors)))
    return 1 if errors else 0


if __name__ == "__main__":
    if len(sys.argv) != 2:
        print(__doc__.strip())
        sys.exit(2)
    sys.exit(main(sys.argv[1]))
