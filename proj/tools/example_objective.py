#!/usr/bin/env python3
"""Example external objective for `adabo run`.

Protocol: one JSON object per line on stdin, mapping dimension names to
values (integer dimensions arrive without a decimal point); one JSON object
on stdout, {"objective": <number>}. A nonzero exit, a timeout, or any other
reply shape marks the trial failed.

This stand-in scores a smooth surface shaped like a gradient-boosting
tuning problem (higher is better, pair it with "maximize": true). To tune a
real model, replace score() with an actual evaluation, e.g. cross-validated
lightgbm AUC on your dataset, and keep the read/print lines as they are.
"""

import json
import math
import sys


def score(p):
    auc = 0.5
    auc += 0.18 * math.exp(-math.log(p["num_leaves"] / 31.0) ** 2 / 0.8)
    auc += 0.10 * math.exp(-math.log(p["min_child_samples"] / 20.0) ** 2 / 1.2)
    auc += 0.12 * math.exp(-math.log(p["n_estimators"] / 64.0) ** 2 / 1.0)
    auc += 0.05 * math.exp(-((p["subsample"] - 0.8) ** 2) / 0.05)
    auc += 0.05 * math.exp(-((p["colsample"] - 0.7) ** 2) / 0.05)
    return auc


def main():
    params = json.loads(sys.stdin.readline())
    print(json.dumps({"objective": score(params)}))


if __name__ == "__main__":
    main()
