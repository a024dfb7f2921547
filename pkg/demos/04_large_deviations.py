#!/usr/bin/env python3
"""Large-deviation scan of the energy-increment tails.

For the isotropic sanity model (two-dimensional OU with unit eigenvalues)
the probability of Q_t falling in t*(a, b) with 0 < a < b decays like
exp(-t * a / lambda_max).  The scan estimates (1/t) log P(Q_t in t*O) on a
time schedule with Wilson error bars and compares against the rate
function; a window containing 0 gives a flat zero curve.
"""

import math

import numpy as np

from harmonicq import build_model, ldp_scan

model = build_model(-np.eye(2), math.sqrt(2.0) * np.eye(2))
observable = 0.5 * np.eye(2)

print("window O = (1, 2), count = 2e6 per time point")
scan = ldp_scan(model, observable, (1.0, 2.0), [2.0, 4.0, 6.0, 8.0], 2_000_000, seed=5)
print(f"theoretical limit: {scan.theoretical:+.4f}")
print(f"{'t':>5} {'hits':>8} {'estimate':>10} {'wilson lo':>10} {'wilson hi':>10}")
for t, hits, est, lo, hi in zip(
    scan.t_list, scan.hits, scan.estimates, scan.lower, scan.upper
):
    print(f"{t:5.1f} {hits:8d} {est:10.4f} {lo:10.4f} {hi:10.4f}")
print("the residual gap closes like log-corrections/t as t grows")

print("\nwindow O = (-1, 1) containing 0: estimates must tend to 0")
flat = ldp_scan(model, observable, (-1.0, 1.0), [2.0, 4.0, 8.0], 200_000, seed=6)
for t, est in zip(flat.t_list, flat.estimates):
    print(f"  t = {t:4.1f}: (1/t) log P = {est:+.5f}")
