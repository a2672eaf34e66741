#!/usr/bin/env python3
"""Suggest pre-check thresholds from a FER sweep.

For the binary-input and quantized-soft decoders, the threshold is the raw
error probability at which the decoder's FER crosses ``--target``,
interpolated linearly in log-log between the two bracketing sweep points.
Reads a CSV written by ``polarflash simulate`` or ``fer_ordering.py``.
"""
import argparse
import csv
import math


def crossing(points, target):
    """Raw error probability where FER first reaches ``target``; None if never bracketed."""
    pts = sorted((float(r["raw_error_prob"]), float(r["fer"])) for r in points)
    for (p0, f0), (p1, f1) in zip(pts, pts[1:]):
        if f0 < target <= f1:
            if f0 <= 0:
                return p0
            t = (math.log(target) - math.log(f0)) / (math.log(f1) - math.log(f0))
            return math.exp(math.log(p0) + t * (math.log(p1) - math.log(p0)))
    return None


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv")
    ap.add_argument("--target", type=float, default=1e-2)
    args = ap.parse_args()
    with open(args.csv) as fh:
        rows = list(csv.DictReader(l for l in fh if not l.startswith("#")))
    for dec, key in (("binary", "t_binary_max"), ("quantized", "t_quantized_max")):
        p = crossing([r for r in rows if r["decoder"] == dec], args.target)
        print(f"{key} = {p:.3g}" if p is not None else f"{key}: FER never crosses {args.target:g} in the sweep")


if __name__ == "__main__":
    main()
