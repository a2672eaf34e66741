#!/usr/bin/env python3
"""FER of the three polar front-ends and the LDPC baseline over a sigma sweep.

Writes the sweep CSV and prints each point with 95% Wilson intervals.

    python scripts/fer_ordering.py --config configs/desk_1024_896.cfg --out fer.csv
"""
import argparse
import logging

from polarflash.simulator import load_config, run_sweep, wilson_interval


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", default="configs/desk_1024_896.cfg")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="fer_ordering.csv")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO)

    cfg = load_config(args.config, args.set)
    res = run_sweep(cfg, workers=args.workers)
    with open(args.out, "w") as fh:
        fh.write(res.to_csv(timing=True))

    print(f"{'sigma':>6} {'P_raw':>9} {'decoder':>10} {'errors':>8} {'frames':>7} {'FER':>9}  95% interval")
    for p in res.points:
        lo, hi = wilson_interval(p.frame_errors, p.frames)
        print(f"{p.sigma:6.3f} {p.raw_error_prob:9.2e} {p.decoder:>10} {p.frame_errors:8d} {p.frames:7d} "
              f"{p.fer:9.2e}  [{lo:.2e}, {hi:.2e}]")


if __name__ == "__main__":
    main()
