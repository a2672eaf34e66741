"""Command-line entry point; every subcommand writes CSV (or a frozen-set file)."""
from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import complexity
from .boundary_opt import boundaries_for_scheme, practical_bit_mi
from .flash_channel import NAND_MEANS, NAND_SIGMA_MULTIPLIERS, FlashModel, WearState
from .llr_engine import quantized_llr_table
from .mapping import RegionErrorProfile, count_changes, enumerate_schemes, expected_raw_bit_errors, is_gray, scheme_by_name
from .polar import construct, save_frozen_set
from .precheck import PrecheckThresholds, selection_table
from .simulator import load_config, run_sweep


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _writer(path):
    fh = open(path, "w", newline="") if path and path != "-" else sys.stdout
    return fh, csv.writer(fh, lineterminator="\n")


def _model(args, sigma):
    return FlashModel.nand_mlc(sigma, tuple(_floats(args.means)), tuple(_floats(args.multipliers)))


def _add_model_args(p):
    p.add_argument("--means", default=",".join(str(m) for m in NAND_MEANS))
    p.add_argument("--multipliers", default=",".join(str(m) for m in NAND_SIGMA_MULTIPLIERS))
    p.add_argument("--mapping", default="gray", help="gray, direct, or a letter string such as ABCD")


def cmd_simulate(args):
    cfg = load_config(args.config, args.set or ())
    result = run_sweep(cfg, workers=args.workers)
    text = result.to_csv(timing=args.timing)
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = [p for p in result.points if p.error]
    return 1 if failed else 0


def cmd_boundaries(args):
    mapping = scheme_by_name(args.mapping)
    schemes = [("smmi", None), ("hard", None)] + [("ratio", r) for r in _floats(args.ratios)]
    fh, w = _writer(args.out)
    w.writerow(["sigma", "scheme", "ratio", "n_refs", "references", "mi_msb", "mi_lsb"])
    for sigma in _floats(args.sigmas):
        model = _model(args, sigma)
        for name, ratio in schemes:
            b = boundaries_for_scheme(name, model, mapping, ratio if ratio else 2.0)
            mi = practical_bit_mi(b, model, mapping)
            refs = " ".join(f"{r:.6f}" for r in b.references)
            w.writerow([sigma, name, "" if ratio is None else ratio, len(b.references), refs,
                        f"{mi['msb']:.10f}", f"{mi['lsb']:.10f}"])
    if args.llr_table:
        model = _model(args, _floats(args.sigmas)[0])
        table = quantized_llr_table(boundaries_for_scheme("smmi", model, mapping), model, mapping)
        with open(args.llr_table, "w") as t:
            t.write(table.to_csv())
    if fh is not sys.stdout:
        fh.close()
    return 0


def cmd_complexity(args):
    fh, w = _writer(args.out)
    w.writerow(["decoder", "additions", "xors", "per_iteration"])
    for op in complexity.comparison_table(args.n, args.k, args.dv, args.dc, args.iters):
        w.writerow([op.label, op.additions, op.xors, "" if op.per_iteration is None else op.per_iteration])
    return 0


def cmd_mapping(args):
    profile = RegionErrorProfile(*_floats(args.profile))
    fh, w = _writer(args.out)
    w.writerow(["scheme", "bits", "changes", "gray", "alpha", "beta", "gamma", "expected_bit_errors"])
    for scheme, changes in enumerate_schemes():
        a, b, g = scheme.region_distances()
        bits = " ".join(f"{m}{l}" for m, l in scheme.bit_table)
        w.writerow([scheme.name, bits, changes, int(is_gray(scheme)), a, b, g,
                    repr(expected_raw_bit_errors(scheme, profile))])
    return 0


def cmd_precheck(args):
    model = _model(args, args.sigma)
    thr = PrecheckThresholds(args.t_binary, args.t_quantized)
    cycles = np.arange(0, args.max_cycles + 1, args.step)
    fh, w = _writer(args.out)
    w.writerow(["pe_cycles", "sigma_factor", "raw_error_prob", "decoder"])
    for c, factor, p, kind in selection_table(model, thr, cycles, args.decay):
        w.writerow([c, f"{factor:.6f}", repr(p), kind.short])
    return 0


def cmd_construct(args):
    model = _model(args, args.design_sigma)
    code = construct(args.n, args.k, model, scheme_by_name(args.mapping), trials=args.trials, seed=args.seed)
    save_frozen_set(args.out, code)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polarflash", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="FER/BER sweep to CSV")
    p.add_argument("--config", help="key = value file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="append a wall_time column")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("boundaries", help="reference voltages and per-bit MI")
    p.add_argument("--sigmas", default="0.2,0.25,0.3")
    p.add_argument("--ratios", default="2,4,8")
    p.add_argument("--llr-table", help="also write the SMMI LLR table for the first sigma")
    p.add_argument("--out", default="-")
    _add_model_args(p)
    p.set_defaults(func=cmd_boundaries)

    p = sub.add_parser("complexity", help="operation-count table")
    p.add_argument("--n", type=int, default=8192)
    p.add_argument("--k", type=int, default=7372)
    p.add_argument("--dv", type=int, default=4)
    p.add_argument("--dc", type=int, default=30)
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("mapping-analysis", help="all 24 bit-to-state maps")
    p.add_argument("--profile", default="0.01,0.02,0.01", help="error probabilities of the three regions")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_mapping)

    p = sub.add_parser("precheck-demo", help="decoder selection over P/E cycles")
    p.add_argument("--sigma", type=float, default=0.22)
    p.add_argument("--max-cycles", type=int, default=20000)
    p.add_argument("--step", type=int, default=1000)
    p.add_argument("--decay", type=float, default=0.13, help="dB per 1000 cycles")
    p.add_argument("--t-binary", type=float, default=PrecheckThresholds.t_binary_max)
    p.add_argument("--t-quantized", type=float, default=PrecheckThresholds.t_quantized_max)
    p.add_argument("--out", default="-")
    _add_model_args(p)
    p.set_defaults(func=cmd_precheck)

    p = sub.add_parser("construct", help="Monte Carlo frozen-set construction")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--k", type=int, default=896)
    p.add_argument("--design-sigma", type=float, default=0.26)
    p.add_argument("--trials", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_model_args(p)
    p.set_defaults(func=cmd_construct)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
