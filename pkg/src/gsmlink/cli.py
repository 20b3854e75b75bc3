"""Command line interface: simulate, bound, complexity, and rate reports."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from . import analysis, report
from .engine import COHERENT_SCHEMES, SCHEMES, SystemConfig, run_sweep

__all__ = ["main", "parse_snr_range", "parse_modulation"]


def parse_snr_range(text: str) -> list:
    """Parse 'start:step:stop' (inclusive), a comma list, or a single value."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"field 'snr': expected start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"field 'snr': need step > 0 and stop >= start, got {text!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    if "," in text:
        return [float(p) for p in text.split(",") if p.strip()]
    return [float(text)]


def parse_modulation(text: str) -> tuple:
    """Parse a modulation name like bpsk, qpsk, 8psk, or 16qam."""
    name = text.strip().lower()
    if name == "bpsk":
        return "psk", 2
    if name == "qpsk":
        return "psk", 4
    for kind in ("psk", "qam"):
        if name.endswith(kind) and name[:-len(kind)].isdigit():
            return kind, int(name[:-len(kind)])
    raise ValueError(f"field 'mod': cannot parse modulation {text!r}")


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", required=True, choices=SCHEMES)
    p.add_argument("--mt", type=int, required=True)
    p.add_argument("--mr", type=int, required=True)
    p.add_argument("--mu", type=int, default=None,
                   help="active antennas (default: 1 for gdsm, else 2)")
    p.add_argument("--mod", required=True, help="bpsk, qpsk, 8psk, 16qam, ...")
    p.add_argument("--k", type=int, default=100,
                   help="information symbols per frame")
    p.add_argument("--power-allocation", action="store_true",
                   help="boost reference slots, de-boost normal slots")
    p.add_argument("--split-mu-power", action="store_true",
                   help="scale active-antenna symbols by 1/sqrt(mu)")
    p.add_argument("--csi", choices=["differential", "perfect", "ls"], default=None,
                   help="channel knowledge (default: differential, or ls for gsm1/gsm2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snr", required=True, help="start:step:stop in dB")


def _add_output_args(p: argparse.ArgumentParser, plot: bool = True) -> None:
    p.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    if plot:
        p.add_argument("--plot", default=None, metavar="PNG",
                       help="also render the curves to this image file")


def _config_from_args(args) -> SystemConfig:
    mod_kind, mod_order = parse_modulation(args.mod)
    mu = args.mu
    if mu is None:
        mu = 1 if args.scheme == "gdsm" else 2
    csi = args.csi
    if csi is None:
        csi = "ls" if args.scheme in COHERENT_SCHEMES else "differential"
    return SystemConfig(
        scheme=args.scheme, mt=args.mt, mr=args.mr, mu=mu,
        mod_kind=mod_kind, mod_order=mod_order, k=args.k,
        power_allocation=args.power_allocation,
        split_mu_power=args.split_mu_power,
        csi=csi, seed=args.seed,
    ).validate()


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    snr = parse_snr_range(args.snr)
    points = run_sweep(cfg, snr, min_errors=args.min_errors,
                       max_frames=args.max_frames, workers=args.workers,
                       noise_free=args.noise_free)
    meta = report.config_meta(cfg, snr=args.snr, min_errors=args.min_errors,
                              max_frames=args.max_frames)
    rows = report.ber_rows(points)
    text = (report.format_json(meta, rows) if args.format == "json"
            else report.format_csv(meta, report.BER_HEADER, rows))
    _emit(text, args.output)
    if args.plot:
        series = [{"label": cfg.scheme, "snr": snr, "values": [p.ber for p in points]}]
        if points[0].bound is not None:
            series.append({"label": f"{cfg.scheme} bound", "is_bound": True,
                           "snr": snr, "values": [p.bound for p in points]})
        report.render_ber_figure(series, args.plot,
                                 title=f"{cfg.scheme} {cfg.mt}x{cfg.mr} {args.mod}")
    return 0


def _cmd_bound(args) -> int:
    cfg = _config_from_args(args)
    snr = parse_snr_range(args.snr)
    values = [analysis.abep_bound(cfg, s) for s in snr]
    meta = report.config_meta(cfg, snr=args.snr)
    rows = [{"snr_db": s, "abep_bound": v} for s, v in zip(snr, values)]
    text = (report.format_json(meta, rows) if args.format == "json"
            else report.format_csv(meta, ["snr_db", "abep_bound"], rows))
    _emit(text, args.output)
    if args.plot:
        report.render_ber_figure(
            [{"label": f"{cfg.scheme} bound", "is_bound": True,
              "snr": snr, "values": values}],
            args.plot, title=f"{cfg.scheme} {cfg.mt}x{cfg.mr} {args.mod} bound")
    return 0


def _cmd_complexity(args) -> int:
    rows = analysis.complexity_table(args.table)
    header = list(rows[0].keys())
    meta = {"table": analysis.COMPLEXITY_TABLE_IDS[str(args.table)]}
    text = (report.format_json(meta, rows) if args.format == "json"
            else report.format_csv(meta, header, rows))
    _emit(text, args.output)
    return 0


def _cmd_rate(args) -> int:
    rows = analysis.throughput_table(args.table)
    header = list(rows[0].keys())
    meta = {"table": analysis.THROUGHPUT_TABLE_IDS[str(args.table)]}
    text = (report.format_json(meta, rows) if args.format == "json"
            else report.format_csv(meta, header, rows))
    _emit(text, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsmlink",
        description="Differential generalized spatial modulation link toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="Monte Carlo BER sweep")
    _add_config_args(p_sim)
    p_sim.add_argument("--min-errors", type=int, default=200)
    p_sim.add_argument("--max-frames", type=int, default=200000)
    p_sim.add_argument("--workers", type=int, default=1,
                       help="parallel workers (capped by GSMLINK_MAX_WORKERS)")
    p_sim.add_argument("--noise-free", action="store_true",
                       help="disable noise (round-trip debugging)")
    _add_output_args(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_bound = sub.add_parser("bound", help="analytical BER union bound")
    _add_config_args(p_bound)
    _add_output_args(p_bound)
    p_bound.set_defaults(func=_cmd_bound)

    p_cx = sub.add_parser("complexity", help="detection flop comparison presets")
    p_cx.add_argument("--table", required=True,
                      help="4 (dgsm-vs-gsm1), 5 (dmgsm-vs-gsm2), 6 (dmgsm-vs-gdsm)")
    _add_output_args(p_cx, plot=False)
    p_cx.set_defaults(func=_cmd_complexity)

    p_rate = sub.add_parser("rate", help="throughput comparison presets")
    p_rate.add_argument("--table", required=True,
                        help="8 (coherent-vs-proposed), 9 (gdsm-vs-proposed)")
    _add_output_args(p_rate, plot=False)
    p_rate.set_defaults(func=_cmd_rate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
