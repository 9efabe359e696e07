"""``mmwsim`` command line: simulate, sweep, trace, validate."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import dump_config, load_config, load_grid, parse_config
from .engine import ScenarioGrid, drop_seed
from .exceptions import MmwsimError
from .schedulers import POLICIES

log = logging.getLogger("mmwsim")

SUMMARY_COLUMNS = (
    "policy",
    "lambda_b",
    "tau_b",
    "n_t",
    "sigma",
    "p1_rate_bps",
    "mean_rate_bps",
    "jain_mean",
    "jain_pooled",
    "drops",
    "seed",
)


def _num(x):
    return "" if x is None else repr(float(x))


def summary_row(point, report, seed):
    return {
        "policy": point.policy,
        "lambda_b": _num(point.arrival_rate),
        "tau_b": _num(point.mean_duration),
        "n_t": _num(point.window_ms),
        "sigma": _num(point.sigma),
        "p1_rate_bps": _num(report.p1_rate),
        "mean_rate_bps": _num(report.mean_rate),
        "jain_mean": _num(report.jain_mean),
        "jain_pooled": _num(report.jain_pooled),
        "drops": str(report.drops),
        "seed": str(seed),
    }


def emit_results(results, fmt, out_dir, seed):
    """Write one ECDF file per scenario point plus a summary table.

    Returns the list of written paths.
    """
    if fmt not in ("csv", "json"):
        raise MmwsimError(f"unknown format {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    rows = []
    for point, report in results:
        path = out_dir / f"ecdf_{point.policy}_{point.tag}.{fmt}"
        pairs = list(zip(report.ecdf_values.tolist(), report.ecdf_probs.tolist()))
        if fmt == "csv":
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["rate_bps", "cum_prob"])
                writer.writerows((repr(v), repr(p)) for v, p in pairs)
        else:
            path.write_text(json.dumps([{"rate_bps": v, "cum_prob": p} for v, p in pairs]) + "\n")
        written.append(path)
        rows.append(summary_row(point, report, seed))
    summary = out_dir / f"summary.{fmt}"
    if fmt == "csv":
        with summary.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    else:
        summary.write_text(json.dumps(rows, indent=1) + "\n")
    written.append(summary)
    return written


def write_manifest(out_dir, config, grid, seed, files, runtime):
    manifest = {
        "tool": "mmwsim",
        "version": __version__,
        "master_seed": seed,
        "config": dump_config(config, grid),
        "outputs": [str(Path(f).name) for f in files],
        "runtime_s": runtime,
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1) + "\n")
    return path


def _effective_config(args):
    config, grid = parse_config("", "table1")
    if args.config:
        config, grid = load_config(args.config), load_grid(args.config)
    seed = args.seed
    if seed is None and os.environ.get("MMWSIM_SEED"):
        try:
            seed = int(os.environ["MMWSIM_SEED"])
        except ValueError:
            raise MmwsimError("MMWSIM_SEED must be an integer") from None
    overrides = {}
    if seed is not None:
        overrides["master_seed"] = seed
    if args.drops is not None:
        overrides["drops"] = args.drops
    if getattr(args, "policy", None):
        overrides["policy"] = args.policy
    return replace(config, **overrides), grid


def _cmd_simulate(args, config, grid):
    grid = ScenarioGrid(
        (config.blockage.arrival_rate,),
        (config.blockage.mean_duration,),
        (config.prediction.window_ms,),
        (config.policy,),
    )
    return _campaign(args, config, grid)


def _cmd_sweep(args, config, grid):
    if grid is None:
        grid = ScenarioGrid(
            (config.blockage.arrival_rate,),
            (config.blockage.mean_duration,),
            (config.prediction.window_ms,),
            POLICIES,
        )
    if args.policy:
        grid = replace(grid, policies=(args.policy,))
    return _campaign(args, config, grid)


def _campaign(args, config, grid):
    from .engine import run_campaign

    start = time.perf_counter()
    results = run_campaign(config, grid, threads=args.threads)
    files = emit_results(results, args.format, args.out, config.master_seed)
    manifest = write_manifest(
        args.out, config, grid, config.master_seed, files, time.perf_counter() - start
    )
    for point, report in results:
        log.info(
            "%s %s: p1=%.4g bps mean=%.4g bps jain=%.4f",
            point.policy, point.tag, report.p1_rate, report.mean_rate, report.jain_mean,
        )
    log.info("wrote %d files and %s", len(files), manifest)
    return 0


def _cmd_trace(args, config, grid):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    from .blockage import generate_trace
    from .engine import BLOCKAGE, substream

    seed = drop_seed(config.master_seed, 0)
    files = []
    for u in range(config.n_ues):
        trace = generate_trace(
            config.blockage, config.horizon, config.slot_duration_ms, substream(seed, BLOCKAGE, u)
        )
        files.append(trace.to_csv(out / f"trace_ue{u}.csv"))
    log.info("wrote %d traces to %s", len(files), out)
    return 0


def _cmd_validate(args, config, grid):
    from .validation import run_checks

    failed = 0
    for name, ok, detail in run_checks():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "trace": _cmd_trace,
    "validate": _cmd_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="mmwsim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mmwsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="config file or preset name (table1)")
        p.add_argument("--seed", type=int, help="master seed (falls back to $MMWSIM_SEED)")
        p.add_argument("--drops", type=int)
        p.add_argument("--out", default="results")
        p.add_argument("--policy", choices=POLICIES)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def run(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        config, grid = _effective_config(args)
        return COMMANDS[args.command](args, config, grid)
    except (MmwsimError, OSError) as exc:
        print(f"mmwsim: error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
