"""Command-line interface: ``regensim <command> --config FILE ...``.

Commands
--------
sample    perfect window samples as JSON lines or CSV
rho       table of beta_m, f_m and rho_m
bounds    regeneration-depth and impatience bounds
renewal   regeneration times inside a window
dary      trajectory of the D-ary point process

Exit codes: 0 success, 2 configuration error, 3 aborted run, 4 regime
violation. The seed defaults to the config's ``seed``, then to the
``REGENSIM_SEED`` environment variable, then to 0.

Replicate ``r`` of ``sample`` is driven by the field with seed
``SeedSequence(master, spawn_key=(r,)).generate_state(1, uint64)[0]``,
so any replicate can be rerun on its own.
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .config import load_config, dump_config
from .core import UniformField
from .engine import renewal_scan, sample_window
from .errors import Aborted, BoundVacuous, ConfigError, RegenSimError
from .house_of_cards import (
    impatience_bound,
    loss_of_memory_bound,
    regime_report,
    rho_table,
    tau_tail_bound,
)
from .models import DaryState, dary_step

__all__ = ["main", "replicate_seed", "SEED_ENV"]

SEED_ENV = "REGENSIM_SEED"
EXIT_OK, EXIT_CONFIG, EXIT_ABORTED, EXIT_REGIME = 0, 2, 3, 4

SAMPLE_CSV_COLUMNS = ("replicate", "seed", "s", "t", "tau", "uniforms_used", "aborted", "symbols")


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def replicate_seed(master, index):
    """Seed of replicate ``index`` under master seed ``master``."""
    seq = np.random.SeedSequence(int(master), spawn_key=(int(index),))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _resolve_seed(args, cfg):
    if getattr(args, "seed", None) is not None:
        return args.seed
    if cfg.seed is not None:
        return cfg.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from exc
    return 0


def _check_regime(cfg, force, needed=None):
    """Refuse to run when the regime assertion does not license the command."""
    report = regime_report(cfg.schedule_object(), 1000, cfg.regime)
    ok = cfg.regime != "unasserted" if needed is None else cfg.regime == needed
    if cfg.regime != "unasserted" and report.classification not in (cfg.regime, "inconclusive"):
        print(
            f"warning: declared regime {cfg.regime} but the first 1000 thresholds "
            f"look {report.classification}",
            file=sys.stderr,
        )
    if ok or force:
        return
    print(
        f"regime report: sum beta_m up to m=1000 is {report.sum_beta:.6g}, "
        f"beta_1000 = {report.beta_kmax:.6g}, looks {report.classification}",
        file=sys.stderr,
    )
    want = needed or "sum-beta-diverges or beta-positive"
    raise _Exit(EXIT_REGIME, f"regime {cfg.regime!r} does not allow this command (need {want}); "
                             "pass --force to run anyway")


def _fmt(x):
    return repr(float(x))


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- commands -----------------------------------------------------------------


def cmd_sample(args, cfg):
    if args.start > args.end:
        raise ConfigError("--from must not exceed --to")
    if args.count < 1:
        raise ConfigError("--count must be >= 1")
    _check_regime(cfg, args.force)
    kernel, schedule = cfg.kernel(), cfg.schedule_object()
    master = _resolve_seed(args, cfg)
    records = []
    for r in range(args.count):
        seed = replicate_seed(master, r)
        try:
            sample = sample_window(args.start, args.end, UniformField(seed), kernel, schedule,
                                   cfg.max_depth)
            rec = {"replicate": r, "seed": seed, "window": [args.start, args.end],
                   "symbols": list(sample.symbols), "tau": sample.tau,
                   "uniforms_used": sample.record.uniforms_consumed, "aborted": False}
        except Aborted:
            rec = {"replicate": r, "seed": seed, "window": [args.start, args.end],
                   "symbols": None, "tau": None, "uniforms_used": None, "aborted": True}
        records.append(rec)
    if cfg.format == "jsonl":
        text = "".join(json.dumps(rec) + "\n" for rec in records)
    else:
        rows = [
            [rec["replicate"], rec["seed"], rec["window"][0], rec["window"][1],
             "" if rec["tau"] is None else rec["tau"],
             "" if rec["uniforms_used"] is None else rec["uniforms_used"],
             int(rec["aborted"]),
             "" if rec["symbols"] is None else " ".join(str(g) for g in rec["symbols"])]
            for rec in records
        ]
        text = _csv_text(SAMPLE_CSV_COLUMNS, rows)
    aborted = sum(rec["aborted"] for rec in records)
    if aborted:
        print(f"{aborted} of {len(records)} replicates aborted at depth {cfg.max_depth}",
              file=sys.stderr)
    code = EXIT_ABORTED if aborted == len(records) else EXIT_OK
    return text, code


def cmd_rho(args, cfg):
    if args.max_m < 1:
        raise ConfigError("--max-m must be >= 1")
    table = rho_table(cfg.schedule_object(), args.max_m)
    rows = [
        [m, _fmt(table.beta[m]), _fmt(table.first_return[m]), _fmt(table.rho[m])]
        for m in range(args.max_m + 1)
    ]
    return _csv_text(("m", "beta_m", "f_m", "rho_m"), rows), EXIT_OK


def cmd_bounds(args, cfg):
    if args.window_len < 1 or args.m < 0:
        raise ConfigError("need --window-len >= 1 and --m >= 0")
    schedule = cfg.schedule_object()
    s, t = 0, args.window_len - 1
    table = rho_table(schedule, max(1, args.m + args.window_len - 1))
    tail = tau_tail_bound(schedule, s, t, args.m, table)
    try:
        imp = impatience_bound(schedule, s, t, args.m, table)
    except BoundVacuous:
        imp = float("inf")
    loss = loss_of_memory_bound(schedule, s - args.m, s, t, 1.0, table)
    rows = [["tail_bound", _fmt(tail)], ["impatience_bound", _fmt(imp)],
            ["loss_of_memory_bound", _fmt(loss)]]
    return _csv_text(("bound", "value"), rows), EXIT_OK


def cmd_renewal(args, cfg):
    if args.start > args.end:
        raise ConfigError("--from must not exceed --to")
    _check_regime(cfg, args.force, needed="beta-positive")
    field = UniformField(_resolve_seed(args, cfg))
    report = renewal_scan(args.start, args.end, field, cfg.schedule_object())
    rows = [[int(j), int(c)] for j, c in zip(report.times, report.censored)]
    return _csv_text(("time", "censored"), rows), EXIT_OK


def cmd_dary(args, cfg):
    model = cfg.model
    if model is None or model["kind"] != "dary":
        raise ConfigError("dary needs a model block of kind 'dary'")
    base = model["base"]
    res = model["resolution"] if args.resolution is None else args.resolution
    if res < 0 or args.steps < 1:
        raise ConfigError("need --resolution >= 0 and --steps >= 1")
    _check_regime(cfg, args.force)
    field = UniformField(_resolve_seed(args, cfg))
    sample = sample_window(1 - res, args.steps, field, cfg.kernel(), cfg.schedule_object(),
                           cfg.max_depth)
    digits = sample.symbols
    state = DaryState(base, res, tuple(reversed(digits[:res])))
    rows = []
    for step, g in enumerate(digits[res:], start=1):
        state = dary_step(state, g)
        rows.append([step, _fmt(state.left), int(g)])
    return _csv_text(("step", "left", "digit"), rows), EXIT_OK


# -- argument parsing --------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="regensim", description="Perfect simulation of chains with complete connections."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--dump-config", action="store_true",
                       help="print the effective configuration and exit")
        p.set_defaults(func=func)
        return p

    p = add("sample", cmd_sample, "sample windows")
    p.add_argument("--from", dest="start", type=int, required=True)
    p.add_argument("--to", dest="end", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--format", choices=("jsonl", "csv"))
    p.add_argument("--force", action="store_true", help="run under an unasserted regime")

    p = add("rho", cmd_rho, "return probabilities of the house-of-cards chain")
    p.add_argument("--max-m", type=int, required=True)

    p = add("bounds", cmd_bounds, "regeneration-depth and impatience bounds")
    p.add_argument("--window-len", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = add("renewal", cmd_renewal, "regeneration times inside a window")
    p.add_argument("--from", dest="start", type=int, required=True)
    p.add_argument("--to", dest="end", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--force", action="store_true")

    p = add("dary", cmd_dary, "D-ary interval trajectory")
    p.add_argument("--resolution", type=int)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--force", action="store_true")
    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = cfg.with_overrides(
            seed=getattr(args, "seed", None),
            max_depth=getattr(args, "max_depth", None),
            format=getattr(args, "format", None),
        )
        if args.dump_config:
            text, code = dump_config(cfg), EXIT_OK
        else:
            text, code = args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _Exit as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except Aborted as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORTED
    except RegenSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code
