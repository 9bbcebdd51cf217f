"""Command-line entry point: ``amroc run|sweep|calibrate|bler-ref|summarize``."""
import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

from .harness.calibrate import calibrate_frontend, uncalibrated_link
from .harness.config import ConfigError, build_experiment, overrides_from_args, parse_config, parse_values
from .harness.presets import DESK_SUBFRAMES, FULL_SUBFRAMES, PRESETS
from .harness.summary import summarize
from .harness.sweep import rows_to_csv, run_sweep_rows
from .link.abstraction import StaleTableError, build_tables, default_table_path, load_tables, run_link_abstracted, save_tables
from .link.config import ABSTRACTED, EXPLICIT
from .link.explicit import run_link_explicit

log = logging.getLogger("amroc")


def _experiment(args):
    text = Path(args.config).read_text() if args.config else ""
    exp = parse_config(text, args.config or "<defaults>")
    extra = overrides_from_args(getattr(args, "set", None))
    if extra:
        values = dict(exp.values)
        values.update(parse_values(extra, "<--set>"))
        exp = build_experiment(values)
    if getattr(args, "seeds", None):
        exp = replace(exp, sweep=replace(exp.sweep, seeds=tuple(int(s) for s in args.seeds.split(","))))
    return exp


def _n_subframes(args, default):
    if getattr(args, "full", False):
        return FULL_SUBFRAMES
    return args.n_subframes or default


def cmd_run(args):
    exp = _experiment(args)
    link = exp.link
    changes = {"n_subframes": _n_subframes(args, link.n_subframes)}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.mode:
        changes["mode"] = args.mode
    link = replace(link, **changes)
    result = run_link_explicit(link) if link.mode == EXPLICIT else run_link_abstracted(link)
    text = json.dumps(asdict(result), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _check_writable(path):
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OSError(f"directory {parent} does not exist or is not writable")


def cmd_sweep(args):
    exp = _experiment(args)
    if args.out:
        try:
            _check_writable(args.out)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
    if args.seed is not None and not args.seeds:
        exp = replace(exp, sweep=replace(exp.sweep, seeds=(args.seed,)))
    preset = args.preset or exp.sweep.preset
    rows = run_sweep_rows(preset, exp, n_subframes=_n_subframes(args, DESK_SUBFRAMES),
                          mode=args.mode, workers=args.workers)
    text = rows_to_csv(rows)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    report, checks = summarize(text)
    print(report, file=sys.stderr if not args.out else sys.stdout)
    return 0 if all(c.passed for c in checks) else 1


def cmd_summarize(args):
    report, checks = summarize(Path(args.csv).read_text())
    print(report)
    return 0 if all(c.passed for c in checks) else 1


def cmd_bler_ref(args):
    mcs_list = [int(m) for m in args.mcs.split(",")] if args.mcs else list(range(18))
    out = Path(args.out) if args.out else default_table_path()
    tables = {}
    if out.exists() and args.mcs:
        try:
            tables = load_tables(out)
        except StaleTableError:
            tables = {}
    tables.update(build_tables(mcs_list, n_blocks=args.n_blocks, seed=args.seed or 0,
                               n_realizations=args.realizations, realization_blocks=args.realization_blocks,
                               log=print))
    save_tables(tables, out)
    print(f"wrote {out}")
    return 0


def cmd_calibrate(args):
    exp = _experiment(args)
    tables = load_tables(default_table_path())
    result = calibrate_frontend(uncalibrated_link(exp.link), tables)
    text = result.config_text()
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return 0 if all(ok for _, ok in result.satisfied) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="amroc", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="experiment config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output path")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override")

    sp = sub.add_parser("run", help="simulate one link point")
    common(sp)
    sp.add_argument("--mode", choices=(EXPLICIT, ABSTRACTED))
    sp.add_argument("--n-subframes", type=int)
    sp.add_argument("--full", action="store_true", help=f"{FULL_SUBFRAMES} subframes")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run a preset or custom sweep")
    common(sp)
    sp.add_argument("--preset", choices=sorted(PRESETS) + ["custom"])
    sp.add_argument("--seeds", help="comma-separated seeds")
    sp.add_argument("--mode", choices=(EXPLICIT, ABSTRACTED))
    sp.add_argument("--n-subframes", type=int)
    sp.add_argument("--full", action="store_true", help=f"{FULL_SUBFRAMES} subframes per point")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("calibrate", help="fit the calibrated converter loss (writes data/calibrated.cfg with --out)")
    common(sp)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("bler-ref", help="build AWGN reference tables and EESM betas")
    sp.add_argument("--out")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--mcs", help="comma-separated MCS subset (merged into an existing file)")
    sp.add_argument("--n-blocks", type=int, default=1000)
    sp.add_argument("--realizations", type=int, default=120)
    sp.add_argument("--realization-blocks", type=int, default=200)
    sp.set_defaults(func=cmd_bler_ref)

    sp = sub.add_parser("summarize", help="trend report for a sweep CSV")
    sp.add_argument("csv")
    sp.set_defaults(func=cmd_summarize)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, StaleTableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
