"""Command-line front end.

Exit codes: 0 success, 1 numeric or runtime failure, 2 usage or validation
failure. Every command that writes into a directory also writes
``manifest.json`` there.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .config import ConfigError, parse_grid
from .experiments import calibrate_for, run_scenario
from .io import read_f64_matrix
from .metrics import write_summary_tsv
from .mr_estimator import (NullCalibration, calibrate_cm,
                           calibrate_cm_from_matrix, default_alpha_m, estimate_pi)
from .pipeline import screen
from .pvalues import read_pvalues
from .reproduce import reproduce

THREADS_ENV = "SMRSCREEN_THREADS"


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return version("smrscreen")
    except PackageNotFoundError:
        return "unknown"


def write_manifest(out_dir: Path, args, artifacts, started: float, seeds=()):
    manifest = {
        "subcommand": args.command,
        "argv": sys.argv[1:],
        "config": {k: (str(v) if isinstance(v, Path) else v)
                   for k, v in vars(args).items() if k != "func"},
        "seeds": list(seeds),
        "artifacts": sorted(str(a) for a in artifacts),
        "wall_clock_seconds": round(time.time() - started, 3),
        "version": _version(),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


# -- subcommands -------------------------------------------------------------

def cmd_calibrate(args) -> int:
    started = time.time()
    if args.null_matrix:
        mat, _ = read_f64_matrix(args.null_matrix)
        cal = calibrate_cm_from_matrix(mat, args.alpha_m)
    else:
        if args.m is None:
            raise UsageError("calibrate needs --m or --null-matrix")
        cal = calibrate_cm(args.m, args.alpha_m, args.reps, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    cal.save(out)
    write_manifest(out.parent, args, [out.name], started, [args.seed])
    print(f"c_m = {cal.c_m!r} (m={cal.m}, alpha_m={cal.alpha_m:.4f}, reps={cal.n_reps})")
    return 0


def _load_inputs(args):
    try:
        p = read_pvalues(args.pvals)
    except OSError as exc:
        raise UsageError(f"cannot read p-values: {exc}") from None
    cal = None
    if args.cal:
        try:
            cal = NullCalibration.load(args.cal)
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read calibration: {exc}") from None
        if cal.m != p.m:
            raise UsageError(f"m mismatch: calibration m={cal.m}, p-values m={p.m}")
    return p, cal


def cmd_estimate(args) -> int:
    p, cal = _load_inputs(args)
    if cal is None:
        raise UsageError("estimate needs --cal")
    est = estimate_pi(p, cal)
    text = json.dumps({"m": p.m, "c_m": cal.c_m, "pi_hat": est.pi_hat,
                       "s_hat": est.s_hat, "t_star": est.t_star,
                       "objective": est.objective}, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_screen(args) -> int:
    started = time.time()
    p, cal = _load_inputs(args)
    if args.procedure != "bh" and cal is None and args.force_s_hat is None:
        raise UsageError(f"--procedure {args.procedure} needs --cal")
    s_hat = args.force_s_hat
    if s_hat is not None and not 0 <= s_hat < p.m:
        raise UsageError("--force-s-hat must satisfy 0 <= s_hat < m")
    kw = dict(alpha=args.alpha, q=args.q, beta=args.beta, sided=args.sided,
              mode="exact-beta-median" if args.exact_beta_median else "ratio-approximation")
    if s_hat is None and args.procedure != "bh":
        kw["estimate"] = estimate_pi(p, cal)
    res = screen(p, args.procedure, cal, s_hat=s_hat, **kw)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "result.json").write_text(res.to_json() + "\n")
    res.write_tsv(out / "selection.tsv", p)
    write_manifest(out, args, ["result.json", "selection.tsv"], started)
    print(f"{res.procedure}: k_star = {res.k_star} of m = {p.m}")
    return 0


def cmd_simulate(args) -> int:
    started = time.time()
    try:
        raw = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    grid = parse_grid(raw)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, scen_meta = [], {}
    for sid, cfg in grid.scenarios:
        cal = calibrate_for(cfg, grid.cal_reps, grid.cal_source, grid.alpha_m)
        res = run_scenario(cfg, grid.procedures, cal=cal, threads=args.threads)
        for label, summary in res.summary().items():
            rows.append((sid, label, summary))
        scen_meta[sid] = {"config": cfg.to_dict(), "c_m": cal.c_m,
                          "alpha_m": cal.alpha_m, "calibration_source": cal.source}
    write_summary_tsv(out / "summary.tsv", rows)
    (out / "scenarios.json").write_text(json.dumps(scen_meta, indent=2, sort_keys=True) + "\n")
    write_manifest(out, args, ["summary.tsv", "scenarios.json"], started,
                   [raw.get("seed", 0)])
    print(f"{len(grid.scenarios)} scenarios written to {out}")
    return 0


def cmd_reproduce(args) -> int:
    started = time.time()
    reps, passed = reproduce(args.table, args.scale, args.sided, seed=args.seed,
                             threads=args.threads)
    text = "\n\n".join(r.render() for r in reps)
    text += f"\n\noverall: {'PASS' if passed else 'FAIL'} (at least one sidedness mode must pass)"
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"table{args.table}_{args.scale}.txt").write_text(text + "\n")
        write_manifest(out, args, [f"table{args.table}_{args.scale}.txt"], started,
                       [args.seed])
    return 0 if passed else 1


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smrscreen",
                                 description="Signal-missing-rate controlled screening.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate", help="simulate the bounding sequence c_m")
    c.add_argument("--m", type=int)
    c.add_argument("--alpha-m", type=float, default=None,
                   help="tail level (default 1/sqrt(log m))")
    c.add_argument("--reps", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--null-matrix", help="binary B x m null p-value matrix (with .json header)")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_calibrate)

    e = sub.add_parser("estimate", help="estimate the signal proportion")
    e.add_argument("--pvals", required=True)
    e.add_argument("--cal", required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("screen", help="estimate s_hat and apply a cutoff rule")
    s.add_argument("--pvals", required=True)
    s.add_argument("--cal")
    s.add_argument("--procedure", choices=("adsmr", "cvsmr", "bh", "mdr"), default="adsmr")
    s.add_argument("--alpha", type=float, default=0.1, help="cvSMR level")
    s.add_argument("--q", type=float, default=0.5, help="BH level")
    s.add_argument("--beta", type=float, default=None, help="MDR level (default 1/log m)")
    s.add_argument("--sided", choices=("one", "two"), default="one")
    s.add_argument("--exact-beta-median", action="store_true")
    s.add_argument("--force-s-hat", type=int, default=None, help=argparse.SUPPRESS)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_screen)

    m = sub.add_parser("simulate", help="run a simulation grid from a JSON config")
    m.add_argument("--config", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--threads", type=int, default=_default_threads())
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reproduce", help="rerun a published table and compare")
    r.add_argument("--table", type=int, choices=(2, 4), required=True)
    r.add_argument("--scale", choices=("paper", "desk"), default="desk")
    r.add_argument("--sided", choices=("one", "two", "both"), default="both")
    r.add_argument("--seed", type=int, default=1)
    r.add_argument("--threads", type=int, default=_default_threads())
    r.add_argument("--out")
    r.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("error: invalid config:", file=sys.stderr)
        for line in exc.errors:
            print(f"  {line}", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numeric/runtime failures
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
