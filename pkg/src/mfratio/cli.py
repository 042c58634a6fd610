"""Command line front end: ``mfratio {simulate,estimate,verify,report}``.

Exit codes: 0 success, 1 usage, 2 validation, 3 runtime.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import io
from .config import parse_config
from .errors import (ConditionViolated, DomainError, InvalidH, InvalidModel, ModelUnusable,
                     NonNumeric, ParseError, ShapeError, TooFewSamples, ValidationError,
                     ValidityError)
from .estimators import zeta_curve
from .grid import MixedGrid
from .harness import rate_regression, run_replications, simulate, theorem_process
from .streams import Streams

EXIT_USAGE, EXIT_VALIDATION, EXIT_RUNTIME = 1, 2, 3
VALIDATION = (ValidationError, ParseError, ConditionViolated, InvalidModel, InvalidH,
              ValidityError, ModelUnusable, DomainError, ShapeError, NonNumeric, TooFewSamples)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _global_flags(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=d, help="master seed (overrides the config)")
    p.add_argument("--threads", type=int, default=d if suppress else 1)
    p.add_argument("--out", default=d, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=d if suppress else "json")


def build_parser():
    parser = _Parser(prog="mfratio", description=__doc__.splitlines()[0])
    _global_flags(parser, False)
    common = _Parser(add_help=False)
    _global_flags(common, True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="sample one realization to CSV")
    p.add_argument("-c", "--config", required=True)

    p = sub.add_parser("estimate", parents=[common], help="estimate zeta(q) from data")
    p.add_argument("--in", dest="inp", required=True, help="realization CSV (j,k,value) or series CSV (x)")
    p.add_argument("--q", required=True, help="comma-separated moments")
    p.add_argument("--method", choices=("ratio", "regression"), default="ratio")
    p.add_argument("--levels", help="lo,hi level range")
    p.add_argument("--series", choices=("increments", "levels"),
                   help="read column x as a series of this kind")
    p.add_argument("--blocks", type=int, help="number of blocks L of a series")
    p.add_argument("--n-boot", type=int, default=200)

    p = sub.add_parser("verify", parents=[common], help="Monte Carlo check of a limit theorem")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("--R", type=int, help="replications (overrides the config)")

    p = sub.add_parser("report", parents=[common], help="tabulate McReport JSON")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--data-dir", help="write plot-ready data files here")
    return parser


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(text, out):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _config(path):
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such config file: {path}")
    return parse_config(path)


def cmd_simulate(args):
    cfg = _config(args.config)
    seed = cfg.master_seed if args.seed is None else args.seed
    grid = MixedGrid(cfg.n, cfg.chi, cfg.T)
    real = simulate(cfg, grid, Streams(seed))
    io.write_realization(real, sys.stdout if args.out is None else args.out)


def cmd_estimate(args):
    if args.series:
        real = io.ingest_series(args.inp, args.series, args.blocks)
    else:
        real = io.read_realization(args.inp)
    levels = None
    if args.levels:
        lo, hi = (int(v) for v in _floats(args.levels))
        levels = (lo, hi)
    rep = zeta_curve(real, _floats(args.q), levels, args.method, args.n_boot,
                     0 if args.seed is None else args.seed)
    _emit(io.write_estimate(rep, args.out, args.format), args.out)


def cmd_verify(args):
    cfg = _config(args.config)
    cfg = cfg.with_overrides(master_seed=args.seed, R=args.R)
    run = run_replications(cfg, threads=args.threads)
    reports = run.reports()
    if cfg.levels and len(cfg.levels) >= 4:
        runs = {n: run if n == cfg.n else run_replications(cfg, threads=args.threads, n=n)
                for n in cfg.levels}
        for rep in reports:
            r = int(np.flatnonzero(np.isclose(run.q, rep.q))[0])
            var = {n: float(getattr(x, rep.estimator)[:, r].var(ddof=1)) for n, x in runs.items()}
            rep.rate_slope = rate_regression(var)
    text = io.write_mc_reports(reports, args.out, args.format)
    _emit(text, args.out)
    for rep in reports:
        print(f"{rep.estimator} q={rep.q:g} [{theorem_process(cfg)}]: mean={rep.mean:.6f} "
              f"bias={rep.bias:+.2e} ks_p={rep.ks_pvalue:.3f} "
              f"slope={rep.rate_slope:.3f} theory={-2 * rep.rate_theory:.3f}", file=sys.stderr)


def _cell(v, spec):
    return "nan" if v is None or (isinstance(v, float) and math.isnan(v)) else format(v, spec)


def cmd_report(args):
    reports = io.read_mc_reports(args.inp)
    head = f"{'estimator':<11}{'q':>6}{'n':>4}{'R':>6}{'truth':>10}{'mean':>10}{'bias':>11}" \
           f"{'variance':>11}{'ks_p':>7}{'slope':>8}{'-2r':>8}"
    rows = [head, "-" * len(head)]
    for d in reports:
        theory = None if d.get("rate_theory") is None else -2 * d["rate_theory"]
        rows.append(f"{d['estimator']:<11}{d['q']:>6g}{d['n']:>4}{d['R']:>6}"
                    f"{_cell(d['truth'], '10.5f')}{_cell(d['mean'], '10.5f')}"
                    f"{_cell(d['bias'], '+11.2e')}{_cell(d['variance'], '11.3e')}"
                    f"{_cell(d['ks_pvalue'], '7.3f')}{_cell(d['rate_slope'], '8.3f')}"
                    f"{_cell(theory, '8.3f')}")
    table = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table)
    else:
        sys.stdout.write(table)
    if args.data_dir:
        os.makedirs(args.data_dir, exist_ok=True)
        from scipy.stats import norm
        for d in reports:
            if not d.get("samples"):
                continue
            x = np.asarray(d["samples"], dtype=float)
            sd = x.std(ddof=1)
            z = np.sort((x - x.mean()) / sd) if sd > 0 else np.zeros_like(x)
            theo = norm.ppf((np.arange(1, z.size + 1) - 0.5) / z.size)
            name = os.path.join(args.data_dir, f"qq_{d['estimator']}_q{d['q']:g}_n{d['n']}.dat")
            with open(name, "w") as fh:
                fh.write("# normal_quantile standardized_sample\n")
                fh.writelines(f"{a:.17g} {b:.17g}\n" for a, b in zip(theo, z))


COMMANDS = {"simulate": cmd_simulate, "estimate": cmd_estimate, "verify": cmd_verify,
            "report": cmd_report}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except VALIDATION as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # runtime failure of a sampler or estimator
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
