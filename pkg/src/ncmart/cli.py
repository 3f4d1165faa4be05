"""Command line: ``ncmart run|verify|fit|witness``.

Exit codes: 0 success, 1 configuration/input error, 2 verification mismatch.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .constants import FitError, InequalityKind, Model, hilbert_witness
from .estimate import format_exponent, format_number
from .experiment import (
    ConfigError,
    emit_report,
    fit_rows,
    fit_summary,
    load_config,
    read_results,
    run_experiment,
    verify_results,
)
from .matcore import InputError, parse_exponent

log = logging.getLogger("ncmart")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncmart", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="run every experiment section of a config file")
    run.add_argument("config", type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=Path, help="output directory (one experiment) or parent")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--max-n", type=int)
    run.add_argument("--restarts", type=int)
    run.add_argument("--format", default="PLOTDATA", choices=["CSV", "JSON", "PLOTDATA"])

    ver = sub.add_parser("verify", help="replay every stored witness")
    ver.add_argument("results", type=Path)
    ver.add_argument("--tol", type=float, default=1e-8)

    fit = sub.add_parser("fit", help="growth fits of a results file")
    fit.add_argument("results", type=Path)
    fit.add_argument("--model", choices=["log", "p"], default="log")

    wit = sub.add_parser("witness", help="print the Hilbert-matrix witness bound")
    wit.add_argument("kind", choices=["BG_LOWER", "STEIN", "DOOB_DUAL", "HMAX_GAP"])
    wit.add_argument("n", type=int)
    wit.add_argument("p", type=parse_exponent)
    return ap


def _run(args) -> int:
    configs = load_config(args.config)
    for cfg in configs:
        out = None
        if args.out is not None:
            out = args.out if len(configs) == 1 else args.out / cfg.name
        cfg = cfg.override(seed=args.seed, out=out, max_n=args.max_n, restarts=args.restarts)
        if not cfg.n_grid:
            raise ConfigError(f"[{cfg.name}]: no n left after --max-n")
        log.info("running %s (%s, %d cells)", cfg.name, cfg.kind, len(cfg.n_grid) * len(cfg.p_grid))
        rows = run_experiment(cfg, jobs=args.jobs)
        for r in rows:
            print(f"{cfg.name} {r.kind} n={r.n} p={format_exponent(r.p)} bound={format_number(r.bound)}")
        fits = []
        try:
            fits = fit_rows(rows)
        except FitError as exc:
            log.warning("fit skipped: %s", exc)
        for label, f in fits:
            print(fit_summary(label, f))
        emit_report(rows, fits, args.format, cfg.output / "report")
    return 0


def _verify(args) -> int:
    bad = verify_results(args.results, args.tol)
    for row, value in bad:
        print(f"MISMATCH {row.kind} n={row.n} p={format_exponent(row.p)}: stored "
              f"{format_number(row.bound)} replayed {format_number(value)}")
    if bad:
        return 2
    print(f"verified {len(read_results(args.results))} rows")
    return 0


def _fit(args) -> int:
    model = Model.LOG_POWER if args.model == "log" else Model.P_POWER
    fits = fit_rows(read_results(args.results), model)
    if not fits:
        print("no group with at least 4 points", file=sys.stderr)
        return 1
    for label, f in fits:
        print(fit_summary(label, f))
    return 0


def _witness(args) -> int:
    est = hilbert_witness(InequalityKind(args.kind), args.n, args.p)
    print(f"{est.kind} n={est.n} p={format_exponent(est.p)} bound={format_number(est.lower_bound)}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handler = {"run": _run, "verify": _verify, "fit": _fit, "witness": _witness}[args.verb]
    try:
        return handler(args)
    except (InputError, FitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
