"""Command line entry point: ``wavemed fit|simulate|coupling|rates``.

Exit status is 0 on success, 1 for usage or input errors and 2 for
numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from ..binning import DegenerateDataError
from ..coupling import ConvergenceError, MedianLaw, moderate_deviation_check, verify_coupling_bound
from ..estimator import fit
from ..noise import parse_model
from .config import (
    InputError,
    estimator_from_dict,
    experiment_from_dict,
    load_toml,
    read_table_csv,
    read_xy_csv,
    write_csv,
)
from .experiment import RiskRow, fit_slope, run_experiment

log = logging.getLogger("wavemed")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_fit(args) -> int:
    cfg = estimator_from_dict(load_toml(args.config).get("estimator") if args.config else None)
    _, y = read_xy_csv(args.input)
    result = fit(y, cfg)
    write_csv(
        args.output,
        ["x", "fhat"],
        zip(result.grid, result.estimate),
        comments=[f"bias_hat={result.bias_hat!r}", f"h_inv_sq_hat={result.h_inv_sq_hat!r}"],
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = experiment_from_dict(load_toml(args.config), seed=args.seed)
    report = run_experiment(spec, workers=args.threads)
    footer = [f"slope={report.slope!r}", f"slope_ci={report.slope_ci[0]!r},{report.slope_ci[1]!r}"]
    if spec.t0 is not None:
        footer.append(f"pointwise_slope={report.pointwise_slope!r}")
    write_csv(args.output, list(RiskRow.FIELDS), (r.as_tuple() for r in report.rows), footer=footer)
    for row in report.rows:
        if row.failures:
            log.warning("n=%d: %d of %d replications failed", row.n, row.failures, spec.replications)
    return EXIT_OK


def cmd_coupling(args) -> int:
    model = parse_model(args.model)
    rows, footer = [], []
    if args.mode == "bound":
        header = ["m", "z", "deviation", "budget", "budget_symmetric"]
        for m in args.m:
            report = verify_coupling_bound(MedianLaw(model, m), args.epsilon, args.grid_size, args.z_cap)
            for (mm, z, dev, budget) in report.rows():
                rows.append((int(mm), z, dev, budget, (1.0 + abs(z) ** 3) / m))
            footer.append(f"m={m} normalized_sup={report.normalized_sup!r} symmetric_sup={report.symmetric_sup!r}")
    else:
        header = ["m", "x", "log_ratio", "budget"]
        grid = np.linspace(-args.x_min, 0.0, args.grid_size)
        for m in args.m:
            report = moderate_deviation_check(MedianLaw(model, m), grid)
            rows.extend((int(mm), x, r, b) for (mm, x, r, b) in report.rows())
            footer.append(f"m={m} max_ratio={float(report.ratio.max())!r}")
    write_csv(args.output, header, rows, footer=footer)
    return EXIT_OK


def cmd_rates(args) -> int:
    header, rows = read_table_csv(args.input)
    for col in ("n", args.column):
        if col not in header:
            raise InputError(f"{args.input}: missing column {col!r}")
    n = [v[header.index("n")] for _, v in rows]
    values = [v[header.index(args.column)] for _, v in rows]
    se_col = args.column.replace("_mean", "_se")
    ses = [v[header.index(se_col)] for _, v in rows] if se_col in header and se_col != args.column else None
    fitted = fit_slope(n, values, ses)
    if not np.isfinite(fitted.slope):
        raise ArithmeticError("slope undefined (need two or more positive, finite risks)")
    sys.stdout.write("slope,ci_low,ci_high\n")
    sys.stdout.write(f"{fitted.slope!r},{fitted.ci[0]!r},{fitted.ci[1]!r}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavemed", description="Wavelet median regression toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("fit", help="fit the estimator to an x,y CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--config")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="run a Monte Carlo risk experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="worker threads (default: WAVEMED_THREADS)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("coupling", help="median quantile-coupling diagnostics")
    p.add_argument("--model", required=True, help='noise model, e.g. "cauchy:1.0"')
    p.add_argument("--m", required=True, type=_int_list, help="comma-separated odd sample sizes")
    p.add_argument("--output", default="-")
    p.add_argument("--mode", choices=("bound", "moderate"), default="bound")
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--z-cap", type=float, default=2.0)
    p.add_argument("--grid-size", type=int, default=401)
    p.add_argument("--x-min", type=float, default=0.2, help="moderate mode: grid spans [-x_min, 0]")
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("rates", help="log2 risk slope from a simulate CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--column", default="global_mse_mean")
    p.set_defaults(func=cmd_rates)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (DegenerateDataError, ConvergenceError, ArithmeticError) as exc:
        print(f"wavemed: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"wavemed: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
