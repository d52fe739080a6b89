"""Command-line interface.

Subcommands: run, sweep, table1, validate.  Exit codes: 0 success,
2 validation error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from .errors import NumericalFailure, ValidationError
from .runner import (
    SWEEP_AXES,
    SchemeConfig,
    reproduce_table1,
    rows_to_csv,
    run_scheme,
    sweep,
    validation_report,
)

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file mirroring the config fields")
    p.add_argument("--scheme", choices=("single_mode", "two_mode_double_input",
                                        "two_mode_single_input"))
    p.add_argument("--n-atoms", type=float, dest="n_atoms")
    p.add_argument("--r", type=float)
    p.add_argument("--theta-sq", type=float, dest="theta_sq")
    p.add_argument("--q", type=float)
    p.add_argument("--pulse-area", type=float, dest="pulse_area")
    p.add_argument("--qst-mode", choices=("integrate", "analytic"), dest="qst_mode")
    p.add_argument("--steps", type=int)
    p.add_argument("--phi", type=float)
    p.add_argument("--eta", action="append", default=None, metavar="SITE=VALUE",
                   help="loss site transmission, repeatable")
    p.add_argument("--n-lo", type=float, dest="n_lo")
    p.add_argument("--theta-lo", type=float, dest="theta_lo")
    p.add_argument("--recycled", action="store_true", default=None)
    p.add_argument("--trajectories", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--engine", choices=("tw", "analytic"))
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="json")


def _parse_eta(pairs) -> dict[str, float]:
    table = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValidationError(f"--eta expects SITE=VALUE, got {pair!r}")
        site, _, value = pair.partition("=")
        try:
            table[site] = float(value)
        except ValueError:
            raise ValidationError(f"bad transmission value in {pair!r}") from None
    return table


def _config_from_args(args) -> SchemeConfig:
    data: dict = {}
    if args.config:
        with open(args.config) as fh:
            data.update(json.load(fh))
    for name in ("scheme", "n_atoms", "r", "theta_sq", "q", "pulse_area", "qst_mode",
                 "steps", "phi", "n_lo", "theta_lo", "recycled", "trajectories",
                 "seed", "engine"):
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if args.eta is not None:
        data["eta"] = _parse_eta(args.eta)
    config = SchemeConfig.from_dict(data)
    config.validate()
    return config


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _result_rows(result) -> list[dict]:
    rows = []
    for variant, sens in sorted(result.sensitivities.items()):
        rows.append({
            "axis_value": result.config["phi"],
            "signal_variant": variant,
            "delta_phi": sens["delta_phi"],
            "stderr": sens["stderr"],
            "phi_opt": sens["phi_opt"],
            "q_achieved": result.q_achieved,
            "n_t": result.n_t,
            "engine": result.config["engine"],
        })
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sqmzi",
        description="Squeezed-light-enhanced Mach-Zehnder atom interferometry simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration")
    _add_config_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="sweep one axis")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated ascending values")
    p_sweep.set_defaults(format="csv")

    p_table = sub.add_parser("table1", help="reproduce the summary table")
    p_table.add_argument("--trajectories", type=int, default=100_000)
    p_table.add_argument("--seed", type=int, default=20240810)
    p_table.add_argument("--out")
    p_table.add_argument("--format", choices=("csv", "json"), default="csv")

    p_val = sub.add_parser("validate", help="oracle and estimator cross-checks")
    p_val.add_argument("--trajectories", type=int, default=50_000)
    p_val.add_argument("--seed", type=int, default=11)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            config = _config_from_args(args)
            result = run_scheme(config)
            if args.format == "csv":
                _emit(rows_to_csv(_result_rows(result)), args.out)
            else:
                _emit(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n", args.out)
        elif args.command == "sweep":
            config = _config_from_args(args)
            try:
                values = [float(v) for v in args.values.split(",") if v]
            except ValueError:
                raise ValidationError(f"bad sweep values {args.values!r}") from None
            rows = sweep(config, args.axis, values)
            if args.format == "json":
                _emit(json.dumps(rows, indent=2, sort_keys=True) + "\n", args.out)
            else:
                _emit(rows_to_csv(rows), args.out)
        elif args.command == "table1":
            rows = reproduce_table1(args.trajectories, args.seed)
            if args.format == "json":
                _emit(json.dumps(rows, indent=2, sort_keys=True) + "\n", args.out)
            else:
                lines = ["scheme,column,delta_phi,stderr,published,ratio,q_achieved,n_t"]
                for row in rows:
                    lines.append(",".join(repr(row[k]) if isinstance(row[k], float) else str(row[k])
                                          for k in ("scheme", "column", "delta_phi", "stderr",
                                                    "published", "ratio", "q_achieved", "n_t")))
                _emit("\n".join(lines) + "\n", args.out)
        else:
            checks = validation_report(args.trajectories, args.seed)
            worst = True
            for name, ok, detail in checks:
                print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
                worst = worst and ok
            if not worst:
                return EXIT_NUMERICAL
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
