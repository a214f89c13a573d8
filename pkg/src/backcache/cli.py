"""Command-line entry point.

Subcommands:
  optimize    run the SCA strategy at the scenario's backhaul delay
  baselines   evaluate mpc, mpc-paper-formula and lcd
  exhaustive  enumerate the optimum (small instances)
  simulate    Monte Carlo validation of the configured strategies
  sweep       full (delta x strategy) sweep from the config's sweep block

All subcommands read the same YAML config (--config) and emit the sweep
CSV schema; --out writes the CSV plus per-cell placement dumps, otherwise
the CSV goes to stdout.  Exit codes: 0 success, 2 config error,
3 I/O error, 4 internal error.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .experiment import CSV_HEADER, dump_row_placements, emit_csv, run_sweep

EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_INTERNAL_ERROR = 4

_BASELINE_SET = ["mpc", "mpc-paper-formula", "lcd"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="backcache",
        description="Backhaul-aware caching placement toolkit",
    )
    parser.add_argument("--config", required=True, help="YAML experiment config")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument(
        "--seed", type=int, help="override the simulation seed from the config"
    )
    parser.add_argument(
        "--threads", type=int, default=1, help="parallel sweep cells"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("optimize", help="run the SCA strategy")
    sub.add_parser("baselines", help="evaluate the baseline strategies")
    sub.add_parser("exhaustive", help="enumerate the optimal placement")
    sub.add_parser("simulate", help="Monte Carlo validation run")
    sub.add_parser("sweep", help="run the configured delta/strategy sweep")
    return parser


def _fmt_row(row) -> str:
    from .experiment import _fmt

    objective = "refused" if row.refused else _fmt(row.objective_slots)
    return ",".join(
        [
            _fmt(row.delta),
            row.strategy,
            objective,
            _fmt(row.simulated_mean),
            _fmt(row.simulated_stderr),
            "" if row.budget_used is None else str(row.budget_used),
            str(row.iterations),
        ]
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        strategies = None
        delta_values = None
        if args.command == "optimize":
            strategies = ["sca"]
            delta_values = [float(config.scenario.get("backhaul_delay_slots", 0.0))]
        elif args.command == "baselines":
            strategies = _BASELINE_SET
            delta_values = [float(config.scenario.get("backhaul_delay_slots", 0.0))]
        elif args.command == "exhaustive":
            strategies = ["exhaustive"]
            delta_values = [float(config.scenario.get("backhaul_delay_slots", 0.0))]
        elif args.command == "simulate":
            if config.sim_trials <= 0:
                raise ConfigError("simulate requires sim.trials > 0")
            strategies = config.strategies() or ["sca"]
        rows = run_sweep(
            config,
            strategies=strategies,
            delta_values=delta_values,
            seed_override=args.seed,
            threads=max(1, args.threads),
        )
    except ConfigError as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except OSError as exc:
        print(f"io-error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal-error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL_ERROR

    if args.out:
        try:
            emit_csv(rows, args.out)
            dump_row_placements(rows, f"{args.out}.placements", config)
        except OSError as exc:
            print(f"io-error: {exc}", file=sys.stderr)
            return EXIT_IO_ERROR
    else:
        print(CSV_HEADER)
        for row in rows:
            print(_fmt_row(row))
    return 0


if __name__ == "__main__":
    sys.exit(main())
