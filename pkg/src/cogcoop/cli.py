"""``python -m cogcoop SUBCOMMAND [options]``.

Exit status: 0 success, 2 configuration error, 3 nothing feasible
anywhere (the table is still written), 4 internal invariant violated.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, Experiment, ExperimentConfig, parse_config
from .core import InputError, InvariantViolation, Scheme
from .experiments import AllInfeasible, run_experiment
from .presets import PRESETS

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 2, 3, 4

SUBCOMMANDS = {
    "rate-region": Experiment.RATE_REGION,
    "su-sweep": Experiment.SU_SWEEP,
    "outage": Experiment.OUTAGE,
    "param-curve": None,   # rho or alpha, from the schemes
    "feasibility": Experiment.FEASIBILITY,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cogcoop", description="Cooperative cognitive radio experiments.")
    p.add_argument("command", choices=list(SUBCOMMANDS))
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--scheme", action="append", metavar="NAME")
    p.add_argument("--eta", action="append", type=float, metavar="FLOAT")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--workers", type=int, default=1)
    return p


def _param_experiment(schemes) -> Experiment:
    ts = {Scheme.TIME_SPLIT, Scheme.TIME_SPLIT_ZF}
    if schemes and all(s in ts for s in schemes):
        return Experiment.ALPHA_CURVE
    return Experiment.RHO_CURVE


def resolve(args: argparse.Namespace) -> ExperimentConfig:
    exp = parse_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.out is not None:
        changes["output_path"] = args.out
    if args.scheme:
        changes["schemes"] = tuple(Scheme.parse(s) for s in args.scheme)
    if args.eta:
        changes["eta_list"] = tuple(args.eta)
    if args.preset:
        changes["preset"] = args.preset
    experiment = SUBCOMMANDS[args.command]
    if experiment is None:
        current = exp.experiment
        if current in (Experiment.RHO_CURVE, Experiment.ALPHA_CURVE) and not args.scheme:
            experiment = current
        else:
            experiment = _param_experiment(changes.get("schemes", exp.schemes))
    changes["experiment"] = experiment
    try:
        return exp.replace(**changes)
    except InputError as exc:
        raise ConfigError(str(exc)) from None


def _emit(text: str, path: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:   # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    if args.workers < 1:
        print("cogcoop: error: --workers must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        exp = resolve(args)
        table = run_experiment(exp, workers=args.workers)
    except AllInfeasible as exc:
        _emit(exc.table.to_csv(), exp.output_path)
        print("cogcoop: no scheme was feasible at any point", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InvariantViolation as exc:
        print(f"cogcoop: internal check failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except InputError as exc:
        print(f"cogcoop: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(table.to_csv(), exp.output_path)
    return EXIT_OK
