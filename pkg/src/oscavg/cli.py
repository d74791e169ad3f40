"""Command-line entry point.

oscavg run --suite {cput|fpu|wave|avgcheck} [--config FILE] [--set k=v ...]
           [--out DIR]
oscavg check [--criteria FILE]

Exit codes: 0 success, 1 acceptance-criterion failure, 2 configuration error.
"""

import argparse
import sys

from .errors import ConfigError
from .harness import ExperimentConfig, run


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="oscavg",
        description="Classical and improved averaging of oscillatory systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment suite")
    run_p.add_argument("--suite", required=True,
                       choices=ExperimentConfig.SUITES)
    run_p.add_argument("--config", help="flat key=value config file")
    run_p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")
    run_p.add_argument("--out", default=".", help="output directory")

    check_p = sub.add_parser("check", help="replay the acceptance criteria")
    check_p.add_argument("--criteria",
                         help="file listing criterion ids, one per line "
                              "(default: all)")
    return parser


def _read_criteria_file(path):
    try:
        with open(path) as fh:
            ids = [line.split("#", 1)[0].strip() for line in fh]
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    return [i for i in ids if i]


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = ExperimentConfig.from_sources(args.suite, args.config,
                                                   args.overrides)
            run(config, args.out)
            return 0
        # check
        from .acceptance import run_criteria
        ids = _read_criteria_file(args.criteria) if args.criteria else None
        try:
            results = run_criteria(ids)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        return 0 if all(r.passed for r in results) else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
