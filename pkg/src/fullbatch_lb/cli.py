"""Command-line entry points.

    fullbatch-lb run --config <path.json> --out <dir>
    fullbatch-lb suite --seed <u64> [--out <dir>]
    fullbatch-lb params --eps <f> --T <n> --d <n> --n <n>
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import (
    ExperimentConfig,
    default_suite_config,
    run_experiment,
    write_outputs,
)
from .instance import canonical_params


def _cmd_run(args) -> int:
    try:
        config = ExperimentConfig.from_file(args.config)
        fields, rows, report = run_experiment(config)
    except (ValueError, OSError, RuntimeError) as error:
        print(f"fullbatch-lb: error: {error}", file=sys.stderr)
        return 2
    paths = write_outputs(config, fields, rows, report, args.out)
    print(f"wrote {paths['results']}")
    print(f"wrote {paths['report']}")
    print(f"wrote {paths['config']}")
    return 0


def _cmd_suite(args) -> int:
    config = ExperimentConfig(default_suite_config(args.seed))
    fields, rows, report = run_experiment(config)
    if args.out:
        write_outputs(config, fields, rows, report, args.out)
    failed = 0
    for entry in report["properties"]:
        status = entry["status"].upper()
        if entry["status"] == "fail":
            failed += 1
        print(
            f"{status:7s} {entry['property']} "
            f"(trials={entry['trials']}, violations={entry['violations']})"
        )
    print(f"suite {'PASSED' if failed == 0 else 'FAILED'} (seed={args.seed})")
    return 0 if failed == 0 else 1


def _cmd_params(args) -> int:
    params = canonical_params(args.eps, args.T, args.d, args.n)
    print(json.dumps(params.to_dict(), indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fullbatch-lb",
        description="Hard-instance laboratory for full-batch lower bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run an experiment from a JSON config")
    run_parser.add_argument("--config", required=True, help="path to the config JSON")
    run_parser.add_argument("--out", required=True, help="output directory")
    run_parser.set_defaults(func=_cmd_run)

    suite_parser = sub.add_parser("suite", help="run the lemma property suite")
    suite_parser.add_argument("--seed", type=int, required=True)
    suite_parser.add_argument("--out", default=None, help="optional output directory")
    suite_parser.set_defaults(func=_cmd_suite)

    params_parser = sub.add_parser("params", help="print the canonical schedule")
    params_parser.add_argument("--eps", type=float, required=True)
    params_parser.add_argument("--T", type=int, required=True)
    params_parser.add_argument("--d", type=int, required=True)
    params_parser.add_argument("--n", type=int, required=True)
    params_parser.set_defaults(func=_cmd_params)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
