"""Command-line entry point: ``chaindkg run | replay | vectors``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bulletin import CorruptLog
from .simulator import Adversary, InvalidConfig, ScenarioConfig, emit_vectors, replay, run_scenario


def _cmd_run(args) -> int:
    try:
        adversaries = tuple(Adversary.parse(a) for a in args.adversary)
        config = ScenarioConfig(args.nodes, args.threshold, args.seed, adversaries)
        result = run_scenario(config, out=args.out)
    except InvalidConfig as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(result.report.to_json())
    for v in result.violations:
        print(f"violation: {v}", file=sys.stderr)
    return 0 if result.ok else 1


def _cmd_replay(args) -> int:
    try:
        report = replay(args.log)
    except CorruptLog as exc:
        print(f"corrupt log: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(report.to_json())
    if report.finished and not report.reconstruction_ok:
        return 1
    return 0


def _cmd_vectors(args) -> int:
    text = json.dumps(emit_vectors(args.seed), indent=2) + "\n"
    Path(args.out).write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaindkg", description="Blockchain-mediated DKG simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and print its report")
    run.add_argument("--nodes", type=int, required=True)
    run.add_argument("--threshold", type=int, required=True)
    run.add_argument("--seed", type=int, required=True)
    run.add_argument(
        "--adversary",
        action="append",
        default=[],
        metavar="IDX:BEHAVIOR[:TARGET]",
        help="bad-share, no-distribute or false-dispute; repeatable",
    )
    run.add_argument("--out", required=True, help="event log destination (JSON)")
    run.set_defaults(func=_cmd_run)

    rep = sub.add_parser("replay", help="re-apply an event log to a fresh board")
    rep.add_argument("--log", required=True)
    rep.set_defaults(func=_cmd_replay)

    vec = sub.add_parser("vectors", help="write golden test vectors")
    vec.add_argument("--out", required=True)
    vec.add_argument("--seed", type=int, default=0)
    vec.set_defaults(func=_cmd_vectors)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
