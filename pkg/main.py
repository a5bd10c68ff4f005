#!/usr/bin/env python3
"""
Backjump lab command line.
Usage: python main.py {run,transform,diff-traces} ...
"""

import argparse
import sys
from pathlib import Path

from pydantic import ValidationError

from app.cli.commands import (
    EXIT_ERROR,
    build_spec,
    clause_arg,
    cmd_diff,
    cmd_run,
    cmd_transform,
    indicator_arg,
    split_arg,
)
from app.cli.schemas import RunConfig
from app.config.logs import configure_logging
from app.engine.enums import Mode
from app.engine.schemas import Limits
from app.transform.enums import Approach


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Run, transform and compare backjumping logic programs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py run p1.pl "sat_cnf([[true-X]])"
  python main.py run fig1.pl "top(X)" --mode native-bj --trace fig1.jsonl
  python main.py transform --approach 2 --split sat_cnf/2:2:2 --id-from-arg 2 p2.pl
  python main.py transform --approach dbsim --procedure sat_b/3 pb2.pl
  python main.py diff-traces native.jsonl catch.jsonl --project sat_b/3
        """
    )
    parser.add_argument("--log-level", help="Override LOG_LEVEL for this invocation")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a query and print its answers")
    run.add_argument("program", type=Path, help="Program source file")
    run.add_argument("query", help="Query goal, e.g. 'sat_cnf(F)'")
    run.add_argument("--mode", type=Mode, choices=list(Mode), default=Mode.ISO,
                     help="iso, or native-bj to allow backjump/1")
    run.add_argument("--trace", type=Path, help="Write the trace as JSON lines to this file")
    run.add_argument("--max-steps", type=int, help="Stop with an error after this many steps")
    run.add_argument("--max-solutions", type=int, help="Stop after this many answers")

    transform = commands.add_parser("transform", help="Print a program rewritten to backjump")
    transform.add_argument("program", type=Path, help="Program source file")
    transform.add_argument("--approach", type=Approach, choices=list(Approach), required=True)
    transform.add_argument("--procedure", type=indicator_arg, action="append",
                           help="Procedure to transform (repeatable; default: all)")
    transform.add_argument("--split", type=split_arg, action="append",
                           help="name/arity:clause:split, split = goals kept before the catch")
    transform.add_argument("--exempt", type=clause_arg, action="append",
                           help="name/arity:clause left unchanged")
    transform.add_argument("--dynamic-exempt", type=clause_arg, action="append",
                           help="name/arity:clause whose wrapping is decided at run time")
    transform.add_argument("--id-from-arg", type=int, metavar="K",
                           help="Use head argument K as the target identifier")

    diff = commands.add_parser("diff-traces", help="Report the first difference between two traces")
    diff.add_argument("a", type=Path)
    diff.add_argument("b", type=Path)
    diff.add_argument("--project", type=indicator_arg, action="append",
                      help="Compare only these predicates (repeatable)")
    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the script."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        match args.command:
            case "run":
                limits = Limits(max_solutions=args.max_solutions)
                if args.max_steps is not None:
                    limits = Limits(max_steps=args.max_steps, max_solutions=args.max_solutions)
                config = RunConfig(program=args.program, query=args.query, mode=args.mode,
                                   trace=args.trace, limits=limits)
                return cmd_run(config)
            case "transform":
                return cmd_transform(args.approach, args.program, build_spec(args))
            case "diff-traces":
                return cmd_diff(args.a, args.b, args.project)
    except ValidationError as error:
        print(f"error: {error.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
