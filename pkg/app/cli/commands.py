"""CLI commands: run, transform and diff-traces"""

import argparse
import logging
import sys
from pathlib import Path
from typing import TextIO

from app.cli.schemas import RunConfig
from app.corpus.logic import diff_traces, dump_trace, load_trace
from app.engine.enums import Mode
from app.engine.errors import EngineError
from app.engine.logic import Engine
from app.reader.formatting import format_program
from app.reader.logic import parse_program, parse_query
from app.terms.errors import LabError
from app.transform.enums import Approach, IdPolicy
from app.transform.logic import transform_program
from app.transform.schemas import INDICATOR_PATTERN, BackjumpSpec, ClauseKey

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO_RESULT = 1
EXIT_ERROR = 2


def indicator_arg(text: str) -> str:
    """argparse type for `name/arity`."""
    if not INDICATOR_PATTERN.match(text):
        raise argparse.ArgumentTypeError(f"expected name/arity, got {text!r}")
    return text


def _split_designation(text: str, parts: int) -> list[str]:
    fields = text.rsplit(":", parts - 1)
    if len(fields) != parts or not INDICATOR_PATTERN.match(fields[0]):
        raise argparse.ArgumentTypeError(f"expected name/arity{':N' * (parts - 1)}, got {text!r}")
    return fields


def clause_arg(text: str) -> ClauseKey:
    """argparse type for `name/arity:clause`."""
    indicator, index = _split_designation(text, 2)
    if not index.isdigit() or int(index) < 1:
        raise argparse.ArgumentTypeError(f"clause index must be a positive integer in {text!r}")
    return indicator, int(index)


def split_arg(text: str) -> tuple[ClauseKey, int]:
    """argparse type for `name/arity:clause:split`, split being the number of goals before the catch."""
    indicator, index, split = _split_designation(text, 3)
    if not (index.isdigit() and split.isdigit()) or int(index) < 1 or int(split) < 1:
        raise argparse.ArgumentTypeError(f"clause index and split must be positive integers in {text!r}")
    return (indicator, int(index)), int(split)


def _fail(message: str, stderr: TextIO) -> int:
    print(f"error: {message}", file=stderr)
    return EXIT_ERROR


def cmd_run(config: RunConfig, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """
    Run a query and print each answer as soon as it is found.

    Returns:
        0 when at least one answer was found, 1 when none, 2 on any error
    """
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    logger.info("run %s with %s in %s mode", config.program, config.query, config.mode.value)
    try:
        program = parse_program(config.program.read_text())
        query = parse_query(config.query)
    except OSError as error:
        return _fail(f"cannot read {config.program}: {error.strerror}", stderr)
    except LabError as error:
        return _fail(str(error), stderr)
    except RecursionError:
        return _fail("source terms nested too deeply to read", stderr)
    if config.mode is Mode.ISO and program.uses("backjump/1"):
        return _fail("the program uses backjump/1; run it with --mode native-bj", stderr)

    limits = config.limits.model_copy(update={"record_trace": config.trace is not None})
    engine = Engine(program, config.mode, limits)
    status = EXIT_OK
    try:
        for answer in engine.answers(query):
            print(answer.text(), file=stdout, flush=True)
        if not engine.found:
            print("false", file=stdout)
            status = EXIT_NO_RESULT
    except EngineError as error:
        status = _fail(str(error), stderr)
    except RecursionError:
        status = _fail("answer term too deep to print", stderr)
    finally:
        if config.trace is not None:
            dump_trace(engine.trace, config.trace)
    return status


def cmd_transform(
    approach: Approach | str,
    program_path: Path,
    spec: BackjumpSpec,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """Print the transformed program as source text."""
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    logger.info("transform %s with approach %s", program_path, Approach(approach).value)
    try:
        program = parse_program(Path(program_path).read_text())
        transformed = transform_program(program, approach, spec)
    except OSError as error:
        return _fail(f"cannot read {program_path}: {error.strerror}", stderr)
    except LabError as error:
        return _fail(str(error), stderr)
    stdout.write(format_program(transformed))
    return EXIT_OK


def cmd_diff(
    a_path: Path,
    b_path: Path,
    project: list[str] | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """
    Compare two trace files, projected onto `project` when given.

    Returns:
        0 when equal, 1 on a divergence, 2 on unreadable input
    """
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    logger.info("diff %s %s", a_path, b_path)
    try:
        a, b = load_trace(a_path), load_trace(b_path)
    except OSError as error:
        return _fail(f"cannot read trace: {error.strerror}", stderr)
    except LabError as error:
        return _fail(str(error), stderr)
    divergence = diff_traces(a, b, keep=project or None)
    if divergence is None:
        print("equal", file=stdout)
        return EXIT_OK
    print(divergence.describe(), file=stdout)
    return EXIT_NO_RESULT


def build_spec(args: argparse.Namespace) -> BackjumpSpec:
    """Backjump spec from the transform flags."""
    return BackjumpSpec(
        target_procedures=set(args.procedure or ()),
        id_policy=IdPolicy.FROM_ARG if args.id_from_arg else IdPolicy.FRESH,
        id_arg=args.id_from_arg,
        split_points=dict(args.split or ()),
        exempt_clauses=set(args.exempt or ()),
        dynamic_exempt_clauses=set(args.dynamic_exempt or ()),
    )
