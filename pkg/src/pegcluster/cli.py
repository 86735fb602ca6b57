"""Command-line interface: ``peg parse``, ``peg check`` and ``peg bench``."""

import argparse
import logging
import sys
import time
from collections.abc import Sequence
from pathlib import Path

from pegcluster import __version__
from pegcluster.bench import (
    BenchConfig,
    Style,
    collect_stats,
    format_stats,
    format_table,
    run_bench,
)
from pegcluster.dsl import prepare_source
from pegcluster.engine import Parser, ParserOptions
from pegcluster.exceptions import NestingDepthError, PegError
from pegcluster.expressions import Kind, describe
from pegcluster.log_config import setup_logging
from pegcluster.passes import PreparedGrammar, transform
from pegcluster.syntax import TreeFormat, serialize_tree
from pegcluster.tracing import TraceVisitor
from pegcluster.types import BenchArgs, CheckArgs, LoggingOptions, ParseArgs

EXIT_OK = 0
EXIT_PARSE_FAILURE = 1
EXIT_GRAMMAR_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_TOO_DEEP = 4
EXIT_INTERRUPTED = 130
ALL_STYLES = "all"


def _add_logging_arguments(parser: argparse.ArgumentParser) -> None:
    """Add the logging options every subcommand shares."""
    parser.add_argument(
        "--log-level",
        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
        default="WARNING",
        help="Set the logging level (default: WARNING)",
    )
    parser.add_argument("--log-file", help="Log file path (optional)")


def create_argument_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser."""
    parser = argparse.ArgumentParser(
        prog="peg",
        description="Parse text with PEG grammars supporting left recursion and "
        "expression clusters.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s parse arith.peg input.txt --tree-format json
  %(prog)s check arith.peg
  %(prog)s bench --levels 3 --ops 2 --style cluster --reps 5
        """,
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"pegcluster {__version__}",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    parse_parser = commands.add_parser("parse", help="Parse an input file")
    parse_parser.add_argument("grammar", help="Grammar file (.peg)")
    parse_parser.add_argument("input", help="Input file to parse")
    parse_parser.add_argument(
        "--tree-format",
        choices=tuple(TreeFormat),
        default=TreeFormat.SEXPR.value,
        help="Syntax tree rendering (default: sexpr)",
    )
    parse_parser.add_argument(
        "--stats", action="store_true", help="Append invocation statistics"
    )
    parse_parser.add_argument(
        "--trace", action="store_true", help="Print one line per expression invocation"
    )
    parse_parser.add_argument(
        "--no-full-match",
        action="store_false",
        dest="full_match",
        help="Accept a match that stops before the end of the input",
    )
    _add_logging_arguments(parse_parser)

    check_parser = commands.add_parser(
        "check", help="Report left-recursive cycles and nullability warnings"
    )
    check_parser.add_argument("grammar", help="Grammar file (.peg)")
    _add_logging_arguments(check_parser)

    bench_parser = commands.add_parser(
        "bench", help="Count invocations on generated arithmetic grammars"
    )
    bench_parser.add_argument(
        "--levels", type=int, default=2, help="Precedence levels L (default: 2)"
    )
    bench_parser.add_argument(
        "--ops", type=int, default=2, help="Operators per level P (default: 2)"
    )
    bench_parser.add_argument(
        "--style",
        choices=(ALL_STYLES, *Style),
        default=ALL_STYLES,
        help="Grammar style to run (default: all)",
    )
    bench_parser.add_argument(
        "--memo", action="store_true", help="Memoize every rule of the grammar"
    )
    bench_parser.add_argument(
        "--no-left-recur",
        action="store_false",
        dest="left_recur",
        help="Make cluster operator groups right-associative",
    )
    bench_parser.add_argument(
        "--input-len",
        type=int,
        default=1000,
        help="Length of the generated input (default: 1000)",
    )
    bench_parser.add_argument(
        "--reps", type=int, default=5, help="Repetitions per measurement (default: 5)"
    )
    bench_parser.add_argument(
        "--seed", type=int, default=0, help="Seed of the input generator (default: 0)"
    )
    _add_logging_arguments(bench_parser)

    return parser


def _namespace_members(namespace: argparse.Namespace) -> dict[str, object]:
    """Extract namespace members as a typed string-to-object mapping."""
    members: object = vars(namespace)
    if not isinstance(members, dict):
        raise TypeError("argparse namespace must provide a dict of attributes")
    typed_members: dict[str, object] = {}
    for key_obj, value_obj in members.items():
        if isinstance(key_obj, str):
            typed_members[key_obj] = value_obj
    return typed_members


def _str(members: dict[str, object], key: str, default: str = "") -> str:
    """String member ``key``, or ``default`` when missing or of another type."""
    value = members.get(key, default)
    return value if isinstance(value, str) else default


def _int(members: dict[str, object], key: str, default: int) -> int:
    """Integer member ``key``, or ``default`` when missing or of another type."""
    value = members.get(key, default)
    return value if isinstance(value, int) else default


def _logging_options(members: dict[str, object]) -> LoggingOptions:
    """Logging options from the parsed namespace members."""
    log_file: object = members.get("log_file")
    return LoggingOptions(
        log_level=_str(members, "log_level", "WARNING"),
        log_file=log_file if isinstance(log_file, str) else None,
    )


def namespace_to_args(
    namespace: argparse.Namespace,
) -> ParseArgs | CheckArgs | BenchArgs:
    """Convert an argparse namespace into the typed arguments of its subcommand."""
    members = _namespace_members(namespace)
    logging_options = _logging_options(members)
    command = _str(members, "command")
    if command == "parse":
        return ParseArgs(
            grammar=_str(members, "grammar"),
            input=_str(members, "input"),
            tree_format=_str(members, "tree_format", TreeFormat.SEXPR.value),
            stats=bool(members.get("stats", False)),
            trace=bool(members.get("trace", False)),
            full_match=bool(members.get("full_match", True)),
            logging=logging_options,
        )
    if command == "check":
        return CheckArgs(grammar=_str(members, "grammar"), logging=logging_options)
    return BenchArgs(
        levels=_int(members, "levels", 2),
        ops=_int(members, "ops", 2),
        style=_str(members, "style", ALL_STYLES),
        memo=bool(members.get("memo", False)),
        left_recur=bool(members.get("left_recur", True)),
        input_len=_int(members, "input_len", 1000),
        reps=_int(members, "reps", 5),
        seed=_int(members, "seed", 0),
        logging=logging_options,
    )


def _emit(text: str) -> None:
    """Write one block of command output to stdout."""
    sys.stdout.write(text + "\n")


def _read_text(path: str) -> str:
    """Read a UTF-8 file; undecodable bytes count as an I/O error."""
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise OSError(
            f"{path} is not valid UTF-8 (byte {exc.start}: {exc.reason})"
        ) from exc


def run_parse(args: ParseArgs, logger: logging.Logger) -> int:
    """Parse the input file and print its tree or the error report."""
    prepared = prepare_source(_read_text(args.grammar))
    text = _read_text(args.input)
    grammar = prepared.grammar
    if args.trace:
        grammar = transform(grammar, TraceVisitor(grammar))
    options = ParserOptions(
        full_match=args.full_match, trace_sink=_emit if args.trace else None
    )
    parser = Parser(grammar, options)
    started = time.perf_counter()
    result = parser.parse(text)
    wall_ms = (time.perf_counter() - started) * 1000.0
    if result.success:
        logger.info("Parsed %s characters", result.end)
        _emit(serialize_tree(result.nodes, args.tree_format))
    else:
        _emit(result.report.render())
    if args.stats:
        _emit(format_stats(collect_stats(result, grammar, wall_ms)))
    return EXIT_OK if result.success else EXIT_PARSE_FAILURE


def _cycle_label(prepared: PreparedGrammar, cycle: Sequence[int]) -> str:
    """Rule names in a cycle, or the description of its lowest node."""
    names = prepared.grammar.rule_names()
    names.update({mark.node_id: mark.rule for mark in prepared.marked if mark.rule})
    named = sorted({names[node_id] for node_id in cycle if node_id in names})
    if not named:
        named = [describe(prepared.grammar.node(min(cycle)))]
    return f"{', '.join(named)} ({len(cycle)} nodes)"


def check_report(prepared: PreparedGrammar) -> list[str]:
    """Lines describing cycles, auto-marked rules and nullability warnings."""
    grammar = prepared.grammar
    lines = [f"rules: {len(grammar.rules)}"]
    if not prepared.cycles:
        lines.append("no left recursion")
    else:
        lines.append(f"left-recursive cycles: {len(prepared.cycles)}")
        lines.extend(
            f"  cycle: {_cycle_label(prepared, cycle)}" for cycle in prepared.cycles
        )
    marked = [
        mark.rule or describe(grammar.node(mark.node_id)) for mark in prepared.marked
    ]
    lines.append(f"auto-marked: {', '.join(marked) if marked else 'none'}")
    nullable_rules = sorted(
        name for name, node_id in grammar.rules.items() if node_id in prepared.nullable
    )
    if nullable_rules:
        lines.append(f"nullable rules: {', '.join(nullable_rules)}")
    for node in grammar.iter_nodes():
        if node.kind in (Kind.ZERO_OR_MORE, Kind.ONE_OR_MORE) and (
            node.child in prepared.nullable
        ):
            operand = describe(grammar.node(node.child))
            lines.append(f"warning: {node.kind} over {operand} can match empty input")
    return lines


def run_check(args: CheckArgs, logger: logging.Logger) -> int:
    """Load the grammar and print the left-recursion analysis."""
    prepared = prepare_source(_read_text(args.grammar))
    logger.info("Checked %s", args.grammar)
    for line in check_report(prepared):
        _emit(line)
    return EXIT_OK


def run_bench_command(args: BenchArgs, logger: logging.Logger) -> int:
    """Run the benchmark and print both tables."""
    styles = list(Style) if args.style == ALL_STYLES else [Style(args.style)]
    configs = [
        BenchConfig(args.levels, args.ops, style, args.memo, args.left_recur)
        for style in styles
    ]
    tables = run_bench(configs, args.input_len, args.reps, args.seed)
    logger.info("Benchmark finished for %s styles", len(configs))
    _emit(
        format_table(
            f"single digit input, L={args.levels} P={args.ops}", tables.single_digit
        )
    )
    _emit(
        format_table(
            f"generated input of {args.input_len} characters", tables.long_input
        )
    )
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Main application entry point."""
    parser = create_argument_parser()
    args = namespace_to_args(parser.parse_args(argv))

    logger = setup_logging(args.logging.log_level, args.logging.log_file)
    logger.debug("pegcluster %s starting", __version__)

    try:
        if isinstance(args, ParseArgs):
            return run_parse(args, logger)
        if isinstance(args, CheckArgs):
            return run_check(args, logger)
        return run_bench_command(args, logger)
    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return EXIT_INTERRUPTED
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO_ERROR
    except NestingDepthError as exc:
        logger.error("Parse aborted: %s", exc)
        return EXIT_TOO_DEEP
    except PegError as exc:
        logger.error("Grammar error: %s", exc)
        return EXIT_GRAMMAR_ERROR
