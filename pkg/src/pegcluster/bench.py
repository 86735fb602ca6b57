"""Arithmetic grammar generators and the invocation-count benchmark."""

import logging
import random
import statistics
import string
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum

from pegcluster.engine import Parser, ParseResult
from pegcluster.exceptions import BenchConfigurationError
from pegcluster.expressions import (
    ClusterGroup,
    Expression,
    Grammar,
    GrammarBuilder,
    Kind,
    describe,
)
from pegcluster.passes import TransformContext, prepare_grammar, transform
from pegcluster.types import BenchRow, ExpressionCount, StatsReport

logger = logging.getLogger("pegcluster")

OPERATOR_ALPHABET = "+-*/%^&|<>~!@#$=?:;," + string.ascii_lowercase
DIGIT_RULE = "N"
DIGIT_NODE = "num"
BENCH_COLUMNS = ("style", "L", "P", "digit_invocations", "total_invocations", "wall_ms")


class Style(StrEnum):
    """Ways of writing an arithmetic grammar with L levels of P operators."""

    LAYERED_RIGHT = "layered-right"
    IDIOMATIC = "idiomatic"
    LAYERED_LEFT = "layered-left"
    CLUSTER = "cluster"


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark grammar: ``levels`` precedence levels of ``ops`` operators."""

    levels: int
    ops: int
    style: Style
    memo: bool = False
    left_recur: bool = True

    def __post_init__(self) -> None:
        if self.levels < 1 or self.ops < 1:
            raise BenchConfigurationError(
                "levels and operators per level must be at least 1"
            )
        if self.levels * self.ops > len(OPERATOR_ALPHABET):
            raise BenchConfigurationError(
                f"at most {len(OPERATOR_ALPHABET)} operators are available, "
                f"{self.levels * self.ops} requested"
            )


@dataclass(frozen=True)
class GeneratedGrammar:
    """A generated grammar and the id of its digit matcher."""

    config: BenchConfig
    grammar: Grammar
    digit_id: int
    operators: tuple[tuple[str, ...], ...]


def operators_for(levels: int, ops: int) -> tuple[tuple[str, ...], ...]:
    """Operator characters per level, lowest precedence first, assigned level-major."""
    return tuple(
        tuple(OPERATOR_ALPHABET[level * ops : (level + 1) * ops])
        for level in range(levels)
    )


def _level_rule(level: int) -> str:
    """Rule name of precedence level ``level``."""
    return f"E{level}"


def _layered(
    b: GrammarBuilder, operators: Sequence[Sequence[str]], style: Style
) -> None:
    """Add one rule per level in the layered-right, idiomatic or layered-left shape."""
    levels = len(operators)
    for level, level_ops in enumerate(operators, start=1):
        this = _level_rule(level)
        below = DIGIT_RULE if level == levels else _level_rule(level + 1)
        if style is Style.IDIOMATIC:
            tails = [b.seq(b.literal(op), b.ref(below)) for op in level_ops]
            body = b.seq(b.ref(below), b.zero_or_more(b.choice(*tails)))
        else:
            arms: list[int] = []
            for op in level_ops:
                if style is Style.LAYERED_RIGHT:
                    arm = b.seq(b.ref(below), b.literal(op), b.ref(this))
                else:
                    arm = b.seq(b.ref(this), b.literal(op), b.ref(below))
                arms.append(b.capture(arm, op))
            body = b.choice(*arms, b.ref(below))
        b.rule(this, body)


def _cluster(
    b: GrammarBuilder, operators: Sequence[Sequence[str]], left_recur: bool
) -> None:
    """Add a single cluster rule holding every operator level."""
    root = _level_rule(1)
    groups = [ClusterGroup(len(operators) + 1, False, (b.ref(DIGIT_RULE),))]
    for level in range(len(operators), 0, -1):
        arms = tuple(
            b.capture(b.seq(b.ref(root), b.literal(op), b.ref(root)), op)
            for op in operators[level - 1]
        )
        groups.append(ClusterGroup(level, left_recur, arms))
    b.rule(root, b.cluster(groups))


def generate_grammar(config: BenchConfig) -> GeneratedGrammar:
    """Build and prepare the grammar for ``config``.

    Rules are ``E1`` (lowest precedence) to ``E<L>`` and the digit rule
    ``N``; the cluster style has the single rule ``E1``. Every operator
    application is captured under the operator's name and digits as ``num``.
    """
    operators = operators_for(config.levels, config.ops)
    b = GrammarBuilder()
    if config.style is Style.CLUSTER:
        _cluster(b, operators, config.left_recur)
    else:
        _layered(b, operators, config.style)
    digit_id = b.char_class(("0", "9"))
    b.rule(DIGIT_RULE, b.capture(digit_id, DIGIT_NODE, record_text=True))
    grammar = prepare_grammar(b.build(root=_level_rule(1))).grammar
    if config.memo:
        grammar = transform(grammar, MemoizeRules(grammar))
    return GeneratedGrammar(config, grammar, digit_id, operators)


class MemoizeRules:
    """Visitor wrapping every rule root in a memo expression."""

    def __init__(self, grammar: Grammar) -> None:
        self._roots = frozenset(grammar.rules.values())

    def rewrite(self, node: Expression, context: TransformContext) -> Expression:
        """Move rule roots under a fresh id behind a memo; leave other nodes alone."""
        if node.id not in self._roots:
            return node
        inner = context.add(node)
        return Expression(id=node.id, kind=Kind.MEMO, children=(inner,))


def generate_input(
    operators: Sequence[Sequence[str]], length: int, seed: int = 0
) -> str:
    """Random well-formed expression of at most ``length`` characters.

    The result always holds at least one digit.
    """
    rng = random.Random(seed)
    flat = [op for level_ops in operators for op in level_ops]
    parts = [rng.choice(string.digits)]
    size = 1
    while size + 2 <= length:
        parts.append(rng.choice(flat))
        parts.append(rng.choice(string.digits))
        size += 2
    return "".join(parts)


def _timed_parse(parser: Parser, text: str) -> tuple[ParseResult, float]:
    """Parse ``text`` and return the result with its wall time in milliseconds."""
    started = time.perf_counter()
    result = parser.parse(text)
    return result, (time.perf_counter() - started) * 1000.0


def measure(
    generated: GeneratedGrammar, text: str, reps: int = 1
) -> tuple[BenchRow, ParseResult]:
    """Parse ``text`` ``reps`` times.

    Counts come from the last run; wall time is the median of all runs.
    """
    if reps < 1:
        raise BenchConfigurationError("repetitions must be at least 1")
    parser = Parser(generated.grammar)
    runs = [_timed_parse(parser, text) for _ in range(reps)]
    result = runs[-1][0]
    timings = [elapsed for _, elapsed in runs]
    config = generated.config
    row: BenchRow = {
        "style": config.style.value + ("+memo" if config.memo else ""),
        "levels": config.levels,
        "ops": config.ops,
        "digit_invocations": result.state.invocation_counters[generated.digit_id],
        "total_invocations": result.state.invocation_counters.total(),
        "wall_ms": statistics.median(timings),
    }
    return row, result


@dataclass(frozen=True)
class BenchTables:
    """Rows of the single-digit and long-input experiments."""

    single_digit: list[BenchRow]
    long_input: list[BenchRow]


def run_bench(
    configs: Iterable[BenchConfig], input_length: int, reps: int, seed: int = 0
) -> BenchTables:
    """Run both experiments for every configuration, sequentially."""
    tables = BenchTables([], [])
    for config in configs:
        generated = generate_grammar(config)
        logger.info(
            "Benchmarking %s with L=%s P=%s", config.style, config.levels, config.ops
        )
        row, _ = measure(generated, "7", reps)
        tables.single_digit.append(row)
        text = generate_input(generated.operators, input_length, seed)
        row, result = measure(generated, text, reps)
        if not result.success or result.end != len(text):
            logger.warning("%s did not accept the whole generated input", config.style)
        tables.long_input.append(row)
    return tables


def format_table(title: str, rows: Iterable[BenchRow]) -> str:
    """Tab-separated table headed by a ``# title`` comment line."""
    lines = [f"# {title}", "\t".join(BENCH_COLUMNS)]
    for row in rows:
        lines.append(
            "\t".join(
                (
                    row["style"],
                    str(row["levels"]),
                    str(row["ops"]),
                    str(row["digit_invocations"]),
                    str(row["total_invocations"]),
                    f"{row['wall_ms']:.3f}",
                )
            )
        )
    return "\n".join(lines)


def collect_stats(
    result: ParseResult, grammar: Grammar, wall_ms: float, top: int = 10
) -> StatsReport:
    """Invocation statistics of a finished parse."""
    names = grammar.rule_names()
    counters = result.state.invocation_counters
    most_invoked: list[ExpressionCount] = [
        {
            "node_id": node_id,
            "label": names.get(node_id) or describe(grammar.node(node_id)),
            "invocations": count,
        }
        for node_id, count in counters.most_common(top)
    ]
    return {
        "total_invocations": counters.total(),
        "peak_seed_count": result.state.peak_seed_count,
        "wall_ms": wall_ms,
        "most_invoked": most_invoked,
    }


def format_stats(stats: StatsReport) -> str:
    """Render a stats report as ``# stats`` and ``# most invoked`` TSV blocks."""
    lines = [
        "# stats",
        f"total_invocations\t{stats['total_invocations']}",
        f"peak_seed_count\t{stats['peak_seed_count']}",
        f"wall_ms\t{stats['wall_ms']:.3f}",
        "# most invoked",
        "node\tlabel\tinvocations",
    ]
    lines.extend(
        f"{entry['node_id']}\t{entry['label']}\t{entry['invocations']}"
        for entry in stats["most_invoked"]
    )
    return "\n".join(lines)
