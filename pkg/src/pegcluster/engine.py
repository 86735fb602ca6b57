"""Parse driver: dispatch over expression kinds and the primitive PEG operators."""

import logging
import sys
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field, replace

from pegcluster.capture import parse_capture, parse_token
from pegcluster.cluster import parse_cluster
from pegcluster.diagnostics import (
    ErrorHandler,
    ErrorHandlerFactory,
    ErrorReport,
    farthest_error_handler,
)
from pegcluster.exceptions import GrammarError, NestingDepthError
from pegcluster.expressions import Expression, Grammar, Kind, describe
from pegcluster.extensions import Absent, ExtensionKey
from pegcluster.leftrec import parse_escape, parse_left_recursive, parse_precedence
from pegcluster.memo import (
    MemoStrategy,
    MemoStrategyFactory,
    check_strategies,
    default_memo_strategies,
    parse_memo,
)
from pegcluster.state import FAILURE, Frame, Invoker, ParseOutcome, ParseState
from pegcluster.syntax import SyntaxNode
from pegcluster.tracing import TraceSink, parse_trace

logger = logging.getLogger("pegcluster")

END_OF_INPUT = Expression(
    id=-1, kind=Kind.NOT_PREDICATE, children=(-1,), label="end of input"
)
MEMO_TABLES: ExtensionKey[dict[str, MemoStrategy]] = ExtensionKey("memo.tables")
RECURSION_LIMIT = 200_000


@dataclass(frozen=True)
class ParserOptions:
    """Per-parser configuration. Factories are called once per parse."""

    full_match: bool = False
    memo_strategies: Mapping[str, MemoStrategyFactory] = field(
        default_factory=default_memo_strategies
    )
    error_handler: ErrorHandlerFactory = farthest_error_handler
    trace_sink: TraceSink | None = None


@dataclass(frozen=True)
class ParseResult:
    """Outcome of a top-level parse together with its final state."""

    outcome: ParseOutcome
    state: ParseState
    report: ErrorReport

    @property
    def success(self) -> bool:
        """Whether the parse succeeded."""
        return self.outcome.success

    @property
    def end(self) -> int:
        """End position of a successful parse."""
        return self.outcome.end

    @property
    def nodes(self) -> tuple[SyntaxNode, ...]:
        """Top-level syntax nodes of a successful parse."""
        return self.outcome.nodes


type ExpressionRoutine = Callable[
    [ParseSession, Expression, ParseState], ParseOutcome
]


def parse_literal(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Match ``expression.text`` at the current position."""
    del parser
    if state.input.startswith(expression.text, state.position):
        return ParseOutcome(True, state.position + len(expression.text))
    return FAILURE


def parse_char_class(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Match one character inside any of the class ranges."""
    del parser
    position = state.position
    if position < len(state.input):
        char = state.input[position]
        for char_range in expression.ranges:
            if char in char_range:
                return ParseOutcome(True, position + 1)
    return FAILURE


def parse_any_char(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Match any single character."""
    del parser, expression
    if state.position < len(state.input):
        return ParseOutcome(True, state.position + 1)
    return FAILURE


def parse_sequence(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Match every child in order, collecting their nodes."""
    nodes: list[SyntaxNode] = []
    for child in expression.children:
        outcome = parser.invoke(child, state)
        if not outcome.success:
            return FAILURE
        nodes.extend(outcome.nodes)
    return ParseOutcome(True, state.position, tuple(nodes))


def parse_choice(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Return the first child that succeeds."""
    for child in expression.children:
        outcome = parser.invoke(child, state)
        if outcome.success:
            return outcome
    return FAILURE


def _repeat(
    parser: Invoker, child: int, state: ParseState, minimum: int
) -> ParseOutcome:
    """Match ``child`` greedily, stopping on failure or on an empty match."""
    nodes: list[SyntaxNode] = []
    count = 0
    while True:
        before = state.position
        outcome = parser.invoke(child, state)
        if not outcome.success:
            break
        count += 1
        nodes.extend(outcome.nodes)
        if outcome.end == before:
            break
    if count < minimum:
        return FAILURE
    return ParseOutcome(True, state.position, tuple(nodes))


def parse_zero_or_more(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Match the child as often as possible."""
    return _repeat(parser, expression.child, state, 0)


def parse_one_or_more(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Match the child at least once, then as often as possible."""
    return _repeat(parser, expression.child, state, 1)


def parse_optional(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Match the child, or succeed without consuming."""
    outcome = parser.invoke(expression.child, state)
    if outcome.success:
        return outcome
    return ParseOutcome(True, state.position)


def _lookahead(parser: Invoker, child: int, state: ParseState) -> bool:
    """Whether ``child`` matches here; position and watermarks are left unchanged."""
    start = state.position
    marks = state.whitespace_marks()
    outcome = parser.invoke(child, state)
    state.position = start
    state.restore_marks(marks)
    return outcome.success


def parse_and_predicate(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Succeed without consuming when the child matches."""
    if _lookahead(parser, expression.child, state):
        return ParseOutcome(True, state.position)
    return FAILURE


def parse_not_predicate(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Succeed without consuming when the child fails."""
    state.silent_depth += 1
    try:
        matched = _lookahead(parser, expression.child, state)
    finally:
        state.silent_depth -= 1
    if matched:
        return FAILURE
    return ParseOutcome(True, state.position)


def parse_reference(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """References never reach a parser; prepared grammars have none."""
    del parser, state
    raise GrammarError(f"unresolved reference {expression.rule} reached the parser")


ROUTINES: Mapping[Kind, ExpressionRoutine] = {
    Kind.LITERAL: parse_literal,
    Kind.CHAR_CLASS: parse_char_class,
    Kind.ANY_CHAR: parse_any_char,
    Kind.SEQUENCE: parse_sequence,
    Kind.CHOICE: parse_choice,
    Kind.ZERO_OR_MORE: parse_zero_or_more,
    Kind.ONE_OR_MORE: parse_one_or_more,
    Kind.OPTIONAL: parse_optional,
    Kind.AND_PREDICATE: parse_and_predicate,
    Kind.NOT_PREDICATE: parse_not_predicate,
    Kind.REFERENCE: parse_reference,
    Kind.LEFT_RECURSIVE: parse_left_recursive,
    Kind.PRECEDENCE: parse_precedence,
    Kind.CLUSTER: parse_cluster,
    Kind.CAPTURE: parse_capture,
    Kind.TOKEN: parse_token,
    Kind.MEMO: parse_memo,
    Kind.ESCAPE: parse_escape,
    Kind.TRACE: parse_trace,
}


def _frame_labels(grammar: Grammar) -> tuple[dict[int, str], frozenset[int]]:
    """Labels of the nodes that open an error-reporting frame, and the token ids."""
    labels: dict[int, str] = dict(grammar.rule_names())
    tokens: set[int] = set()
    for node in grammar.iter_nodes():
        if node.kind is Kind.CAPTURE:
            labels[node.id] = node.label
        elif node.kind is Kind.TOKEN:
            tokens.add(node.id)
            labels[node.id] = (
                node.label
                or labels.get(node.id)
                or describe(grammar.node(node.child))
            )
    return labels, frozenset(tokens)


class Parser:
    """Parses text with one grammar. Safe to share; every parse gets its own session."""

    def __init__(self, grammar: Grammar, options: ParserOptions | None = None) -> None:
        self.grammar = grammar
        self.options = options or ParserOptions()
        unresolved = [
            node.rule for node in grammar.iter_nodes() if node.kind is Kind.REFERENCE
        ]
        if unresolved:
            raise GrammarError(
                f"grammar still has references ({', '.join(sorted(set(unresolved)))}); "
                "prepare it before parsing"
            )
        check_strategies(
            {node.strategy for node in grammar.iter_nodes() if node.kind is Kind.MEMO},
            self.options.memo_strategies,
        )
        self.labels, self.tokens = _frame_labels(grammar)

    def session(self, text: str) -> "ParseSession":
        """Fresh session over ``text``, for driving invocations by hand."""
        if sys.getrecursionlimit() < RECURSION_LIMIT:
            sys.setrecursionlimit(RECURSION_LIMIT)
        return ParseSession(self, text)

    def parse(self, text: str) -> ParseResult:
        """Invoke the root rule at position 0.

        Raises:
            NestingDepthError: The input recursed past ``RECURSION_LIMIT`` frames
        """
        session = self.session(text)
        state = session.state
        logger.debug("Parsing %s characters from rule %s", len(text), self.grammar.root)
        try:
            outcome = session.invoke(self.grammar.root_id, state)
        except RecursionError:
            raise NestingDepthError(len(text)) from None
        if outcome.success and self.options.full_match and outcome.end < len(text):
            session.handler.on_failure(END_OF_INPUT, outcome.end, state)
            state.position = 0
            outcome = FAILURE
        report = session.handler.report(state)
        logger.debug(
            "Parse %s after %s invocations",
            f"ended at {outcome.end}" if outcome.success else "failed",
            state.invocation_counters.total(),
        )
        return ParseResult(outcome, state, report)


class ParseSession:
    """One parse: the state, the error handler and the per-parse memo tables."""

    def __init__(self, parser: Parser, text: str) -> None:
        self._parser = parser
        self._nodes = parser.grammar.nodes
        self._labels = parser.labels
        self._tokens = parser.tokens
        self.state = ParseState(text)
        self.handler: ErrorHandler = parser.options.error_handler()

    @property
    def grammar(self) -> Grammar:
        """Grammar being parsed."""
        return self._parser.grammar

    @property
    def trace_sink(self) -> TraceSink | None:
        """Receiver of trace lines, or None to log them."""
        return self._parser.options.trace_sink

    def memo_strategy(self, selector: str, state: ParseState) -> MemoStrategy:
        """The table for ``selector``, created on first use in this parse."""
        tables = state.extensions.get(MEMO_TABLES)
        if isinstance(tables, Absent):
            tables = {}
            state.extensions.set(MEMO_TABLES, tables)
        strategy = tables.get(selector)
        if strategy is None:
            strategy = self._parser.options.memo_strategies[selector]()
            tables[selector] = strategy
        return strategy

    def invoke(self, node_id: int, state: ParseState) -> ParseOutcome:
        """Invoke expression ``node_id`` at ``state.position``.

        On success the position moves to the outcome's end and the whitespace
        watermarks are those the outcome carries; an outcome replayed from a
        seed or a memo table brings its own, a fresh one is stamped with the
        current ones. On failure the position and the watermarks go back to
        their entry values and the error handler hears about it.
        """
        expression = self._nodes[node_id]
        state.invocation_counters[node_id] += 1
        start = state.position
        watermark = state.non_whitespace_watermark
        token_end = state.token_end
        label = self._labels.get(node_id)
        if label is not None:
            state.frames.append(Frame(label, start, node_id in self._tokens))
        try:
            outcome = ROUTINES[expression.kind](self, expression, state)
            if outcome.success:
                state.position = outcome.end
                if outcome.marks is None:
                    outcome = ParseOutcome(
                        True, outcome.end, outcome.nodes, state.whitespace_marks()
                    )
                else:
                    state.restore_marks(outcome.marks)
            else:
                state.position = start
                state.non_whitespace_watermark = watermark
                state.token_end = token_end
                if state.reporting_failures:
                    self.handler.on_failure(expression, start, state)
        finally:
            if label is not None:
                state.frames.pop()
        return outcome

    def invoke_at(self, node_id: int, position: int) -> ParseOutcome:
        """Invoke ``node_id`` at ``position`` in this session's state."""
        if not 0 <= position <= len(self.state.input):
            raise ValueError(f"position {position} is outside the input")
        self.state.position = position
        return self.invoke(node_id, self.state)


def parse_root(
    grammar: Grammar,
    text: str,
    *,
    full_match: bool | None = None,
    options: ParserOptions | None = None,
) -> ParseResult:
    """Parse ``text`` with a prepared grammar.

    ``full_match``, when given, overrides the flag in ``options``.
    """
    base = options or ParserOptions()
    if full_match is not None:
        base = replace(base, full_match=full_match)
    return Parser(grammar, base).parse(text)
