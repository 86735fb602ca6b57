"""Execution tracing through Trace expressions."""

import logging
from collections.abc import Callable
from typing import Protocol

from pegcluster.expressions import Expression, Grammar, Kind, describe
from pegcluster.extensions import Absent, ExtensionKey
from pegcluster.passes import TransformContext
from pegcluster.state import (
    Invoker,
    ParseOutcome,
    ParseState,
    read_extension,
    write_extension,
)

logger = logging.getLogger("pegcluster")

type TraceSink = Callable[[str], None]

TRACE_DEPTH: ExtensionKey[int] = ExtensionKey("trace.depth")


class TraceInvoker(Invoker, Protocol):
    """Invoker that knows where trace lines go."""

    @property
    def trace_sink(self) -> TraceSink | None:
        """Receiver of trace lines, or None to log them."""


def trace_depth(state: ParseState) -> int:
    """Number of Trace invocations currently on the stack."""
    depth = read_extension(state, TRACE_DEPTH)
    return 0 if isinstance(depth, Absent) else depth


def parse_trace(
    parser: TraceInvoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Parse the operand and emit ``<label> @<start> -> <end|fail>``, indented."""
    depth = trace_depth(state)
    start = state.position
    write_extension(state, TRACE_DEPTH, depth + 1)
    try:
        outcome = parser.invoke(expression.child, state)
    finally:
        write_extension(state, TRACE_DEPTH, depth)
    result = str(outcome.end) if outcome.success else "fail"
    line = f"{'  ' * depth}{expression.label} @{start} -> {result}"
    sink = parser.trace_sink
    if sink is None:
        logger.debug("trace: %s", line)
    else:
        sink(line)
    return outcome


class TraceVisitor:
    """Wraps every node in a Trace expression labelled by rule name or description."""

    def __init__(self, grammar: Grammar) -> None:
        self._rule_names = grammar.rule_names()

    def rewrite(self, node: Expression, context: TransformContext) -> Expression:
        """Move ``node`` under a fresh id and return a Trace pointing at it."""
        label = self._rule_names.get(node.id) or describe(node)
        inner = context.add(node)
        return Expression(id=node.id, kind=Kind.TRACE, children=(inner,), label=label)
