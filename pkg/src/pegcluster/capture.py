"""Capture and token expressions."""

from pegcluster.expressions import Expression
from pegcluster.state import FAILURE, Invoker, ParseOutcome, ParseState
from pegcluster.syntax import SyntaxNode


def parse_capture(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Wrap the operand's nodes in a new node named by the capture.

    With ``record_text`` set, the matched text is recorded, minus any
    whitespace a trailing token skipped.
    """
    start = state.position
    outcome = parser.invoke(expression.child, state)
    if not outcome.success:
        return FAILURE
    text: str | None = None
    if expression.record_text:
        text_end = outcome.end
        if state.token_end == outcome.end:
            text_end = max(start, state.non_whitespace_watermark)
        text = state.input[start:text_end]
    node = SyntaxNode(expression.label, start, outcome.end, text, outcome.nodes)
    return ParseOutcome(True, outcome.end, (node,))


def parse_token(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Parse the operand, then skip the grammar's whitespace.

    A failing whitespace expression leaves the token ending where its
    operand ended. Failures while skipping are not reported.
    """
    outcome = parser.invoke(expression.child, state)
    if not outcome.success:
        return FAILURE
    end = outcome.end
    whitespace = parser.grammar.whitespace
    if whitespace is not None:
        state.silent_depth += 1
        try:
            skipped = parser.invoke(whitespace, state)
        finally:
            state.silent_depth -= 1
        if skipped.success:
            end = skipped.end
    state.non_whitespace_watermark = outcome.end
    state.token_end = end
    return ParseOutcome(True, end, outcome.nodes)
