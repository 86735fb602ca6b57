"""Left-recursion with selectable associativity, the escape operator and precedence."""

from pegcluster.expressions import Expression
from pegcluster.state import FAILURE, Invoker, ParseOutcome, ParseState


def parse_left_recursive(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Grow a seed for ``expression`` at the current position until it stops growing.

    Recursive invocations at the same position return the current seed, so
    the first pass parses the base case and every further pass allows one
    more left recursion. A left-associative expression is blocked while it
    grows, which leaves recursion in left position as the only way back in.
    """
    position = state.position
    seed = state.get_seed(position, expression.id)
    if seed is not None:
        return seed
    if expression.id in state.blocked:
        return FAILURE

    current = FAILURE
    state.put_seed(position, expression.id, FAILURE)
    if expression.left_assoc:
        state.blocked.add(expression.id)
    state.suppression_depth += 1

    while True:
        state.position = position
        result = parser.invoke(expression.child, state)
        if not result.consumed_more_than(current):
            break
        current = result
        state.put_seed(position, expression.id, result)

    state.suppression_depth -= 1
    state.remove_seed(position, expression.id)
    if expression.left_assoc:
        state.blocked.discard(expression.id)
    return current


def parse_escape(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Parse the operand with recursion blocking and precedence limits suspended."""
    blocked = state.blocked
    precedences = state.precedences
    current_precedence = state.current_precedence
    state.blocked = set()
    state.precedences = {}
    state.current_precedence = 0
    try:
        return parser.invoke(expression.child, state)
    finally:
        state.blocked = blocked
        state.precedences = precedences
        state.current_precedence = current_precedence


def parse_precedence(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Fail below the current precedence, otherwise parse the operand at this level."""
    if expression.level < state.current_precedence:
        return FAILURE
    saved = state.current_precedence
    state.current_precedence = expression.level
    try:
        return parser.invoke(expression.child, state)
    finally:
        state.current_precedence = saved
