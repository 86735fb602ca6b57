"""Expression clusters: precedence, left-recursion and associativity in one operator."""

from collections.abc import Sequence
from dataclasses import dataclass

from pegcluster.exceptions import ClusterDefinitionError
from pegcluster.expressions import ClusterGroup, Expression, Kind, build_expression
from pegcluster.state import FAILURE, Invoker, ParseOutcome, ParseState


@dataclass(frozen=True)
class AnnotatedAlternate:
    """A cluster alternate with its ``@+`` count and ``@left_recur`` flag."""

    expression: int
    increments: int = 0
    left_recur: bool = False


def cluster_groups_from_alternates(
    alternates: Sequence[AnnotatedAlternate],
) -> tuple[ClusterGroup, ...]:
    """Group annotated alternates by precedence, highest precedence first.

    Precedence starts at 0 and every ``@+`` raises it for the alternate it
    follows; alternates without ``@+`` join the previous level. Associativity
    is declared on the first alternate of a level only.
    """
    if not alternates:
        raise ClusterDefinitionError("cluster needs at least one alternate")
    levels: dict[int, tuple[bool, list[int]]] = {}
    precedence = 0
    for index, alternate in enumerate(alternates, start=1):
        if alternate.increments < 0:
            raise ClusterDefinitionError(f"alternate {index} lowers the precedence")
        precedence += alternate.increments
        if precedence == 0:
            raise ClusterDefinitionError(
                f"alternate {index} has precedence 0; annotate it with @+"
            )
        if alternate.increments == 0:
            if alternate.left_recur:
                raise ClusterDefinitionError(
                    f"alternate {index}: @left_recur belongs on the first alternate "
                    f"of precedence level {precedence}"
                )
            levels[precedence][1].append(alternate.expression)
        else:
            levels[precedence] = (alternate.left_recur, [alternate.expression])
    return tuple(
        ClusterGroup(level, left_assoc, tuple(ops))
        for level, (left_assoc, ops) in sorted(levels.items(), reverse=True)
    )


def cluster_from_alternates(
    alternates: Sequence[AnnotatedAlternate], *, node_id: int = 0
) -> Expression:
    """Build a cluster expression from annotated alternates."""
    groups = cluster_groups_from_alternates(alternates)
    children = [op for group in groups for op in group.ops]
    return build_expression(Kind.CLUSTER, children, node_id=node_id, groups=groups)


def parse_cluster(
    parser: Invoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Grow a seed over the cluster's groups, from highest to lowest precedence.

    Growth restarts the scan from the highest-precedence group. The
    cluster's entry in ``state.precedences`` bounds which groups a recursive
    invocation may use; left-associative groups add one so they cannot
    re-enter themselves.
    """
    position = state.position
    seed = state.get_seed(position, expression.id)
    if seed is not None:
        return seed

    current = FAILURE
    state.put_seed(position, expression.id, FAILURE)
    entry_precedence = state.precedences.get(expression.id)
    min_precedence = entry_precedence or 0
    depth = state.cluster_depth.get(expression.id, 0) + 1
    state.cluster_depth[expression.id] = depth
    state.suppression_depth += 1

    grown = True
    while grown:
        grown = False
        for group in expression.groups:
            if group.precedence < min_precedence:
                break
            level = group.precedence + (1 if group.left_assoc else 0)
            for op in group.ops:
                # Nested invocations may have moved the entry.
                state.precedences[expression.id] = level
                state.position = position
                result = parser.invoke(op, state)
                if result.consumed_more_than(current):
                    current = result
                    state.put_seed(position, expression.id, result)
                    grown = True
                    break
            if grown:
                break

    state.suppression_depth -= 1
    state.remove_seed(position, expression.id)
    if depth == 1:
        del state.cluster_depth[expression.id]
        state.precedences.pop(expression.id, None)
    else:
        state.cluster_depth[expression.id] = depth - 1
        if entry_precedence is None:
            state.precedences.pop(expression.id, None)
        else:
            state.precedences[expression.id] = entry_precedence
    return current
