"""Grammar passes run before parsing.

Reference resolution, nullability, left-recursion cycle detection and
breaking, plus a visitor-driven transformation used for instrumentation.
"""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, replace
from typing import Protocol

from pegcluster.exceptions import (
    GrammarError,
    TransformError,
    UnresolvedReferenceError,
)
from pegcluster.expressions import (
    Expression,
    Grammar,
    Kind,
    describe,
    validate_expression,
)
from pegcluster.extensions import ExtensionMap

logger = logging.getLogger("pegcluster")

_ALWAYS_NULLABLE = frozenset(
    {Kind.OPTIONAL, Kind.ZERO_OR_MORE, Kind.AND_PREDICATE, Kind.NOT_PREDICATE}
)
_NEVER_NULLABLE = frozenset({Kind.CHAR_CLASS, Kind.ANY_CHAR})
_CYCLE_BREAKERS = frozenset({Kind.LEFT_RECURSIVE, Kind.CLUSTER})
_NO_LEFT_EDGES = frozenset(
    {
        Kind.LITERAL,
        Kind.CHAR_CLASS,
        Kind.ANY_CHAR,
        Kind.REFERENCE,
        Kind.AND_PREDICATE,
        Kind.NOT_PREDICATE,
    }
)


@dataclass(frozen=True)
class NullabilitySet:
    """Ids of expressions that can succeed without consuming input."""

    nullable: frozenset[int]

    def __contains__(self, node_id: int) -> bool:
        return node_id in self.nullable


@dataclass(frozen=True)
class MarkedNode:
    """A node wrapped by the cycle breaker."""

    node_id: int
    wrapper_id: int
    rule: str | None


@dataclass(frozen=True)
class PreparedGrammar:
    """A grammar ready for parsing, with the analysis that produced it."""

    grammar: Grammar
    nullable: NullabilitySet
    cycles: tuple[tuple[int, ...], ...]
    marked: tuple[MarkedNode, ...]


def _owner_rule(grammar: Grammar, target: int) -> str | None:
    """First rule whose body reaches ``target`` without crossing references."""
    for name, root in grammar.rules.items():
        seen: set[int] = set()
        stack = [root]
        while stack:
            node_id = stack.pop()
            if node_id == target:
                return name
            if node_id in seen:
                continue
            seen.add(node_id)
            stack.extend(grammar.nodes[node_id].children)
    return None


def resolve_references(grammar: Grammar) -> Grammar:
    """Replace every reference by a direct edge to the referenced rule's body."""
    if not any(node.kind is Kind.REFERENCE for node in grammar.nodes.values()):
        return grammar

    def target_of(node_id: int) -> int:
        chain: list[str] = []
        current = node_id
        while grammar.nodes[current].kind is Kind.REFERENCE:
            name = grammar.nodes[current].rule
            if name not in grammar.rules:
                raise UnresolvedReferenceError(name, _owner_rule(grammar, current))
            if name in chain:
                raise GrammarError(
                    f"rules {' -> '.join(chain)} only refer to each other"
                )
            chain.append(name)
            current = grammar.rules[name]
        return current

    targets = {node_id: target_of(node_id) for node_id in grammar.nodes}
    nodes = {
        node_id: node.with_children([targets[child] for child in node.children])
        for node_id, node in grammar.nodes.items()
        if node.kind is not Kind.REFERENCE
    }
    rules = {name: targets[node_id] for name, node_id in grammar.rules.items()}
    whitespace = None if grammar.whitespace is None else targets[grammar.whitespace]
    return Grammar.create(nodes, rules, grammar.root, whitespace, grammar.extensions)


def _is_nullable(node: Expression, nullable: set[int]) -> bool:
    """Whether ``node`` can succeed empty, given the nullable set so far."""
    kind = node.kind
    if kind in _ALWAYS_NULLABLE:
        return True
    if kind in _NEVER_NULLABLE:
        return False
    if kind is Kind.LITERAL:
        return node.text == ""
    if kind is Kind.SEQUENCE:
        return all(child in nullable for child in node.children)
    if kind in (Kind.CHOICE, Kind.CLUSTER):
        return any(child in nullable for child in node.children)
    return node.child in nullable


def compute_nullable(grammar: Grammar) -> NullabilitySet:
    """Least fixpoint of the "can succeed consuming no input" relation."""
    if any(node.kind is Kind.REFERENCE for node in grammar.nodes.values()):
        raise GrammarError("nullability needs a grammar with resolved references")
    nullable: set[int] = set()
    changed = True
    while changed:
        changed = False
        for node in grammar.iter_nodes():
            if node.id not in nullable and _is_nullable(node, nullable):
                nullable.add(node.id)
                changed = True
    return NullabilitySet(frozenset(nullable))


def left_edges(
    grammar: Grammar, nullability: NullabilitySet, skip_breakers: bool = False
) -> dict[int, list[int]]:
    """Edges to children that may be invoked at their parent's start position."""
    edges: dict[int, list[int]] = {}
    for node in grammar.iter_nodes():
        targets: list[int] = []
        if node.kind in _NO_LEFT_EDGES or (
            skip_breakers and node.kind in _CYCLE_BREAKERS
        ):
            pass
        elif node.kind is Kind.SEQUENCE:
            for child in node.children:
                targets.append(child)
                if child not in nullability:
                    break
        else:
            targets.extend(node.children)
        edges[node.id] = targets
    return edges


def _strongly_connected(edges: Mapping[int, list[int]]) -> list[tuple[int, ...]]:
    """Iterative Tarjan; returns components that form cycles, sorted by smallest id."""
    index: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    components: list[tuple[int, ...]] = []
    counter = 0

    for start in sorted(edges):
        if start in index:
            continue
        work: list[tuple[int, int]] = [(start, 0)]
        while work:
            node_id, child_pos = work.pop()
            if child_pos == 0:
                index[node_id] = lowlink[node_id] = counter
                counter += 1
                stack.append(node_id)
                on_stack.add(node_id)
            targets = edges.get(node_id, [])
            if child_pos < len(targets):
                work.append((node_id, child_pos + 1))
                target = targets[child_pos]
                if target not in index:
                    work.append((target, 0))
                elif target in on_stack:
                    lowlink[node_id] = min(lowlink[node_id], index[target])
                continue
            if lowlink[node_id] == index[node_id]:
                component: list[int] = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node_id:
                        break
                if len(component) > 1 or node_id in edges.get(node_id, []):
                    components.append(tuple(sorted(component)))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node_id])
    return sorted(components, key=lambda component: component[0])


def detect_left_cycles(
    grammar: Grammar, nullability: NullabilitySet
) -> list[tuple[int, ...]]:
    """Strongly connected components of the left-edge relation that contain a cycle."""
    return _strongly_connected(left_edges(grammar, nullability))


def _pick_breaker(grammar: Grammar, cycle: Iterable[int]) -> int:
    """Alphabetically first rule root in the cycle, else its lowest id."""
    members = set(cycle)
    named = sorted(
        (name, node_id) for name, node_id in grammar.rules.items() if node_id in members
    )
    if named:
        return named[0][1]
    return min(members)


def _wrap_left_recursive(grammar: Grammar, node_id: int) -> tuple[Grammar, int]:
    """Insert a right-associative left-recursive wrapper above ``node_id``."""
    wrapper_id = grammar.next_id()

    def redirect(target: int) -> int:
        return wrapper_id if target == node_id else target

    nodes = {
        other_id: node.with_children([redirect(child) for child in node.children])
        for other_id, node in grammar.nodes.items()
    }
    nodes[wrapper_id] = Expression(
        id=wrapper_id, kind=Kind.LEFT_RECURSIVE, children=(node_id,)
    )
    rules = {name: redirect(target) for name, target in grammar.rules.items()}
    whitespace = None if grammar.whitespace is None else redirect(grammar.whitespace)
    wrapped = Grammar.create(nodes, rules, grammar.root, whitespace, grammar.extensions)
    return wrapped, wrapper_id


def break_cycles_with_report(
    grammar: Grammar, cycles: Iterable[Iterable[int]]
) -> tuple[Grammar, list[MarkedNode]]:
    """Break left-recursive cycles, returning the grammar and the wrapped nodes."""
    marked: list[MarkedNode] = []
    pending = [
        tuple(cycle)
        for cycle in cycles
        if not any(grammar.nodes[node_id].kind in _CYCLE_BREAKERS for node_id in cycle)
    ]
    current = grammar
    while pending:
        for cycle in pending:
            node_id = _pick_breaker(current, cycle)
            rule = current.rule_names().get(node_id)
            current, wrapper_id = _wrap_left_recursive(current, node_id)
            marked.append(MarkedNode(node_id, wrapper_id, rule))
            logger.info(
                "Marked %s as left-recursive to break a cycle of %s nodes",
                rule or describe(current.nodes[node_id]),
                len(cycle),
            )
        # One wrapper per component may leave inner cycles.
        nullability = compute_nullable(current)
        pending = _strongly_connected(
            left_edges(current, nullability, skip_breakers=True)
        )
    return current, marked


def break_cycles(grammar: Grammar, cycles: Iterable[Iterable[int]]) -> Grammar:
    """Make every left-recursive cycle pass through a left-recursive wrapper."""
    return break_cycles_with_report(grammar, cycles)[0]


class TransformContext:
    """Allocates ids for auxiliary nodes created by a visitor."""

    def __init__(self, next_id: int) -> None:
        self._next_id = next_id
        self.added: dict[int, Expression] = {}

    def add(self, expression: Expression) -> int:
        """Add ``expression`` under a fresh id and return the id."""
        node_id = self._next_id
        self._next_id += 1
        self.added[node_id] = validate_expression(replace(expression, id=node_id))
        return node_id


class ExpressionVisitor(Protocol):
    """Per-node rewrite used by :func:`transform`."""

    def rewrite(self, node: Expression, context: TransformContext) -> Expression:
        """Return the replacement for ``node``; its id is kept by the caller."""


class IdentityVisitor:
    """Visitor that leaves every node unchanged."""

    def rewrite(self, node: Expression, context: TransformContext) -> Expression:
        """Return ``node`` unchanged."""
        del context
        return node


def _postorder(grammar: Grammar) -> list[int]:
    """Reachable node ids, children before parents."""
    seen: set[int] = set()
    order: list[int] = []
    for entry in grammar.entry_points():
        if entry in seen:
            continue
        seen.add(entry)
        work: list[tuple[int, int]] = [(entry, 0)]
        while work:
            node_id, child_pos = work.pop()
            children = grammar.nodes[node_id].children
            if child_pos < len(children):
                work.append((node_id, child_pos + 1))
                child = children[child_pos]
                if child not in seen:
                    seen.add(child)
                    work.append((child, 0))
            else:
                order.append(node_id)
    return order


def transform(grammar: Grammar, visitor: ExpressionVisitor) -> Grammar:
    """Rewrite every reachable node once, children before parents.

    The replacement of node ``n`` keeps id ``n``, so edges into ``n`` now
    lead to the replacement. Cycles are visited once thanks to the id-keyed
    traversal. The input grammar is left untouched.
    """
    context = TransformContext(grammar.next_id())
    nodes: dict[int, Expression] = {}
    for node_id in _postorder(grammar):
        try:
            rewritten = visitor.rewrite(grammar.nodes[node_id], context)
            nodes[node_id] = validate_expression(replace(rewritten, id=node_id))
        except Exception as exc:
            raise TransformError(node_id, str(exc) or type(exc).__name__) from exc
    nodes.update(context.added)
    extensions: dict[int, ExtensionMap] = {
        node_id: ext for node_id, ext in grammar.extensions.items() if node_id in nodes
    }
    return Grammar.create(
        nodes, grammar.rules, grammar.root, grammar.whitespace, extensions
    )


def _shape(node: Expression) -> tuple[object, ...]:
    """Structure of ``node`` without ids, for isomorphism checks."""
    return (
        node.kind,
        len(node.children),
        node.text,
        node.ranges,
        node.rule,
        node.left_assoc,
        node.level,
        tuple(
            (group.precedence, group.left_assoc, len(group.ops))
            for group in node.groups
        ),
        node.label,
        node.record_text,
        node.strategy,
    )


def isomorphic(first: Grammar, second: Grammar) -> bool:
    """Whether the graphs reachable from the roots and whitespace rules match."""
    pairs: list[tuple[int, int]] = [(first.root_id, second.root_id)]
    if (first.whitespace is None) != (second.whitespace is None):
        return False
    if first.whitespace is not None and second.whitespace is not None:
        pairs.append((first.whitespace, second.whitespace))
    forward: dict[int, int] = {}
    backward: dict[int, int] = {}
    while pairs:
        left, right = pairs.pop()
        if left in forward or right in backward:
            if forward.get(left) != right or backward.get(right) != left:
                return False
            continue
        forward[left] = right
        backward[right] = left
        left_node, right_node = first.nodes[left], second.nodes[right]
        if _shape(left_node) != _shape(right_node):
            return False
        pairs.extend(zip(left_node.children, right_node.children))
    return True


def prepare_grammar(grammar: Grammar) -> PreparedGrammar:
    """Resolve references, analyse nullability and break left-recursive cycles."""
    resolved = resolve_references(grammar)
    nullable = compute_nullable(resolved)
    cycles = detect_left_cycles(resolved, nullable)
    broken, marked = break_cycles_with_report(resolved, cycles)
    if marked:
        nullable = compute_nullable(broken)
    logger.debug(
        "Prepared grammar: %s rules, %s nodes, %s left-recursive cycles",
        len(broken.rules),
        len(broken.nodes),
        len(cycles),
    )
    return PreparedGrammar(broken, nullable, tuple(cycles), tuple(marked))
