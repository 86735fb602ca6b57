"""Parsing expression graph: expression records, grammars and builders.

A grammar is a graph of :class:`Expression` records indexed by integer id.
Edges are child ids, so the graph may be cyclic once references are
resolved. Records and grammars are immutable; passes return new grammars.
"""

from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum
from types import MappingProxyType

from pegcluster.exceptions import ExpressionArityError, GrammarError
from pegcluster.extensions import EMPTY_EXTENSIONS, ExtensionKey, ExtensionMap


class Kind(StrEnum):
    """Expression kinds understood by the engine."""

    LITERAL = "Literal"
    CHAR_CLASS = "CharClass"
    ANY_CHAR = "AnyChar"
    SEQUENCE = "Sequence"
    CHOICE = "Choice"
    ZERO_OR_MORE = "ZeroOrMore"
    ONE_OR_MORE = "OneOrMore"
    OPTIONAL = "Optional"
    AND_PREDICATE = "AndPredicate"
    NOT_PREDICATE = "NotPredicate"
    REFERENCE = "Reference"
    LEFT_RECURSIVE = "LeftRecursive"
    PRECEDENCE = "Precedence"
    CLUSTER = "Cluster"
    CAPTURE = "Capture"
    TOKEN = "Token"
    MEMO = "Memo"
    ESCAPE = "EscapeLeftBlock"
    TRACE = "Trace"


LEAF_KINDS = frozenset({Kind.LITERAL, Kind.CHAR_CLASS, Kind.ANY_CHAR, Kind.REFERENCE})
VARIADIC_KINDS = frozenset({Kind.SEQUENCE, Kind.CHOICE, Kind.CLUSTER})
TERMINAL_KINDS = frozenset({Kind.LITERAL, Kind.CHAR_CLASS, Kind.ANY_CHAR})


@dataclass(frozen=True, slots=True)
class CharRange:
    """Inclusive range of Unicode scalar values."""

    low: str
    high: str

    def __contains__(self, char: str) -> bool:
        return self.low <= char <= self.high


@dataclass(frozen=True, slots=True)
class ClusterGroup:
    """Cluster alternates sharing one precedence level and associativity."""

    precedence: int
    left_assoc: bool
    ops: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Expression:
    """One node of the parsing expression graph.

    Only the attributes relevant to ``kind`` are meaningful: ``text`` for
    literals, ``ranges`` for character classes, ``rule`` for references,
    ``left_assoc`` for left-recursive wrappers, ``level`` for precedence
    wrappers, ``groups`` for clusters, ``label`` for captures, tokens and
    traces, ``record_text`` for captures and ``strategy`` for memo nodes.
    """

    id: int
    kind: Kind
    children: tuple[int, ...] = ()
    text: str = ""
    ranges: tuple[CharRange, ...] = ()
    rule: str = ""
    left_assoc: bool = False
    level: int = 0
    groups: tuple[ClusterGroup, ...] = ()
    label: str = ""
    record_text: bool = False
    strategy: str = "default"

    @property
    def child(self) -> int:
        """The operand of a single-child expression."""
        return self.children[0]

    def with_children(self, children: Sequence[int]) -> "Expression":
        """Return a copy with new child edges (cluster groups follow along)."""
        new_children = tuple(children)
        if self.kind is not Kind.CLUSTER:
            return replace(self, children=new_children)
        groups: list[ClusterGroup] = []
        offset = 0
        for group in self.groups:
            size = len(group.ops)
            groups.append(replace(group, ops=new_children[offset : offset + size]))
            offset += size
        return replace(self, children=new_children, groups=tuple(groups))


def _check_arity(kind: Kind, children: tuple[int, ...]) -> None:
    """Reject a child count the kind does not allow."""
    if kind in LEAF_KINDS:
        if children:
            raise ExpressionArityError(f"{kind} takes no children, got {len(children)}")
    elif kind in VARIADIC_KINDS:
        if kind is not Kind.SEQUENCE and not children:
            raise ExpressionArityError(f"{kind} needs at least one child")
    elif len(children) != 1:
        raise ExpressionArityError(
            f"{kind} takes exactly one child, got {len(children)}"
        )


def _check_cluster(groups: tuple[ClusterGroup, ...], children: tuple[int, ...]) -> None:
    """Reject groups that disagree with the children or out-of-order levels."""
    flattened = tuple(op for group in groups for op in group.ops)
    if flattened != children:
        raise ExpressionArityError(
            "cluster children must list the group alternates in order"
        )
    previous: int | None = None
    for group in groups:
        if group.precedence < 1:
            raise ExpressionArityError("cluster group precedence must be at least 1")
        if not group.ops:
            raise ExpressionArityError("cluster group has no alternates")
        if previous is not None and group.precedence >= previous:
            raise ExpressionArityError(
                "cluster groups must have strictly decreasing precedence"
            )
        previous = group.precedence


def validate_expression(expression: Expression) -> Expression:
    """Check arity and attribute constraints, returning the expression."""
    _check_arity(expression.kind, expression.children)
    if expression.kind is Kind.PRECEDENCE and expression.level < 0:
        raise ExpressionArityError(f"negative precedence {expression.level}")
    if expression.kind is Kind.CHAR_CLASS:
        for char_range in expression.ranges:
            if len(char_range.low) != 1 or len(char_range.high) != 1:
                raise ExpressionArityError("character ranges bound single characters")
            if char_range.low > char_range.high:
                raise ExpressionArityError(
                    f"empty character range {char_range.low}-{char_range.high}"
                )
    if expression.kind is Kind.REFERENCE and not expression.rule:
        raise ExpressionArityError("reference needs a rule name")
    if expression.kind is Kind.CAPTURE and not expression.label:
        raise ExpressionArityError("capture needs a node name")
    if expression.kind is Kind.CLUSTER:
        _check_cluster(expression.groups, expression.children)
    return expression


def build_expression(
    kind: Kind,
    children: Sequence[int] = (),
    *,
    node_id: int,
    text: str = "",
    ranges: Sequence[CharRange] = (),
    rule: str = "",
    left_assoc: bool = False,
    level: int = 0,
    groups: Sequence[ClusterGroup] = (),
    label: str = "",
    record_text: bool = False,
    strategy: str = "default",
) -> Expression:
    """Build and validate a single expression record."""
    return validate_expression(
        Expression(
            id=node_id,
            kind=kind,
            children=tuple(children),
            text=text,
            ranges=tuple(ranges),
            rule=rule,
            left_assoc=left_assoc,
            level=level,
            groups=tuple(groups),
            label=label,
            record_text=record_text,
            strategy=strategy,
        )
    )


def describe(expression: Expression) -> str:
    """Short, non-recursive description of an expression."""
    match expression.kind:
        case Kind.LITERAL:
            return quote_literal(expression.text)
        case Kind.CHAR_CLASS:
            return render_char_class(expression.ranges)
        case Kind.ANY_CHAR:
            return "any character"
        case Kind.REFERENCE:
            return expression.rule
        case Kind.CAPTURE | Kind.TOKEN | Kind.TRACE if expression.label:
            return f"{expression.kind}({expression.label})"
        case Kind.PRECEDENCE:
            return f"Precedence({expression.level})"
        case Kind.LEFT_RECURSIVE:
            return "LeftAssociative" if expression.left_assoc else "LeftRecursive"
        case _:
            return f"{expression.kind}#{expression.id}"


_LITERAL_ESCAPES = {"'": "\\'", "\\": "\\\\", "\n": "\\n", "\t": "\\t", "\r": "\\r"}
_CLASS_ESCAPES = {
    "]": "\\]",
    "\\": "\\\\",
    "-": "\\-",
    "\n": "\\n",
    "\t": "\\t",
    "\r": "\\r",
}


def quote_literal(text: str) -> str:
    """Render a literal in single-quoted grammar syntax."""
    return "'" + "".join(_LITERAL_ESCAPES.get(char, char) for char in text) + "'"


def render_char_class(ranges: Sequence[CharRange]) -> str:
    """Render character ranges in bracketed grammar syntax."""
    parts: list[str] = []
    for char_range in ranges:
        low = _CLASS_ESCAPES.get(char_range.low, char_range.low)
        if char_range.low == char_range.high:
            parts.append(low)
        else:
            high = _CLASS_ESCAPES.get(char_range.high, char_range.high)
            parts.append(f"{low}-{high}")
    return "[" + "".join(parts) + "]"


@dataclass(frozen=True)
class Grammar:
    """Expression graph with named rules, a root rule and optional whitespace."""

    nodes: Mapping[int, Expression]
    rules: Mapping[str, int]
    root: str
    whitespace: int | None = None
    extensions: Mapping[int, ExtensionMap] = field(
        default_factory=lambda: MappingProxyType({})
    )

    def __post_init__(self) -> None:
        if self.root not in self.rules:
            raise GrammarError(f"root rule {self.root} is not defined")
        for name, node_id in self.rules.items():
            if node_id not in self.nodes:
                raise GrammarError(f"rule {name} points at missing node {node_id}")
        if self.whitespace is not None and self.whitespace not in self.nodes:
            raise GrammarError(f"whitespace points at missing node {self.whitespace}")

    @classmethod
    def create(
        cls,
        nodes: Mapping[int, Expression],
        rules: Mapping[str, int],
        root: str,
        whitespace: int | None = None,
        extensions: Mapping[int, ExtensionMap] | None = None,
    ) -> "Grammar":
        """Build a grammar from plain mappings, freezing them."""
        frozen_extensions = {
            node_id: ext if ext.frozen else ext.freeze()
            for node_id, ext in (extensions or {}).items()
            if node_id in nodes
        }
        return cls(
            nodes=MappingProxyType(dict(nodes)),
            rules=MappingProxyType(dict(rules)),
            root=root,
            whitespace=whitespace,
            extensions=MappingProxyType(frozen_extensions),
        )

    @property
    def root_id(self) -> int:
        """Id of the expression the parse starts with."""
        return self.rules[self.root]

    def node(self, node_id: int) -> Expression:
        """Return the expression with the given id."""
        return self.nodes[node_id]

    def extensions_for(self, node_id: int) -> ExtensionMap:
        """Read-only extension map of an expression."""
        return self.extensions.get(node_id, EMPTY_EXTENSIONS)

    def rule_names(self) -> dict[int, str]:
        """Map each rule root id to the first rule naming it."""
        names: dict[int, str] = {}
        for name, node_id in self.rules.items():
            names.setdefault(node_id, name)
        return names

    def entry_points(self) -> list[int]:
        """Rule roots in declaration order, followed by the whitespace node."""
        entries = list(self.rules.values())
        if self.whitespace is not None:
            entries.append(self.whitespace)
        return entries

    def reachable(self) -> list[int]:
        """Ids reachable from the entry points, in depth-first preorder."""
        seen: set[int] = set()
        order: list[int] = []
        stack = list(reversed(self.entry_points()))
        while stack:
            node_id = stack.pop()
            if node_id in seen:
                continue
            seen.add(node_id)
            order.append(node_id)
            stack.extend(reversed(self.nodes[node_id].children))
        return order

    def next_id(self) -> int:
        """Smallest id greater than every id in use."""
        return max(self.nodes, default=-1) + 1

    def iter_nodes(self) -> Iterator[Expression]:
        """Iterate over all expressions ordered by id."""
        for node_id in sorted(self.nodes):
            yield self.nodes[node_id]


class GrammarBuilder:
    """Builds grammars programmatically, in parser combinator fashion.

    Every method adds one expression and returns its id. Rules may be
    referenced by name before they are defined; :func:`resolve_references`
    later turns those references into direct edges.
    """

    def __init__(self) -> None:
        self._nodes: dict[int, Expression] = {}
        self._rules: dict[str, int] = {}
        self._extensions: dict[int, ExtensionMap] = {}
        self._next_id = 0

    def add_expression(self, expression: Expression) -> int:
        """Add a prebuilt expression under a fresh id."""
        node_id = self._next_id
        self._next_id += 1
        self._nodes[node_id] = validate_expression(replace(expression, id=node_id))
        return node_id

    def _add(
        self,
        kind: Kind,
        children: Sequence[int] = (),
        *,
        text: str = "",
        rule: str = "",
        label: str = "",
        strategy: str = "default",
    ) -> int:
        """Build, validate and store a node with the next free id."""
        node_id = self._next_id
        self._nodes[node_id] = build_expression(
            kind,
            children,
            node_id=node_id,
            text=text,
            rule=rule,
            label=label,
            strategy=strategy,
        )
        self._next_id += 1
        return node_id

    def literal(self, text: str) -> int:
        """Match ``text`` verbatim."""
        return self._add(Kind.LITERAL, text=text)

    def char_class(self, *ranges: tuple[str, str] | str) -> int:
        """Match one character from the given ranges or single characters."""
        char_ranges = tuple(
            CharRange(item, item) if isinstance(item, str) else CharRange(*item)
            for item in ranges
        )
        return self.add_expression(
            Expression(id=0, kind=Kind.CHAR_CLASS, ranges=char_ranges)
        )

    def any_char(self) -> int:
        """Match any single character."""
        return self._add(Kind.ANY_CHAR)

    def seq(self, *children: int) -> int:
        """Match all children in order."""
        return self._add(Kind.SEQUENCE, children)

    def choice(self, *children: int) -> int:
        """Match the first child that succeeds."""
        return self._add(Kind.CHOICE, children)

    def zero_or_more(self, child: int) -> int:
        """Match ``child`` greedily, any number of times."""
        return self._add(Kind.ZERO_OR_MORE, (child,))

    def one_or_more(self, child: int) -> int:
        """Match ``child`` greedily, at least once."""
        return self._add(Kind.ONE_OR_MORE, (child,))

    def optional(self, child: int) -> int:
        """Match ``child`` or nothing."""
        return self._add(Kind.OPTIONAL, (child,))

    def and_(self, child: int) -> int:
        """Succeed without consuming if ``child`` matches."""
        return self._add(Kind.AND_PREDICATE, (child,))

    def not_(self, child: int) -> int:
        """Succeed without consuming if ``child`` fails."""
        return self._add(Kind.NOT_PREDICATE, (child,))

    def ref(self, rule: str) -> int:
        """Refer to a rule by name."""
        return self._add(Kind.REFERENCE, rule=rule)

    def left_recursive(self, child: int, left_assoc: bool = False) -> int:
        """Mark ``child`` as left-recursive."""
        return self.add_expression(
            Expression(
                id=0,
                kind=Kind.LEFT_RECURSIVE,
                children=(child,),
                left_assoc=left_assoc,
            )
        )

    def precedence(self, level: int, child: int) -> int:
        """Parse ``child`` at precedence ``level``."""
        return self.add_expression(
            Expression(id=0, kind=Kind.PRECEDENCE, children=(child,), level=level)
        )

    def cluster(self, groups: Sequence[ClusterGroup]) -> int:
        """Add an expression cluster from explicit groups."""
        children = tuple(op for group in groups for op in group.ops)
        return self.add_expression(
            Expression(id=0, kind=Kind.CLUSTER, children=children, groups=tuple(groups))
        )

    def capture(self, child: int, name: str, record_text: bool = False) -> int:
        """Wrap the nodes produced by ``child`` in a syntax node called ``name``."""
        return self.add_expression(
            Expression(
                id=0,
                kind=Kind.CAPTURE,
                children=(child,),
                label=name,
                record_text=record_text,
            )
        )

    def token(self, child: int, label: str = "") -> int:
        """Match ``child`` then skip the grammar's whitespace."""
        return self._add(Kind.TOKEN, (child,), label=label)

    def memo(self, child: int, strategy: str = "default") -> int:
        """Memoize ``child`` with the named strategy."""
        return self._add(Kind.MEMO, (child,), strategy=strategy)

    def escape(self, child: int) -> int:
        """Parse ``child`` with recursion blocking suspended."""
        return self._add(Kind.ESCAPE, (child,))

    def trace(self, child: int, label: str) -> int:
        """Report every invocation of ``child`` to the trace sink."""
        return self._add(Kind.TRACE, (child,), label=label)

    def rule(self, name: str, expression: int) -> int:
        """Name ``expression`` as rule ``name``."""
        if name in self._rules:
            raise GrammarError(f"duplicate rule {name}")
        self._rules[name] = expression
        return expression

    def has_rule(self, name: str) -> bool:
        """Whether a rule called ``name`` has been defined."""
        return name in self._rules

    def set_extension[T](self, node_id: int, key: ExtensionKey[T], value: T) -> None:
        """Attach an extension value to an expression before the grammar is built."""
        self._extensions.setdefault(node_id, ExtensionMap()).set(key, value)

    def build(self, root: str | None = None, whitespace: str | None = None) -> Grammar:
        """Return the (unresolved) grammar built so far."""
        if not self._rules:
            raise GrammarError("grammar has no rules")
        root_name = root if root is not None else next(iter(self._rules))
        whitespace_id: int | None = None
        if whitespace is not None:
            if whitespace not in self._rules:
                raise GrammarError(f"whitespace rule {whitespace} is not defined")
            whitespace_id = self._rules[whitespace]
        return Grammar.create(
            self._nodes, self._rules, root_name, whitespace_id, self._extensions
        )
