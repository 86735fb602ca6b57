"""Grammar files: loading through a self-hosted meta-grammar, and dumping back to text.

Grammar syntax::

    %start Expr            # optional, defaults to the first rule
    %whitespace WS         # optional, defaults to a rule named WS
    Expr = expr
        -> (Expr '+' Expr):add @+ @left_recur
        -> [0-9]:num$ @+ ;
    WS = [ \\t\\n]* ;
"""

import functools
import logging
from collections.abc import Sequence
from pathlib import Path

from pegcluster.cluster import AnnotatedAlternate, cluster_from_alternates
from pegcluster.diagnostics import line_column
from pegcluster.engine import Parser, ParserOptions
from pegcluster.exceptions import GrammarError, GrammarSyntaxError
from pegcluster.expressions import (
    CharRange,
    Expression,
    Grammar,
    GrammarBuilder,
    Kind,
    quote_literal,
    render_char_class,
)
from pegcluster.memo import DEFAULT_STRATEGY
from pegcluster.passes import PreparedGrammar, prepare_grammar
from pegcluster.syntax import SyntaxNode

logger = logging.getLogger("pegcluster")

WHITESPACE_RULE = "WS"
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r"}


def _build_meta_grammar() -> Grammar:
    """The grammar of grammar files, expressed with the library itself."""
    b = GrammarBuilder()
    ident_start = (("a", "z"), ("A", "Z"), "_")
    ident_char = b.char_class(("a", "z"), ("A", "Z"), ("0", "9"), "_")

    def tok(text: str) -> int:
        return b.token(b.literal(text), label=quote_literal(text))

    def keyword(text: str) -> int:
        return b.token(
            b.seq(b.literal(text), b.not_(ident_char)), label=quote_literal(text)
        )

    comment = b.seq(
        b.literal("#"), b.zero_or_more(b.seq(b.not_(b.literal("\n")), b.any_char()))
    )
    b.rule("WS", b.zero_or_more(b.choice(b.char_class(" ", "\t", "\r", "\n"), comment)))

    name_chars = b.seq(b.char_class(*ident_start), b.zero_or_more(ident_char))
    b.rule("NAME", b.token(b.capture(name_chars, "name", record_text=True), "name"))
    b.rule(
        "INT",
        b.token(
            b.capture(b.one_or_more(b.char_class(("0", "9"))), "int", record_text=True),
            "integer",
        ),
    )

    def quoted(opening: str, closing: str, node_name: str, label: str) -> int:
        escaped = b.seq(b.literal("\\"), b.any_char())
        plain = b.seq(b.not_(b.literal(closing)), b.any_char())
        body = b.capture(
            b.zero_or_more(b.choice(escaped, plain)), node_name, record_text=True
        )
        return b.token(b.seq(b.literal(opening), body, b.literal(closing)), label)

    b.rule("STRING", quoted("'", "'", "string", "string"))
    b.rule("CHARCLASS", quoted("[", "]", "class", "character class"))

    def wrapped(keyword_text: str, node_name: str, *prefix: int) -> int:
        return b.capture(
            b.seq(keyword(keyword_text), tok("("), *prefix, b.ref("choice"), tok(")")),
            node_name,
        )

    b.rule(
        "primary",
        b.choice(
            wrapped(
                "%token",
                "token_op",
                b.optional(b.capture(b.seq(b.ref("STRING"), tok(",")), "label")),
            ),
            wrapped(
                "%memo",
                "memo_op",
                b.optional(b.capture(b.seq(b.ref("NAME"), tok(",")), "strategy")),
            ),
            wrapped("%left_recur", "left_recur_op"),
            wrapped("%left_assoc", "left_assoc_op"),
            wrapped("%escape", "escape_op"),
            wrapped("%precedence", "precedence_op", b.ref("INT"), tok(",")),
            b.seq(tok("("), b.ref("choice"), tok(")")),
            b.capture(tok("."), "any"),
            b.ref("STRING"),
            b.ref("CHARCLASS"),
            b.capture(b.ref("NAME"), "ref"),
        ),
    )
    suffix = b.choice(
        b.capture(tok("*"), "star"),
        b.capture(tok("+"), "plus"),
        b.capture(tok("?"), "optional"),
    )
    capture = b.capture(
        b.seq(tok(":"), b.ref("NAME"), b.optional(b.capture(tok("$"), "record"))),
        "capture",
    )
    b.rule(
        "suffixed",
        b.capture(
            b.seq(b.ref("primary"), b.optional(suffix), b.optional(capture)),
            "suffixed",
        ),
    )
    b.rule(
        "prefixed",
        b.choice(
            b.capture(b.seq(tok("&"), b.ref("suffixed")), "and"),
            b.capture(b.seq(tok("!"), b.ref("suffixed")), "not"),
            b.ref("suffixed"),
        ),
    )
    b.rule("sequence", b.capture(b.one_or_more(b.ref("prefixed")), "sequence"))
    b.rule(
        "choice",
        b.capture(
            b.seq(
                b.ref("sequence"),
                b.zero_or_more(b.seq(tok("|"), b.ref("sequence"))),
            ),
            "choice",
        ),
    )
    annotation = b.choice(
        b.capture(tok("@+"), "increment"),
        b.capture(keyword("@left_recur"), "left_recur"),
    )
    arm = b.capture(
        b.seq(tok("->"), b.ref("sequence"), b.zero_or_more(annotation)), "arm"
    )
    b.rule("cluster", b.capture(b.seq(keyword("expr"), b.one_or_more(arm)), "cluster"))
    b.rule(
        "rule",
        b.capture(
            b.seq(
                b.ref("NAME"),
                tok("="),
                b.choice(b.ref("cluster"), b.ref("choice")),
                tok(";"),
            ),
            "rule",
        ),
    )
    directive = b.choice(
        b.capture(b.seq(keyword("%start"), b.ref("NAME")), "start"),
        b.capture(b.seq(keyword("%whitespace"), b.ref("NAME")), "whitespace"),
    )
    b.rule(
        "grammar",
        b.seq(b.ref("WS"), b.zero_or_more(directive), b.one_or_more(b.ref("rule"))),
    )
    return prepare_grammar(b.build(root="grammar", whitespace="WS")).grammar


@functools.cache
def _meta_parser() -> Parser:
    """Parser for grammar files, built once."""
    return Parser(_build_meta_grammar(), ParserOptions(full_match=True))


def _unescape(raw: str) -> str:
    """Resolve backslash escapes in a literal."""
    chars: list[str] = []
    index = 0
    while index < len(raw):
        char = raw[index]
        if char == "\\" and index + 1 < len(raw):
            index += 1
            char = _ESCAPES.get(raw[index], raw[index])
        chars.append(char)
        index += 1
    return "".join(chars)


def _char_ranges(raw: str) -> list[CharRange]:
    """Decode the inside of a ``[...]`` class.

    An unescaped ``-`` between two items makes a range.
    """
    items: list[tuple[str, bool]] = []
    index = 0
    while index < len(raw):
        char = raw[index]
        if char == "\\" and index + 1 < len(raw):
            index += 1
            items.append((_ESCAPES.get(raw[index], raw[index]), True))
        else:
            items.append((char, False))
        index += 1
    ranges: list[CharRange] = []
    index = 0
    while index < len(items):
        low = items[index][0]
        dash = index + 1 < len(items) and items[index + 1] == ("-", False)
        if dash and index + 2 < len(items):
            ranges.append(CharRange(low, items[index + 2][0]))
            index += 3
        else:
            ranges.append(CharRange(low, low))
            index += 1
    return ranges


class _GrammarAssembler:
    """Turns the syntax tree of a grammar file into an unresolved grammar."""

    def __init__(self, text: str) -> None:
        self._text = text
        self._builder = GrammarBuilder()

    def _error(self, node: SyntaxNode, detail: str) -> GrammarSyntaxError:
        """Syntax error located at ``node``."""
        line, column = line_column(self._text, node.start)
        return GrammarSyntaxError(line, column, detail)

    def assemble(self, nodes: Sequence[SyntaxNode]) -> Grammar:
        """Build an unresolved grammar from the parsed directives and rules."""
        start: str | None = None
        whitespace: str | None = None
        for node in nodes:
            match node.name:
                case "start":
                    if start is not None:
                        raise self._error(node, "duplicate %start directive")
                    start = _text(node.children[0])
                case "whitespace":
                    if whitespace is not None:
                        raise self._error(node, "duplicate %whitespace directive")
                    whitespace = _text(node.children[0])
                case "rule":
                    name = _text(node.children[0])
                    if self._builder.has_rule(name):
                        raise self._error(node, f"duplicate rule {name}")
                    self._builder.rule(name, self._body(node.children[1]))
        if whitespace is None and self._builder.has_rule(WHITESPACE_RULE):
            whitespace = WHITESPACE_RULE
        return self._builder.build(root=start, whitespace=whitespace)

    def _body(self, node: SyntaxNode) -> int:
        """Builder id for a rule body, plain or cluster."""
        if node.name != "cluster":
            return self._expression(node)
        alternates: list[AnnotatedAlternate] = []
        for arm in node.children:
            annotations = [child.name for child in arm.children[1:]]
            alternates.append(
                AnnotatedAlternate(
                    self._expression(arm.children[0]),
                    annotations.count("increment"),
                    "left_recur" in annotations,
                )
            )
        return self._builder.add_expression(cluster_from_alternates(alternates))

    def _expression(self, node: SyntaxNode) -> int:
        """Builder id for one expression node of the grammar syntax tree."""
        b = self._builder
        children = node.children
        match node.name:
            case "choice" | "sequence" if len(children) == 1:
                return self._expression(children[0])
            case "choice":
                return b.choice(*(self._expression(child) for child in children))
            case "sequence":
                return b.seq(*(self._expression(child) for child in children))
            case "and":
                return b.and_(self._expression(children[0]))
            case "not":
                return b.not_(self._expression(children[0]))
            case "suffixed":
                return self._suffixed(children)
            case "ref":
                return b.ref(_text(children[0]))
            case "string":
                return b.literal(_unescape(_text(node)))
            case "class":
                return b.add_expression(
                    Expression(
                        id=0,
                        kind=Kind.CHAR_CLASS,
                        ranges=tuple(_char_ranges(_text(node))),
                    )
                )
            case "any":
                return b.any_char()
            case "token_op":
                label = ""
                if len(children) == 2:
                    label = _unescape(_text(children[0].children[0]))
                return b.token(self._expression(children[-1]), label)
            case "memo_op":
                strategy = DEFAULT_STRATEGY
                if len(children) == 2:
                    strategy = _text(children[0].children[0])
                return b.memo(self._expression(children[-1]), strategy)
            case "left_recur_op" | "left_assoc_op":
                return b.left_recursive(
                    self._expression(children[0]),
                    left_assoc=node.name == "left_assoc_op",
                )
            case "escape_op":
                return b.escape(self._expression(children[0]))
            case "precedence_op":
                return b.precedence(
                    int(_text(children[0])), self._expression(children[1])
                )
        raise self._error(node, f"unexpected {node.name}")

    def _suffixed(self, children: Sequence[SyntaxNode]) -> int:
        """Apply ``*``, ``+``, ``?`` and capture suffixes in order."""
        b = self._builder
        expression = self._expression(children[0])
        for modifier in children[1:]:
            match modifier.name:
                case "star":
                    expression = b.zero_or_more(expression)
                case "plus":
                    expression = b.one_or_more(expression)
                case "optional":
                    expression = b.optional(expression)
                case "capture":
                    expression = b.capture(
                        expression,
                        _text(modifier.children[0]),
                        record_text=len(modifier.children) > 1,
                    )
        return expression


def _text(node: SyntaxNode) -> str:
    """Recorded text of a leaf node."""
    return node.text or ""


def parse_grammar_source(text: str) -> Grammar:
    """Parse grammar-file text into an unresolved grammar."""
    result = _meta_parser().parse(text)
    if not result.success:
        report = result.report
        raise GrammarSyntaxError(report.line, report.column, report.detail)
    return _GrammarAssembler(text).assemble(result.nodes)


def prepare_source(text: str) -> PreparedGrammar:
    """Load grammar text and keep the analysis (cycles, auto-marked nodes)."""
    prepared = prepare_grammar(parse_grammar_source(text))
    logger.info(
        "Loaded grammar: %s rules, %s nodes, root %s",
        len(prepared.grammar.rules),
        len(prepared.grammar.nodes),
        prepared.grammar.root,
    )
    return prepared


def load_grammar(text: str) -> Grammar:
    """Load a grammar from text, ready for parsing."""
    return prepare_source(text).grammar


def load_grammar_file(path: str | Path) -> Grammar:
    """Load a UTF-8 grammar file."""
    return load_grammar(Path(path).read_text(encoding="utf-8"))


# Binding strength of rendered forms; operands weaker than required get parentheses.
_CHOICE, _SEQUENCE, _PREFIXED, _SUFFIXED, _PRIMARY = range(5)
_REPETITIONS = {Kind.ZERO_OR_MORE: "*", Kind.ONE_OR_MORE: "+", Kind.OPTIONAL: "?"}


class _GrammarPrinter:
    """Renders a grammar as grammar-file text."""

    def __init__(self, grammar: Grammar) -> None:
        self._grammar = grammar
        self._names = grammar.rule_names()
        incoming: dict[int, int] = {}
        reachable = grammar.reachable()
        for node_id in reachable:
            for child in grammar.node(node_id).children:
                incoming[child] = incoming.get(child, 0) + 1
        for node_id in reachable:
            node = grammar.node(node_id)
            shared = incoming.get(node_id, 0) > 1 or node.kind is Kind.CLUSTER
            if node_id not in self._names and (shared or node_id == grammar.whitespace):
                self._names[node_id] = f"r{node_id}"

    def dump(self) -> str:
        """Grammar text: directives first, then every rule."""
        grammar = self._grammar
        lines = [f"%start {grammar.root}"]
        if grammar.whitespace is not None:
            lines.append(f"%whitespace {self._names[grammar.whitespace]}")
        for name, node_id in grammar.rules.items():
            if self._names[node_id] != name:
                lines.append(f"{name} = {self._names[node_id]} ;")
            else:
                lines.append(self._rule(name, node_id))
        declared = set(grammar.rules)
        for node_id, name in sorted(self._names.items()):
            if name not in declared:
                lines.append(self._rule(name, node_id))
        return "\n".join(lines) + "\n"

    def _rule(self, name: str, node_id: int) -> str:
        """One rule definition."""
        node = self._grammar.node(node_id)
        if node.kind is Kind.CLUSTER:
            return f"{name} = expr\n{self._cluster_arms(node)} ;"
        return f"{name} = {self._render(node_id, _CHOICE, top=True)} ;"

    def _cluster_arms(self, node: Expression) -> str:
        """Cluster alternates with their ``@+`` and ``@left_recur`` annotations."""
        arms: list[str] = []
        previous = 0
        for group in reversed(node.groups):
            for index, op in enumerate(group.ops):
                annotations = ""
                if index == 0:
                    annotations = " @+" * (group.precedence - previous)
                    if group.left_assoc:
                        annotations += " @left_recur"
                arms.append(f"    -> {self._render(op, _SEQUENCE)}{annotations}")
            previous = group.precedence
        return "\n".join(arms)

    def _render(self, node_id: int, required: int, top: bool = False) -> str:
        """Text for ``node_id``, in parentheses if it binds looser than ``required``."""
        if not top and node_id in self._names:
            return self._names[node_id]
        text, strength = self._form(self._grammar.node(node_id))
        return f"({text})" if strength < required else text

    def _form(self, node: Expression) -> tuple[str, int]:
        """Text for ``node`` and how tightly it binds."""
        kind = node.kind
        if kind is Kind.CHOICE:
            arms = (self._render(c, _SEQUENCE) for c in node.children)
            return " | ".join(arms), _CHOICE
        if kind is Kind.SEQUENCE:
            if not node.children:
                return "''", _PRIMARY
            items = (self._render(c, _PREFIXED) for c in node.children)
            return " ".join(items), _SEQUENCE
        if kind in (Kind.AND_PREDICATE, Kind.NOT_PREDICATE):
            sigil = "&" if kind is Kind.AND_PREDICATE else "!"
            return sigil + self._render(node.child, _SUFFIXED), _PREFIXED
        if kind in _REPETITIONS:
            return self._render(node.child, _PRIMARY) + _REPETITIONS[kind], _SUFFIXED
        if kind is Kind.CAPTURE:
            child = node.child
            child_kind = self._grammar.node(child).kind
            if child not in self._names and child_kind in _REPETITIONS:
                operand = self._render(child, _SUFFIXED)
            else:
                operand = self._render(child, _PRIMARY)
            return f"{operand}:{node.label}{'$' if node.record_text else ''}", _SUFFIXED
        return self._primary(node), _PRIMARY

    def _primary(self, node: Expression) -> str:
        """Text for atoms and the ``%`` operators."""
        match node.kind:
            case Kind.LITERAL:
                return quote_literal(node.text)
            case Kind.CHAR_CLASS:
                return render_char_class(node.ranges)
            case Kind.ANY_CHAR:
                return "."
            case Kind.REFERENCE:
                return node.rule
            case Kind.TOKEN:
                label = f"{quote_literal(node.label)}, " if node.label else ""
                return f"%token({label}{self._render(node.child, _CHOICE)})"
            case Kind.MEMO:
                strategy = ""
                if node.strategy != DEFAULT_STRATEGY:
                    strategy = f"{node.strategy}, "
                return f"%memo({strategy}{self._render(node.child, _CHOICE)})"
            case Kind.LEFT_RECURSIVE:
                operator = "%left_assoc" if node.left_assoc else "%left_recur"
                return f"{operator}({self._render(node.child, _CHOICE)})"
            case Kind.ESCAPE:
                return f"%escape({self._render(node.child, _CHOICE)})"
            case Kind.PRECEDENCE:
                return f"%precedence({node.level}, {self._render(node.child, _CHOICE)})"
            case Kind.TRACE:
                return self._render(node.child, _PRIMARY)
        raise GrammarError(f"cannot render {node.kind} outside a rule")


def dump_grammar(grammar: Grammar) -> str:
    """Render ``grammar`` as grammar-file text.

    Loading the text back gives an isomorphic grammar.
    """
    return _GrammarPrinter(grammar).dump()
