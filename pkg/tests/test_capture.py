"""Tests for captures, tokens and syntax tree rendering."""

from __future__ import annotations

import json

import pytest

from pegcluster.dsl import load_grammar
from pegcluster.engine import Parser, parse_root
from pegcluster.expressions import Grammar, GrammarBuilder
from pegcluster.passes import prepare_grammar
from pegcluster.syntax import SyntaxNode, TreeFormat, serialize_tree


def _spaced_sum() -> Grammar:
    b = GrammarBuilder()
    number = b.token(b.capture(b.one_or_more(b.char_class(("0", "9"))), "num", True))
    plus = b.token(b.literal("+"))
    tail = b.zero_or_more(b.seq(plus, number))
    b.rule("Sum", b.capture(b.seq(number, tail), "sum", True))
    b.rule("WS", b.zero_or_more(b.char_class(" ", "\t")))
    return prepare_grammar(b.build(root="Sum", whitespace="WS")).grammar


def test_leaf_capture() -> None:
    b = GrammarBuilder()
    b.rule("N", b.capture(b.char_class(("0", "9")), "num"))
    grammar = prepare_grammar(b.build()).grammar

    (node,) = parse_root(grammar, "7").nodes

    assert node == SyntaxNode("num", 0, 1)


def test_nested_captures_become_children() -> None:
    grammar = load_grammar("Add = (Num '+' Num):add ; Num = [0-9]:num ;")
    (node,) = parse_root(grammar, "1+2").nodes
    assert node.name == "add"
    assert [child.name for child in node.children] == ["num", "num"]
    assert [(child.start, child.end) for child in node.children] == [(0, 1), (2, 3)]


def test_capture_without_inner_captures_elides_the_tree() -> None:
    grammar = load_grammar("Add = ([0-9] '+' [0-9]):add ;")
    (node,) = parse_root(grammar, "1+2").nodes
    assert node.children == ()
    assert node.text is None


def test_failed_capture_produces_nothing() -> None:
    grammar = load_grammar("R = 'a':x | 'b' ;")
    result = parse_root(grammar, "b")
    assert result.success
    assert result.nodes == ()


def test_token_skips_trailing_whitespace() -> None:
    b = GrammarBuilder()
    plus = b.token(b.literal("+"))
    b.rule("R", b.seq(plus, b.literal("3")))
    b.rule("WS", b.zero_or_more(b.char_class(" ")))
    grammar = prepare_grammar(b.build(root="R", whitespace="WS")).grammar
    session = Parser(grammar).session("+  3")

    outcome = session.invoke_at(plus, 0)

    assert outcome.end == 3
    assert session.state.non_whitespace_watermark == 1
    assert session.invoke_at(plus, 3).success is False


def test_token_without_trailing_whitespace() -> None:
    b = GrammarBuilder()
    plus = b.token(b.literal("+"))
    b.rule("R", plus)
    b.rule("WS", b.zero_or_more(b.char_class(" ")))
    grammar = prepare_grammar(b.build(root="R", whitespace="WS")).grammar
    assert parse_root(grammar, "+").end == 1


def test_token_without_whitespace_rule() -> None:
    b = GrammarBuilder()
    b.rule("R", b.token(b.literal("+")))
    grammar = prepare_grammar(b.build()).grammar
    assert parse_root(grammar, "+ ").end == 1


def test_recorded_text_drops_trailing_whitespace() -> None:
    result = parse_root(_spaced_sum(), "1 + 2  ", full_match=True)
    assert result.success
    (node,) = result.nodes
    assert node.text == "1 + 2"
    assert node.end == 7
    assert [child.text for child in node.children] == ["1", "2"]


def test_sexpr_rendering(captured_cluster: Grammar) -> None:
    result = parse_root(captured_cluster, "7")
    assert serialize_tree(result.nodes, "sexpr") == '(num "7")'
    added = parse_root(captured_cluster, "1+2")
    assert serialize_tree(added.nodes, TreeFormat.SEXPR) == (
        '(add (num "1") (num "2"))'
    )


def test_empty_node_list_renders_as_root() -> None:
    assert serialize_tree((), "sexpr") == "(root)"


def test_several_top_level_nodes_share_a_root() -> None:
    nodes = (SyntaxNode("a", 0, 1), SyntaxNode("b", 1, 2, "x"))
    assert serialize_tree(nodes, "sexpr") == '(root (a) (b "x"))'


def test_json_rendering(captured_cluster: Grammar) -> None:
    result = parse_root(captured_cluster, "1+2")
    tree = json.loads(serialize_tree(result.nodes, "json"))
    assert tree["name"] == "add"
    assert tree["span"] == [0, 3]
    assert [child["text"] for child in tree["children"]] == ["1", "2"]


def test_unknown_tree_format_is_rejected() -> None:
    with pytest.raises(ValueError):
        serialize_tree((), "xml")


def test_walk_is_preorder() -> None:
    tree = SyntaxNode(
        "add", 0, 3, None, (SyntaxNode("num", 0, 1), SyntaxNode("num", 2, 3))
    )
    assert [(node.name, node.start) for node in tree.walk()] == [
        ("add", 0),
        ("num", 0),
        ("num", 2),
    ]


def _recorded(source: str, text: str) -> list[str | None]:
    result = parse_root(load_grammar(source), text, full_match=True)
    assert result.success, result.report.render()
    return [node.text for node in result.nodes]


def test_left_recursive_capture_drops_trailing_whitespace() -> None:
    source = "S = E:s$ ; E = E %token('-') T | T ; T = %token([0-9]) ; WS = [ ]* ;"
    assert _recorded(source, "1-2 ") == ["1-2"]
    assert _recorded(source, "1 - 2 - 3  ") == ["1 - 2 - 3"]


def test_cluster_capture_drops_trailing_whitespace() -> None:
    source = (
        "S = E:s$ ; E = expr -> E '-' E @+ @left_recur -> T @+ ;"
        " T = %token([0-9]) ; WS = [ ]* ;"
    )
    assert _recorded(source, "1-2 ") == ["1-2"]


def test_memo_hit_replays_the_token_end() -> None:
    source = "S = %memo(A) 'q' | %memo(A):c$ ; A = %token('x') ; WS = [ ]* ;"
    grammar = load_grammar(source)
    result = parse_root(grammar, "x  ", full_match=True)

    assert [node.text for node in result.nodes] == ["x"]
    assert result.state.invocation_counters[grammar.rules["A"]] == 1


def test_json_rendering_matches_json_module() -> None:
    tree = SyntaxNode(
        "add",
        0,
        3,
        None,
        (SyntaxNode("num", 0, 1, 'é"'), SyntaxNode("num", 2, 3, "\n")),
    )

    def as_dict(node: SyntaxNode) -> dict[str, object]:
        fields: dict[str, object] = {"name": node.name, "span": [node.start, node.end]}
        if node.text is not None:
            fields["text"] = node.text
        fields["children"] = [as_dict(child) for child in node.children]
        return fields

    expected = json.dumps(as_dict(tree), ensure_ascii=False, sort_keys=True)
    assert serialize_tree(tree, "json") == expected


def test_deep_trees_render_without_recursion() -> None:
    depth = 50_000
    node = SyntaxNode("num", 0, 1, "1")
    for level in range(depth):
        node = SyntaxNode("neg", 0, level + 2, None, (node,))

    sexpr = serialize_tree(node, "sexpr")
    assert sexpr.startswith("(neg (neg ")
    assert sexpr.endswith('(num "1")' + ")" * depth)

    rendered = serialize_tree(node, "json")
    assert rendered.count('"name": "neg"') == depth
    assert rendered.count("{") == depth + 1
    assert rendered.endswith(f'"name": "neg", "span": [0, {depth + 1}]}')
