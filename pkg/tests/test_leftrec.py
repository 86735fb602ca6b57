"""Tests for left recursion, associativity, the escape operator and precedence."""

from __future__ import annotations

from pegcluster.engine import Parser, parse_root
from pegcluster.expressions import Grammar, GrammarBuilder
from pegcluster.passes import prepare_grammar
from pegcluster.syntax import SyntaxNode, serialize_tree


def _subtraction(
    *, left_assoc: bool, right_operand: str = "E", escape: bool = False
) -> Grammar:
    """``E = (E '-' <right>):sub | N`` wrapped in an explicit left-recursive node."""
    b = GrammarBuilder()
    right = b.ref(right_operand)
    if escape:
        right = b.escape(right)
    arm = b.capture(b.seq(b.ref("E"), b.literal("-"), right), "sub")
    b.rule("E", b.left_recursive(b.choice(arm, b.ref("N")), left_assoc=left_assoc))
    b.rule("N", b.capture(b.char_class(("0", "9")), "num", record_text=True))
    return prepare_grammar(b.build()).grammar


def _tree(grammar: Grammar, text: str) -> str:
    result = parse_root(grammar, text, full_match=True)
    assert result.success, result.report.render()
    return serialize_tree(result.nodes, "sexpr")


def test_unmarked_both_recursive_rule_is_right_associative() -> None:
    grammar = _subtraction(left_assoc=False)
    assert _tree(grammar, "8-3-2") == '(sub (num "8") (sub (num "3") (num "2")))'


def test_left_associative_rule_grows_to_the_left() -> None:
    grammar = _subtraction(left_assoc=True, right_operand="N")
    assert _tree(grammar, "8-3-2") == '(sub (sub (num "8") (num "3")) (num "2"))'


def test_blocked_rule_cannot_recurse_on_the_right() -> None:
    grammar = _subtraction(left_assoc=True)
    result = parse_root(grammar, "8-3")
    assert result.success
    assert result.end == 1


def test_escape_reenables_recursion_in_non_left_position() -> None:
    grammar = _subtraction(left_assoc=True, escape=True)
    reference = _subtraction(left_assoc=False)
    assert _tree(grammar, "1-2") == _tree(reference, "1-2")


def test_seed_grows_once_for_a_single_atom() -> None:
    grammar = _subtraction(left_assoc=False)
    result = parse_root(grammar, "7")
    wrapper = grammar.root_id
    operand = grammar.node(wrapper).child
    assert result.end == 1
    assert result.state.invocation_counters[wrapper] == 3
    assert result.state.invocation_counters[operand] == 2
    assert result.state.peak_seed_count == 1


def test_seed_loop_is_bounded_by_input_length() -> None:
    grammar = _subtraction(left_assoc=True, right_operand="N")
    text = "-".join("1" * 30)
    result = parse_root(grammar, text)
    operand = grammar.node(grammar.root_id).child
    assert result.end == len(text)
    assert result.state.invocation_counters[operand] <= len(text) + 2


def test_indirect_left_recursion() -> None:
    b = GrammarBuilder()
    b.rule("A", b.choice(b.seq(b.ref("B"), b.literal("a")), b.literal("x")))
    b.rule("B", b.seq(b.ref("A"), b.literal("b")))
    grammar = prepare_grammar(b.build()).grammar
    assert parse_root(grammar, "xbaba", full_match=True).success
    assert not parse_root(grammar, "xbab", full_match=True).success


def _leveled(outer: int, inner: int) -> tuple[Grammar, int]:
    b = GrammarBuilder()
    inner_node = b.precedence(inner, b.literal("a"))
    b.rule("R", b.precedence(outer, inner_node))
    return prepare_grammar(b.build()).grammar, inner_node


def test_precedence_fails_below_the_current_level() -> None:
    grammar, inner = _leveled(3, 2)
    result = parse_root(grammar, "a")
    assert not result.success
    literal = grammar.node(inner).child
    assert result.state.invocation_counters[literal] == 0


def test_equal_precedence_levels_nest() -> None:
    grammar, _ = _leveled(2, 2)
    assert parse_root(grammar, "a").success


def test_precedence_is_restored_after_the_operand() -> None:
    b = GrammarBuilder()
    leveled = b.precedence(2, b.literal("a"))
    b.rule("R", b.choice(b.seq(leveled, b.literal("!")), b.literal("b")))
    grammar = prepare_grammar(b.build()).grammar
    session = Parser(grammar).session("a?")

    outcome = session.invoke_at(grammar.root_id, 0)

    assert not outcome.success
    assert session.state.current_precedence == 0


def test_nodes_from_a_grown_seed_are_kept() -> None:
    grammar = _subtraction(left_assoc=False)
    result = parse_root(grammar, "1-2", full_match=True)
    (root,) = result.nodes
    assert isinstance(root, SyntaxNode)
    assert [child.text for child in root.children] == ["1", "2"]
