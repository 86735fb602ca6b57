"""Tests for expression clusters."""

from __future__ import annotations

import pytest

from pegcluster.cluster import (
    AnnotatedAlternate,
    cluster_from_alternates,
    cluster_groups_from_alternates,
)
from pegcluster.dsl import load_grammar
from pegcluster.engine import parse_root
from pegcluster.exceptions import ClusterDefinitionError
from pegcluster.expressions import ClusterGroup, Grammar, Kind
from pegcluster.syntax import serialize_tree


def _tree(grammar: Grammar, text: str) -> str:
    result = parse_root(grammar, text, full_match=True)
    assert result.success, result.report.render()
    return serialize_tree(result.nodes, "sexpr")


def test_multiplication_outranks_addition(captured_cluster: Grammar) -> None:
    assert _tree(captured_cluster, "1+2*3") == (
        '(add (num "1") (mul (num "2") (num "3")))'
    )
    assert _tree(captured_cluster, "1*2+3") == (
        '(add (mul (num "1") (num "2")) (num "3"))'
    )


def test_left_recur_group_is_left_associative(captured_cluster: Grammar) -> None:
    assert _tree(captured_cluster, "1-2+3") == (
        '(add (sub (num "1") (num "2")) (num "3"))'
    )


def test_unmarked_group_is_right_associative() -> None:
    grammar = load_grammar(
        """
        E = expr
            -> (E '+' E):add @+ @left_recur
            -> (E '*' E):mul @+
            -> (E '/' E):div
            -> [0-9]:num$ @+ ;
        """
    )
    assert _tree(grammar, "2/3/4") == '(div (num "2") (div (num "3") (num "4")))'
    assert _tree(grammar, "1+2/3*4") == (
        '(add (num "1") (div (num "2") (mul (num "3") (num "4"))))'
    )


def test_table_one_alternates_form_three_groups() -> None:
    alternates = [
        AnnotatedAlternate(10, 1, True),
        AnnotatedAlternate(11),
        AnnotatedAlternate(12, 1, True),
        AnnotatedAlternate(13),
        AnnotatedAlternate(14, 1),
    ]
    assert cluster_groups_from_alternates(alternates) == (
        ClusterGroup(3, False, (14,)),
        ClusterGroup(2, True, (12, 13)),
        ClusterGroup(1, True, (10, 11)),
    )


def test_alternate_without_increment_joins_the_previous_level() -> None:
    groups = cluster_groups_from_alternates(
        [AnnotatedAlternate(1, 1), AnnotatedAlternate(2)]
    )
    assert groups == (ClusterGroup(1, False, (1, 2)),)


def test_increments_accumulate() -> None:
    groups = cluster_groups_from_alternates(
        [AnnotatedAlternate(1, 2), AnnotatedAlternate(2, 3)]
    )
    assert [group.precedence for group in groups] == [5, 2]


@pytest.mark.parametrize(
    "alternates",
    [
        [],
        [AnnotatedAlternate(1)],
        [AnnotatedAlternate(1, -1)],
        [AnnotatedAlternate(1, 1), AnnotatedAlternate(2, 0, True)],
    ],
)
def test_invalid_annotations_are_rejected(alternates: list[AnnotatedAlternate]) -> None:
    with pytest.raises(ClusterDefinitionError):
        cluster_groups_from_alternates(alternates)


def test_cluster_from_alternates_builds_a_cluster_node() -> None:
    node = cluster_from_alternates(
        [AnnotatedAlternate(4, 1, True), AnnotatedAlternate(5, 1)], node_id=9
    )
    assert node.id == 9
    assert node.kind is Kind.CLUSTER
    assert node.children == (5, 4)


def test_single_digit_takes_two_digit_invocations(cluster_grammar: Grammar) -> None:
    result = parse_root(cluster_grammar, "7")
    cluster = cluster_grammar.node(cluster_grammar.root_id)
    digit = cluster.groups[0].ops[0]
    assert cluster_grammar.node(digit).kind is Kind.CHAR_CLASS
    assert result.end == 1
    assert result.state.invocation_counters[digit] == 2


def test_precedences_are_cleared_after_nested_invocations(
    captured_cluster: Grammar,
) -> None:
    result = parse_root(captured_cluster, "1*2+3*4-5/6", full_match=True)
    assert result.success
    assert not result.state.precedences
    assert not result.state.cluster_depth


def test_cluster_rejects_trailing_operator(captured_cluster: Grammar) -> None:
    result = parse_root(captured_cluster, "1+", full_match=True)
    assert not result.success
    assert result.report.render() == "error at 1:3: expected one of {num}"
