"""Tests for memoization strategies and the memo expression."""

from __future__ import annotations

import pytest

from pegcluster.engine import Parser, ParserOptions, parse_root
from pegcluster.exceptions import MemoConfigurationError
from pegcluster.expressions import Expression, Grammar, GrammarBuilder, Kind
from pegcluster.memo import (
    PRECEDENCE_STRATEGY,
    BoundedMemoStrategy,
    MemoKey,
    PrecedenceAwareMemoStrategy,
    UnboundedMemoStrategy,
    bounded_memo_strategy,
    check_strategies,
    default_memo_strategies,
)
from pegcluster.passes import prepare_grammar
from pegcluster.state import FAILURE, ParseOutcome, ParseState

_MEMO = Expression(id=1, kind=Kind.MEMO, children=(0,))


def _twice_memoized(strategy: str = "default") -> tuple[Grammar, int, int]:
    """``R = %memo(D) 'x' | %memo(D) 'y'`` so the memo is retried at position 0."""
    b = GrammarBuilder()
    digit = b.char_class(("0", "9"))
    memo = b.memo(digit, strategy)
    b.rule("R", b.choice(b.seq(memo, b.literal("x")), b.seq(memo, b.literal("y"))))
    return prepare_grammar(b.build()).grammar, memo, digit


def test_second_invocation_hits_the_table() -> None:
    grammar, memo, digit = _twice_memoized()
    result = parse_root(grammar, "7y")
    assert result.success
    assert result.state.invocation_counters[memo] == 2
    assert result.state.invocation_counters[digit] == 1


def test_memo_inside_left_recursion_is_bypassed() -> None:
    b = GrammarBuilder()
    number = b.memo(b.char_class(("0", "9")))
    recursive = b.left_recursive(
        b.choice(b.seq(b.ref("E"), b.literal("-"), number), number)
    )
    b.rule("E", recursive)
    grammar = prepare_grammar(b.build()).grammar
    digit = grammar.node(number).child

    parser = Parser(grammar)
    session = parser.session("1-2")
    outcome = session.invoke(grammar.root_id, session.state)

    assert outcome.end == 3
    counters = session.state.invocation_counters
    assert counters[digit] == counters[number]
    assert session.memo_strategy("default", session.state).size() == 0


def test_precedence_aware_keys_differ_by_level() -> None:
    strategy = PrecedenceAwareMemoStrategy()
    state = ParseState("a")
    state.current_precedence = 1
    low = strategy.key(_MEMO, state)
    state.current_precedence = 2
    high = strategy.key(_MEMO, state)

    strategy.store(low, ParseOutcome(True, 1))
    strategy.store(high, FAILURE)

    assert low != high
    assert strategy.size() == 2
    assert strategy.lookup(low) == ParseOutcome(True, 1)


def test_default_key_ignores_precedence() -> None:
    strategy = UnboundedMemoStrategy()
    state = ParseState("a")
    state.current_precedence = 4
    assert strategy.key(_MEMO, state) == MemoKey(0, 0)


def test_bounded_table_evicts_oldest_store() -> None:
    strategy = bounded_memo_strategy(1)
    first, second = MemoKey(0, 0), MemoKey(0, 1)
    strategy.store(first, FAILURE)
    strategy.store(second, ParseOutcome(True, 2))

    assert strategy.lookup(first) is None
    assert strategy.lookup(second) == ParseOutcome(True, 2)
    assert strategy.size() == 1


def test_bounded_table_lookup_does_not_refresh() -> None:
    strategy = BoundedMemoStrategy(2)
    keys = [MemoKey(0, position) for position in range(3)]
    strategy.store(keys[0], FAILURE)
    strategy.store(keys[1], FAILURE)
    assert strategy.lookup(keys[0]) is FAILURE
    strategy.store(keys[2], FAILURE)

    assert strategy.lookup(keys[0]) is None
    assert strategy.lookup(keys[1]) is FAILURE


def test_large_bounded_table_behaves_as_unbounded() -> None:
    grammar, _, digit = _twice_memoized("bounded")
    strategies = {
        **default_memo_strategies(),
        "bounded": lambda: BoundedMemoStrategy(64),
    }
    result = Parser(grammar, ParserOptions(memo_strategies=strategies)).parse("7y")
    assert result.success
    assert result.state.invocation_counters[digit] == 1


def test_zero_capacity_is_rejected() -> None:
    with pytest.raises(MemoConfigurationError):
        BoundedMemoStrategy(0)


def test_check_strategies_names_missing_selectors() -> None:
    check_strategies({"default", PRECEDENCE_STRATEGY}, default_memo_strategies())
    with pytest.raises(MemoConfigurationError, match="lru, window"):
        check_strategies({"window", "lru", "default"}, default_memo_strategies())


def test_tables_are_per_parse() -> None:
    grammar, _, digit = _twice_memoized()
    parser = Parser(grammar)
    parser.parse("7y")
    again = parser.parse("7y")
    assert again.state.invocation_counters[digit] == 1
