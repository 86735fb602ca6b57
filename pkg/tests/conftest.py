"""Shared pytest fixtures for pegcluster tests."""

from __future__ import annotations

import logging
from collections.abc import Iterator

import pytest

from pegcluster.dsl import load_grammar
from pegcluster.engine import Parser, ParseResult
from pegcluster.expressions import Grammar

LAYERED_RIGHT = """
E = S '+' E | S '-' E | S ;
S = N '*' S | N '/' S | N ;
N = [0-9] ;
"""

IDIOMATIC = """
E = S (('+' | '-') S)* ;
S = N (('*' | '/') N)* ;
N = [0-9] ;
"""

LAYERED_LEFT = """
E = E '+' S | E '-' S | S ;
S = S '*' N | S '/' N | N ;
N = [0-9] ;
"""

CLUSTER = """
E = expr
    -> E '+' E @+ @left_recur
    -> E '-' E
    -> E '*' E @+ @left_recur
    -> E '/' E
    -> [0-9] @+ ;
"""

CAPTURED_CLUSTER = """
E = expr
    -> (E '+' E):add @+ @left_recur
    -> (E '-' E):sub
    -> (E '*' E):mul @+ @left_recur
    -> (E '/' E):div
    -> [0-9]:num$ @+ ;
"""

HIDDEN_RECURSION = """
X = Y? X ;
Y = 'y' ;
"""

TOKENIZED_SUM = """
Sum = (Num (%token('+') Num)*):sum$ ;
Num = %token([0-9]+:num$) ;
WS = [ ]* ;
"""

ARITHMETIC_STYLES = {
    "layered-right": LAYERED_RIGHT,
    "idiomatic": IDIOMATIC,
    "layered-left": LAYERED_LEFT,
    "cluster": CLUSTER,
}


@pytest.fixture(autouse=True)
def parse_state_hygiene(monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    """Fail any test whose top-level parse leaves seeds, blocks or precedences."""
    original = Parser.parse

    def checked_parse(self: Parser, text: str) -> ParseResult:
        result = original(self, text)
        state = result.state
        assert state.is_clean(), (
            f"parse of {text!r} left seeds={state.seeds} blocked={state.blocked} "
            f"precedences={state.precedences}"
        )
        return result

    monkeypatch.setattr(Parser, "parse", checked_parse)
    yield


@pytest.fixture(autouse=True)
def reset_pegcluster_logger() -> Iterator[None]:
    """Drop handlers installed by CLI tests so every test starts unconfigured."""
    yield
    logger = logging.getLogger("pegcluster")
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def layered_right() -> Grammar:
    """Right-recursive layered arithmetic grammar."""
    return load_grammar(LAYERED_RIGHT)


@pytest.fixture
def idiomatic() -> Grammar:
    """Repetition-based arithmetic grammar."""
    return load_grammar(IDIOMATIC)


@pytest.fixture
def layered_left() -> Grammar:
    """Left-recursive layered arithmetic grammar, broken automatically."""
    return load_grammar(LAYERED_LEFT)


@pytest.fixture
def cluster_grammar() -> Grammar:
    """Arithmetic expression cluster without captures."""
    return load_grammar(CLUSTER)


@pytest.fixture
def captured_cluster() -> Grammar:
    """Arithmetic expression cluster capturing add, sub, mul, div and num nodes."""
    return load_grammar(CAPTURED_CLUSTER)


@pytest.fixture
def grammar_corpus() -> dict[str, str]:
    """Every grammar source used by the round-trip checks."""
    return {
        **ARITHMETIC_STYLES,
        "captured-cluster": CAPTURED_CLUSTER,
        "hidden-recursion": HIDDEN_RECURSION,
        "tokenized-sum": TOKENIZED_SUM,
    }
