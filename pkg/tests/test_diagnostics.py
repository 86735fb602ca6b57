"""Tests for the farthest-failure error handler and error reports."""

from __future__ import annotations

from pegcluster.diagnostics import (
    NO_FAILURE,
    ErrorReport,
    FarthestErrorHandler,
    line_column,
)
from pegcluster.engine import Parser, ParserOptions, parse_root
from pegcluster.expressions import Expression, Grammar, GrammarBuilder, Kind
from pegcluster.passes import prepare_grammar
from pegcluster.state import ParseState


def test_line_column_is_one_based() -> None:
    text = "ab\ncd\n"
    assert line_column(text, 0) == (1, 1)
    assert line_column(text, 4) == (2, 2)
    assert line_column(text, 6) == (3, 1)


def test_trailing_operator_on_layered_grammar(layered_right: Grammar) -> None:
    report = parse_root(layered_right, "1+", full_match=True).report
    assert report.position == 2
    assert "N" in report.expectations


def test_farthest_error_on_double_operator(layered_right: Grammar) -> None:
    report = parse_root(layered_right, "1+2*+3", full_match=True).report
    assert report.position == 4
    assert (report.line, report.column) == (1, 5)
    assert report.expectations == ("N",)


def test_report_after_success_points_inside_the_input(layered_right: Grammar) -> None:
    result = parse_root(layered_right, "1+2", full_match=True)
    assert result.success
    assert result.report.position <= 3


def test_only_the_farthest_position_is_kept() -> None:
    handler = FarthestErrorHandler()
    state = ParseState("abcdef")
    early = Expression(id=0, kind=Kind.LITERAL, text="x")
    late = Expression(id=1, kind=Kind.LITERAL, text="y")

    handler.on_failure(early, 3, state)
    handler.on_failure(late, 5, state)
    handler.on_failure(early, 3, state)

    report = handler.report(state)
    assert report.position == 5
    assert report.expectations == ("'y'",)


def test_composite_failures_move_the_position_without_expectations() -> None:
    handler = FarthestErrorHandler()
    state = ParseState("abc")
    handler.on_failure(Expression(id=0, kind=Kind.SEQUENCE), 2, state)
    report = handler.report(state)
    assert report.position == 2
    assert report.render() == "error at 1:3: unexpected input"


def test_no_failure_at_all() -> None:
    report = FarthestErrorHandler().report(ParseState(""))
    assert report.position == NO_FAILURE
    assert not report.has_failure


def test_render_lists_expectations() -> None:
    report = ErrorReport(4, 2, 3, ("'+'", "N"))
    assert report.render() == "error at 2:3: expected one of {'+', N}"


def test_failures_inside_negative_lookahead_are_silent() -> None:
    b = GrammarBuilder()
    keyword = b.seq(b.literal("if"), b.not_(b.char_class(("a", "z"))))
    b.rule("R", b.seq(keyword, b.literal(";")))
    grammar = prepare_grammar(b.build()).grammar

    report = parse_root(grammar, "if!", full_match=True).report

    assert report.position == 2
    assert report.expectations == ("';'",)


def test_tokens_record_their_context() -> None:
    b = GrammarBuilder()
    number = b.token(b.one_or_more(b.char_class(("0", "9"))), "number")
    b.rule("R", b.seq(number, b.token(b.literal("!"), "bang")))
    b.rule("WS", b.zero_or_more(b.char_class(" ")))
    grammar = prepare_grammar(b.build(root="R", whitespace="WS")).grammar

    report = parse_root(grammar, "12 ?", full_match=True).report

    assert report.position == 3
    assert report.expectations == ("bang",)
    assert report.token_context == "bang"


def test_custom_error_handler_is_used() -> None:
    seen: list[tuple[str, int]] = []

    class Recording(FarthestErrorHandler):
        def on_failure(
            self, expression: Expression, position: int, state: ParseState
        ) -> None:
            seen.append((expression.kind.value, position))
            super().on_failure(expression, position, state)

    b = GrammarBuilder()
    b.rule("R", b.literal("a"))
    grammar = prepare_grammar(b.build()).grammar
    result = Parser(grammar, ParserOptions(error_handler=Recording)).parse("b")

    assert not result.success
    assert seen == [("Literal", 0)]
