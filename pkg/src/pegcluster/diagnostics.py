"""Error handlers and the reports they produce."""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Protocol

from pegcluster.expressions import TERMINAL_KINDS, Expression, Kind, describe
from pegcluster.state import ParseState

NO_FAILURE = -1


def line_column(text: str, position: int) -> tuple[int, int]:
    """1-based line and column of ``position`` in ``text``."""
    line = text.count("\n", 0, position) + 1
    column = position - (text.rfind("\n", 0, position) + 1) + 1
    return line, column


@dataclass(frozen=True)
class ErrorReport:
    """Where a parse got farthest before failing and what it expected there."""

    position: int
    line: int
    column: int
    expectations: tuple[str, ...] = ()
    token_context: str | None = None

    @property
    def has_failure(self) -> bool:
        """Whether any failure was reported at all."""
        return self.position != NO_FAILURE

    @property
    def detail(self) -> str:
        """What was expected at the failure position."""
        if not self.expectations:
            return "unexpected input"
        return f"expected one of {{{', '.join(self.expectations)}}}"

    def render(self) -> str:
        """Message in ``error at L:C: expected one of {...}`` form."""
        return f"error at {self.line}:{self.column}: {self.detail}"


class ErrorHandler(Protocol):
    """Receives every failure of a parse and summarizes them."""

    def on_failure(
        self, expression: Expression, position: int, state: ParseState
    ) -> None:
        """Called when ``expression`` fails after being invoked at ``position``."""

    def report(self, state: ParseState) -> ErrorReport:
        """Summary of the failures seen so far."""


type ErrorHandlerFactory = Callable[[], ErrorHandler]


class FarthestErrorHandler:
    """Tracks the farthest failure position and the expectations that failed there.

    Only terminals and negative lookaheads contribute expectations. Each is
    labelled by the innermost capture, token or rule that started at the
    failure position, falling back to its own description.
    """

    def __init__(self) -> None:
        self._expectations: set[str] = set()
        self._token_context: str | None = None

    def on_failure(
        self, expression: Expression, position: int, state: ParseState
    ) -> None:
        """Move the watermark forward or add an expectation at it."""
        if position < state.error_watermark:
            return
        if position > state.error_watermark:
            state.error_watermark = position
            self._expectations = set()
            self._token_context = None
        if (
            expression.kind not in TERMINAL_KINDS
            and expression.kind is not Kind.NOT_PREDICATE
        ):
            return
        self._expectations.add(_label(expression, position, state))
        for frame in reversed(state.frames):
            if frame.is_token:
                self._token_context = frame.label
                break

    def report(self, state: ParseState) -> ErrorReport:
        """Report for the farthest failure, or an empty one when nothing failed."""
        if state.error_watermark == NO_FAILURE:
            return ErrorReport(NO_FAILURE, 0, 0)
        line, column = line_column(state.input, state.error_watermark)
        return ErrorReport(
            state.error_watermark,
            line,
            column,
            tuple(sorted(self._expectations)),
            self._token_context,
        )


def _label(expression: Expression, position: int, state: ParseState) -> str:
    """Innermost frame label opened at ``position``, else the expression's own."""
    if state.frames and state.frames[-1].start == position:
        return state.frames[-1].label
    return expression.label or describe(expression)


def farthest_error_handler() -> FarthestErrorHandler:
    """The default error handler."""
    return FarthestErrorHandler()
