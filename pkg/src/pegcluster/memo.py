"""Memoization strategies and the memo expression."""

from collections import OrderedDict
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Protocol

from pegcluster.exceptions import MemoConfigurationError
from pegcluster.expressions import Expression
from pegcluster.state import Invoker, ParseOutcome, ParseState

DEFAULT_STRATEGY = "default"
PRECEDENCE_STRATEGY = "precedence"


@dataclass(frozen=True, slots=True)
class MemoKey:
    """Memo table key; ``precedence`` is set by precedence-aware strategies only."""

    expression_id: int
    position: int
    precedence: int | None = None


class MemoStrategy(Protocol):
    """A memo table and the policy that fills it."""

    def key(self, expression: Expression, state: ParseState) -> MemoKey:
        """Key for invoking ``expression`` in the current state."""

    def lookup(self, key: MemoKey) -> ParseOutcome | None:
        """Stored outcome for ``key``, or None when absent."""

    def store(self, key: MemoKey, outcome: ParseOutcome) -> None:
        """Remember ``outcome`` under ``key``."""

    def size(self) -> int:
        """Number of stored entries."""


type MemoStrategyFactory = Callable[[], MemoStrategy]


class UnboundedMemoStrategy:
    """Classic packrat table over (expression, position) pairs."""

    def __init__(self) -> None:
        """Number of stored entries."""
        self._table: dict[MemoKey, ParseOutcome] = {}

    def key(self, expression: Expression, state: ParseState) -> MemoKey:
        """Remember ``outcome`` under ``key``."""
        return MemoKey(expression.child, state.position)

    def lookup(self, key: MemoKey) -> ParseOutcome | None:
        """Stored outcome for ``key``, or None when absent."""
        return self._table.get(key)

    def store(self, key: MemoKey, outcome: ParseOutcome) -> None:
        """Remember ``outcome`` under ``key``."""
        self._table[key] = outcome

    def size(self) -> int:
        """Number of stored entries."""
        return len(self._table)


class BoundedMemoStrategy(UnboundedMemoStrategy):
    """Memo table holding at most ``capacity`` entries.

    When full, the least recently stored entry is evicted. Lookups do not
    refresh an entry.
    """

    def __init__(self, capacity: int) -> None:
        """Key for invoking ``expression`` in the current state."""
        super().__init__()
        if capacity < 1:
            raise MemoConfigurationError(
                f"memo capacity must be at least 1, got {capacity}"
            )
        self.capacity = capacity
        self._ordered: OrderedDict[MemoKey, ParseOutcome] = OrderedDict()

    def lookup(self, key: MemoKey) -> ParseOutcome | None:
        """Stored outcome for ``key``, or None when absent."""
        return self._ordered.get(key)

    def store(self, key: MemoKey, outcome: ParseOutcome) -> None:
        """Remember ``outcome`` under ``key``."""
        if key in self._ordered:
            del self._ordered[key]
        elif len(self._ordered) >= self.capacity:
            self._ordered.popitem(last=False)
        self._ordered[key] = outcome

    def size(self) -> int:
        """Number of stored entries."""
        return len(self._ordered)


class PrecedenceAwareMemoStrategy(UnboundedMemoStrategy):
    """Memo table over (expression, position, current precedence) triplets."""

    def key(self, expression: Expression, state: ParseState) -> MemoKey:
        """Key for invoking ``expression`` in the current state."""
        return MemoKey(expression.child, state.position, state.current_precedence)


def bounded_memo_strategy(capacity: int) -> BoundedMemoStrategy:
    """Memo strategy evicting the least recently stored entry beyond ``capacity``."""
    return BoundedMemoStrategy(capacity)


def default_memo_strategies() -> dict[str, MemoStrategyFactory]:
    """Strategies available to memo expressions unless configured otherwise."""
    return {
        DEFAULT_STRATEGY: UnboundedMemoStrategy,
        PRECEDENCE_STRATEGY: PrecedenceAwareMemoStrategy,
    }


def check_strategies(
    selectors: set[str], strategies: Mapping[str, MemoStrategyFactory]
) -> None:
    """Fail early when a memo expression names an unregistered strategy."""
    missing = sorted(selectors - strategies.keys())
    if missing:
        raise MemoConfigurationError(f"unknown memo strategy: {', '.join(missing)}")


class MemoInvoker(Invoker, Protocol):
    """Invoker that also hands out the per-parse memo tables."""

    def memo_strategy(self, selector: str, state: ParseState) -> MemoStrategy:
        """The strategy instance for ``selector`` in this parse."""


def parse_memo(
    parser: MemoInvoker, expression: Expression, state: ParseState
) -> ParseOutcome:
    """Return a stored outcome for the operand, or parse it and store the outcome.

    Inside left-recursive or cluster invocations the table is neither read
    nor written, since those results depend on seeds still growing.
    """
    if state.memo_suppressed:
        return parser.invoke(expression.child, state)
    strategy = parser.memo_strategy(expression.strategy, state)
    key = strategy.key(expression, state)
    stored = strategy.lookup(key)
    if stored is not None:
        return stored
    outcome = parser.invoke(expression.child, state)
    strategy.store(key, outcome)
    return outcome
