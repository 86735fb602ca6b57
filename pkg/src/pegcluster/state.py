"""Per-parse mutable state and parse outcomes."""

from collections import Counter
from dataclasses import dataclass, field
from typing import Protocol

from pegcluster.expressions import Grammar
from pegcluster.extensions import Absent, ExtensionKey, ExtensionMap
from pegcluster.syntax import SyntaxNode


@dataclass(frozen=True, slots=True)
class WhitespaceMarks:
    """Where the last token's text ended and where its skipped whitespace ended."""

    non_whitespace: int
    token_end: int


@dataclass(frozen=True, slots=True)
class ParseOutcome:
    """Result of invoking one expression at one position.

    Successful outcomes leaving an invocation carry the whitespace marks in
    force at their end, so seeds and memo entries replay them exactly.
    """

    success: bool
    end: int = -1
    nodes: tuple[SyntaxNode, ...] = ()
    marks: WhitespaceMarks | None = field(default=None, compare=False)

    def consumed_more_than(self, other: "ParseOutcome") -> bool:
        """Growth test for seeds: success beats failure, then a strictly larger end."""
        if not self.success:
            return False
        if not other.success:
            return True
        return self.end > other.end


FAILURE = ParseOutcome(False)


@dataclass(frozen=True, slots=True)
class Frame:
    """A labelled invocation on the call stack, used to word error messages."""

    label: str
    start: int
    is_token: bool


class ParseState:
    """Mutable state confined to one parse."""

    def __init__(self, text: str) -> None:
        self.input = text
        self.position = 0
        self.seeds: dict[int, dict[int, ParseOutcome]] = {}
        self.blocked: set[int] = set()
        self.precedences: dict[int, int] = {}
        self.current_precedence = 0
        self.cluster_depth: dict[int, int] = {}
        self.suppression_depth = 0
        self.error_watermark = -1
        self.non_whitespace_watermark = 0
        self.token_end = -1
        self.silent_depth = 0
        self.invocation_counters: Counter[int] = Counter()
        self.extensions = ExtensionMap()
        self.frames: list[Frame] = []
        self.seed_count = 0
        self.peak_seed_count = 0

    def whitespace_marks(self) -> WhitespaceMarks:
        """Snapshot of the whitespace watermarks."""
        return WhitespaceMarks(self.non_whitespace_watermark, self.token_end)

    def restore_marks(self, marks: WhitespaceMarks) -> None:
        """Put the whitespace watermarks back to ``marks``."""
        self.non_whitespace_watermark = marks.non_whitespace
        self.token_end = marks.token_end

    @property
    def reporting_failures(self) -> bool:
        """False while skipping whitespace or probing a negative lookahead."""
        return self.silent_depth == 0

    @property
    def memo_suppressed(self) -> bool:
        """True while a left-recursive or cluster invocation is on the stack."""
        return self.suppression_depth > 0

    def get_seed(self, position: int, node_id: int) -> ParseOutcome | None:
        """Seed for ``node_id`` at ``position``, if one is growing."""
        at_position = self.seeds.get(position)
        if at_position is None:
            return None
        return at_position.get(node_id)

    def put_seed(self, position: int, node_id: int, outcome: ParseOutcome) -> None:
        """Create or grow the seed for ``node_id`` at ``position``."""
        at_position = self.seeds.setdefault(position, {})
        if node_id not in at_position:
            self.seed_count += 1
            self.peak_seed_count = max(self.peak_seed_count, self.seed_count)
        at_position[node_id] = outcome

    def remove_seed(self, position: int, node_id: int) -> None:
        """Drop the seed for ``node_id`` at ``position``."""
        at_position = self.seeds[position]
        del at_position[node_id]
        self.seed_count -= 1
        if not at_position:
            del self.seeds[position]

    def is_clean(self) -> bool:
        """Whether every seed, block and cluster precedence has been released."""
        return (
            not self.seeds
            and not self.blocked
            and not self.precedences
            and not self.cluster_depth
            and self.suppression_depth == 0
            and self.current_precedence == 0
        )


class Invoker(Protocol):
    """What expression routines need from the parse driver."""

    @property
    def grammar(self) -> Grammar:
        """Grammar being parsed."""

    def invoke(self, node_id: int, state: ParseState) -> ParseOutcome:
        """Invoke expression ``node_id`` at ``state.position``."""


def read_extension[T](
    holder: ParseState | ExtensionMap, key: ExtensionKey[T]
) -> T | Absent:
    """Read an extension value from a parse state or an expression's map."""
    extensions = holder.extensions if isinstance(holder, ParseState) else holder
    return extensions.get(key)


def write_extension[T](
    holder: ParseState | ExtensionMap, key: ExtensionKey[T], value: T
) -> None:
    """Write an extension value; expression maps reject writes once built."""
    extensions = holder.extensions if isinstance(holder, ParseState) else holder
    extensions.set(key, value)
