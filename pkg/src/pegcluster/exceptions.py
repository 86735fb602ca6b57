"""Custom exceptions for the pegcluster parsing library."""


class PegError(Exception):
    """Base class for all pegcluster errors."""


class GrammarError(PegError):
    """Raised when a grammar cannot be built, resolved or validated."""


class ExpressionArityError(GrammarError):
    """Raised when an expression is built with the wrong number of children."""


class UnresolvedReferenceError(GrammarError):
    """Raised when a reference names a rule that does not exist."""

    def __init__(self, reference: str, source_rule: str | None) -> None:
        self.reference = reference
        self.source_rule = source_rule
        where = f" (in rule {source_rule})" if source_rule else ""
        super().__init__(f"unresolved reference {reference}{where}")


class ClusterDefinitionError(GrammarError):
    """Raised when expression cluster annotations are inconsistent."""


class GrammarSyntaxError(GrammarError):
    """Raised when grammar source text cannot be parsed."""

    def __init__(self, line: int, column: int, detail: str) -> None:
        self.line = line
        self.column = column
        self.detail = detail
        super().__init__(f"{line}:{column}: {detail}")


class TransformError(PegError):
    """Raised when a grammar visitor fails on a node."""

    def __init__(self, node_id: int, detail: str) -> None:
        self.node_id = node_id
        super().__init__(f"transform failed on node {node_id}: {detail}")


class MemoConfigurationError(PegError):
    """Raised for invalid memoization settings."""


class BenchConfigurationError(PegError):
    """Raised when a benchmark configuration is out of range."""


class NestingDepthError(PegError):
    """Raised when an input nests deeper than the interpreter stack allows."""

    def __init__(self, length: int) -> None:
        self.length = length
        super().__init__(
            f"input of {length} characters nests too deeply to parse recursively"
        )
