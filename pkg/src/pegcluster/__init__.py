"""
pegcluster

A PEG parsing library with left recursion, selectable associativity,
precedence and expression clusters, pluggable memoization and error
handling, and capture-based syntax trees.
"""

from pegcluster._version import get_version
from pegcluster.cluster import AnnotatedAlternate, cluster_from_alternates
from pegcluster.diagnostics import (
    ErrorHandler,
    ErrorReport,
    FarthestErrorHandler,
    farthest_error_handler,
)
from pegcluster.dsl import dump_grammar, load_grammar, load_grammar_file, prepare_source
from pegcluster.engine import ParseResult, Parser, ParserOptions, parse_root
from pegcluster.exceptions import (
    ClusterDefinitionError,
    ExpressionArityError,
    GrammarError,
    GrammarSyntaxError,
    MemoConfigurationError,
    NestingDepthError,
    PegError,
    TransformError,
    UnresolvedReferenceError,
)
from pegcluster.expressions import (
    ClusterGroup,
    Expression,
    Grammar,
    GrammarBuilder,
    Kind,
    build_expression,
)
from pegcluster.extensions import ABSENT, ExtensionKey
from pegcluster.memo import (
    MemoKey,
    MemoStrategy,
    bounded_memo_strategy,
    default_memo_strategies,
)
from pegcluster.passes import (
    IdentityVisitor,
    PreparedGrammar,
    break_cycles,
    compute_nullable,
    detect_left_cycles,
    isomorphic,
    prepare_grammar,
    resolve_references,
    transform,
)
from pegcluster.state import ParseOutcome, ParseState, read_extension, write_extension
from pegcluster.syntax import SyntaxNode, serialize_tree
from pegcluster.tracing import TraceVisitor

__version__ = get_version()

__all__ = [
    "ABSENT",
    "AnnotatedAlternate",
    "ClusterDefinitionError",
    "ClusterGroup",
    "ErrorHandler",
    "ErrorReport",
    "Expression",
    "ExpressionArityError",
    "ExtensionKey",
    "FarthestErrorHandler",
    "Grammar",
    "GrammarBuilder",
    "GrammarError",
    "GrammarSyntaxError",
    "IdentityVisitor",
    "Kind",
    "MemoConfigurationError",
    "MemoKey",
    "MemoStrategy",
    "NestingDepthError",
    "ParseOutcome",
    "ParseResult",
    "ParseState",
    "Parser",
    "ParserOptions",
    "PegError",
    "PreparedGrammar",
    "SyntaxNode",
    "TraceVisitor",
    "TransformError",
    "UnresolvedReferenceError",
    "__version__",
    "break_cycles",
    "bounded_memo_strategy",
    "build_expression",
    "cluster_from_alternates",
    "compute_nullable",
    "default_memo_strategies",
    "detect_left_cycles",
    "dump_grammar",
    "farthest_error_handler",
    "isomorphic",
    "load_grammar",
    "load_grammar_file",
    "parse_root",
    "prepare_grammar",
    "prepare_source",
    "read_extension",
    "resolve_references",
    "serialize_tree",
    "transform",
    "write_extension",
]
