"""Shared type definitions for the pegcluster command line and reports."""

from dataclasses import dataclass
from typing import TypedDict


class ExpressionCount(TypedDict):
    """Invocation count of one expression."""

    node_id: int
    label: str
    invocations: int


class StatsReport(TypedDict):
    """Invocation statistics of one parse."""

    total_invocations: int
    peak_seed_count: int
    wall_ms: float
    most_invoked: list[ExpressionCount]


class BenchRow(TypedDict):
    """One row of a benchmark table."""

    style: str
    levels: int
    ops: int
    digit_invocations: int
    total_invocations: int
    wall_ms: float


@dataclass
class LoggingOptions:
    """Logging options from the command line."""

    log_level: str
    log_file: str | None


@dataclass
class ParseArgs:
    """Arguments of ``peg parse``."""

    grammar: str
    input: str
    tree_format: str
    stats: bool
    trace: bool
    full_match: bool
    logging: LoggingOptions


@dataclass
class CheckArgs:
    """Arguments of ``peg check``."""

    grammar: str
    logging: LoggingOptions


@dataclass
class BenchArgs:
    """Arguments of ``peg bench``."""

    levels: int
    ops: int
    style: str
    memo: bool
    left_recur: bool
    input_len: int
    reps: int
    seed: int
    logging: LoggingOptions
