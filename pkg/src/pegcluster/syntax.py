"""Syntax tree nodes built by capture expressions, and their serialization."""

import json
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum


class TreeFormat(StrEnum):
    """Supported tree renderings."""

    SEXPR = "sexpr"
    JSON = "json"


ROOT_NAME = "root"


@dataclass(frozen=True, slots=True)
class SyntaxNode:
    """Captured tree node spanning ``input[start:end]``."""

    name: str
    start: int
    end: int
    text: str | None = None
    children: tuple["SyntaxNode", ...] = ()

    def walk(self) -> list["SyntaxNode"]:
        """This node and all its descendants, in preorder."""
        found: list[SyntaxNode] = []
        stack: list[SyntaxNode] = [self]
        while stack:
            node = stack.pop()
            found.append(node)
            stack.extend(reversed(node.children))
        return found


def _quoted(text: str) -> str:
    """JSON string literal for ``text``."""
    return json.dumps(text, ensure_ascii=False)


def _sexpr(root: SyntaxNode) -> str:
    """S-expression text of the tree under ``root``."""
    pieces: list[str] = []
    pending: list[SyntaxNode | str] = [root]
    while pending:
        item = pending.pop()
        if isinstance(item, str):
            pieces.append(item)
            continue
        pieces.append(f"({item.name}")
        if item.text is not None:
            pieces.append(f" {_quoted(item.text)}")
        pending.append(")")
        for child in reversed(item.children):
            pending.extend((child, " "))
    return "".join(pieces)


def _json_tree(root: SyntaxNode) -> str:
    """Same text as ``json.dumps(..., sort_keys=True)`` of the nested node dicts."""
    pieces: list[str] = []
    pending: list[SyntaxNode | str] = [root]
    while pending:
        item = pending.pop()
        if isinstance(item, str):
            pieces.append(item)
            continue
        pieces.append('{"children": [')
        tail = f'], "name": {_quoted(item.name)}, "span": [{item.start}, {item.end}]'
        if item.text is not None:
            tail += f', "text": {_quoted(item.text)}'
        pending.append(tail + "}")
        for index, child in enumerate(reversed(item.children)):
            if index:
                pending.append(", ")
            pending.append(child)
    return "".join(pieces)


def _as_root(nodes: Sequence[SyntaxNode]) -> SyntaxNode:
    """The single node, or a synthetic root over zero or several."""
    if len(nodes) == 1:
        return nodes[0]
    start = nodes[0].start if nodes else 0
    end = nodes[-1].end if nodes else 0
    return SyntaxNode(ROOT_NAME, start, end, None, tuple(nodes))


def serialize_tree(nodes: SyntaxNode | Sequence[SyntaxNode], tree_format: str) -> str:
    """Render a node (or the node list of a parse) deterministically.

    Rendering walks the tree with an explicit stack, so depth is unbounded.
    A list with several top-level nodes, or none at all, is wrapped in a
    synthetic ``root`` node, so an empty parse renders as ``(root)``.
    """
    root = nodes if isinstance(nodes, SyntaxNode) else _as_root(nodes)
    match TreeFormat(tree_format):
        case TreeFormat.SEXPR:
            return _sexpr(root)
        case TreeFormat.JSON:
            return _json_tree(root)
