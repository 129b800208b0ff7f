"""Named-node syntax trees for Java source.

The trees produced here contain only *named* nodes: every node corresponds
to a grammar construct (class_declaration, method_invocation, string_literal,
...). Punctuation, keywords, and other anonymous tokens are consumed during
parsing and never appear as nodes.

Node kind names follow the tree-sitter-java convention (snake_case) so that
argument signatures such as ``{'identifier': 3, 'ternary_expression': 1}``
read naturally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

# Kinds that must never appear in a tree. Used by property tests to check
# the named-node discipline.
ANONYMOUS_KINDS = frozenset(
    {",", ";", "(", ")", "{", "}", "[", "]", ".", "+", "-", "?", ":",
     "if", "else", "for", "while", "return", "new", "class", "=",
     "comment", "whitespace"}
)

# Leaf kinds that carry a value rather than children.
LITERAL_KINDS = frozenset(
    {"string_literal", "character_literal", "decimal_integer_literal",
     "hex_integer_literal", "decimal_floating_point_literal",
     "true", "false", "null_literal"}
)


@dataclass
class SyntaxNode:
    """One named node: a kind, a source span, and ordered named children."""

    kind: str
    start: int
    end: int
    children: list["SyntaxNode"] = field(default_factory=list)
    # Decoded value for literal leaves (unescaped string, int, ...).
    value: object = None
    # Back-reference to the full source text for .text slicing.
    source: str = ""

    @property
    def text(self) -> str:
        return self.source[self.start:self.end]

    def walk(self) -> Iterator["SyntaxNode"]:
        """Pre-order traversal including self."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def descendants(self) -> Iterator["SyntaxNode"]:
        for child in self.children:
            yield from child.walk()

    def find_all(self, kind: str) -> list["SyntaxNode"]:
        return [n for n in self.walk() if n.kind == kind]

    def named_node_count(self) -> int:
        """Number of named nodes strictly inside this node."""
        return sum(1 for _ in self.descendants())

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"SyntaxNode({self.kind}, {self.start}:{self.end})"


@dataclass
class ParseWarning:
    """A non-fatal parse problem, recorded per node or per file."""

    path: str
    offset: int
    message: str


@dataclass
class SourceUnit:
    """A parsed Java file: path, text, and the normalized named-node tree."""

    path: str
    text: str
    root: SyntaxNode
    warnings: list[ParseWarning] = field(default_factory=list)

    @property
    def parse_failed(self) -> bool:
        return self.root.kind == "parse_failed"


def node_at(root: SyntaxNode, start: int, end: int) -> SyntaxNode | None:
    """Locate the smallest node covering [start, end), if any."""
    best: SyntaxNode | None = None
    node = root
    while True:
        if node.start <= start and end <= node.end:
            best = node
            for child in node.children:
                if child.start <= start and end <= child.end:
                    node = child
                    break
            else:
                return best
        else:
            return best


def string_literals(node: SyntaxNode) -> set[str]:
    """Decoded values of all string literals within ``node`` (inclusive)."""
    return {n.value for n in node.walk()
            if n.kind == "string_literal" and isinstance(n.value, str)}
