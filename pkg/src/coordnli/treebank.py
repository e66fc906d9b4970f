"""Penn-Treebank-style bracketed parse reading and span queries.

Trees come in one-per-line ``.trees`` files produced by an external
constituency parser; this module only ingests them. Functional tags after
"-" in labels (``NP-SBJ``) are kept verbatim; category matching downstream
uses the prefix before the dash.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

_TOKEN_ESCAPES = {"-LRB-": "(", "-RRB-": ")"}
_TOKEN_UNESCAPES = {"(": "-LRB-", ")": "-RRB-"}

_LEX_RE = re.compile(r"\(|\)|[^()\s]+")


class ParseError(ValueError):
    """Malformed bracketed input; carries the character offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (char {offset})")
        self.offset = offset


@dataclass(frozen=True)
class ParseNode:
    """One constituency-tree node over a half-open token span [start, end)."""

    label: str
    span: tuple[int, int]
    children: tuple["ParseNode", ...] = ()
    token: str | None = None

    def __post_init__(self):
        if not self.label:
            raise ValueError("node label must be non-empty")
        if (self.token is not None) == bool(self.children):
            raise ValueError("node must carry exactly one of token or children")
        start, end = self.span
        if self.token is not None:
            if end != start + 1:
                raise ValueError("leaf span must cover exactly one token")
        else:
            if (start, end) != (self.children[0].span[0], self.children[-1].span[1]):
                raise ValueError("internal span must cover its children")
            for left, right in zip(self.children, self.children[1:]):
                if left.span[1] != right.span[0]:
                    raise ValueError("child spans must be contiguous")

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    @property
    def base_label(self) -> str:
        """Category prefix before any functional "-" tag ("NP-SBJ" -> "NP")."""
        if self.label.startswith("-"):
            return self.label
        return self.label.split("-", 1)[0]

    def __len__(self) -> int:
        return self.span[1] - self.span[0]


def leaf(label: str, token: str, start: int = 0) -> ParseNode:
    token = _TOKEN_ESCAPES.get(token, token)
    return ParseNode(label=label, span=(start, start + 1), token=token)


def internal(label: str, children) -> ParseNode:
    children = tuple(children)
    if not children:
        raise ValueError("internal node needs at least one child")
    span = (children[0].span[0], children[-1].span[1])
    return ParseNode(label=label, span=span, children=children)


def parse_bracketed(text: str) -> ParseNode:
    """Parse a single bracketed tree; raises ParseError with a char offset."""
    toks = [(m.group(), m.start()) for m in _LEX_RE.finditer(text)]
    if not toks:
        raise ParseError("empty input", 0)
    counter = [0]
    node, pos = _parse_node(toks, 0, counter)
    if pos != len(toks):
        raise ParseError("trailing content after tree", toks[pos][1])
    return node


def _parse_node(toks, pos: int, counter: list[int]) -> tuple[ParseNode, int]:
    tok, off = toks[pos]
    if tok != "(":
        raise ParseError("expected '('", off)
    pos += 1
    if pos >= len(toks):
        raise ParseError("unbalanced parentheses", off)
    label, label_off = toks[pos]
    if label in ("(", ")"):
        raise ParseError("empty label", label_off)
    pos += 1
    token: str | None = None
    children: list[ParseNode] = []
    while pos < len(toks):
        tok, off = toks[pos]
        if tok == ")":
            if token is not None:
                return leaf(label, token, counter[0] - 1), pos + 1
            if not children:
                raise ParseError("node has neither token nor children", off)
            return internal(label, children), pos + 1
        if tok == "(":
            if token is not None:
                raise ParseError("leaf carries both token and children", off)
            child, pos = _parse_node(toks, pos, counter)
            children.append(child)
            continue
        # plain atom: the leaf token
        if children:
            raise ParseError("leaf carries both token and children", off)
        if token is not None:
            raise ParseError("leaf carries more than one token", off)
        token = tok
        counter[0] += 1
        pos += 1
    raise ParseError("unbalanced parentheses", toks[-1][1])


def serialize(node: ParseNode) -> str:
    """Inverse of parse_bracketed, up to whitespace normalization."""
    if node.is_leaf:
        token = _TOKEN_UNESCAPES.get(node.token, node.token)
        return f"({node.label} {token})"
    return f"({node.label} " + " ".join(serialize(c) for c in node.children) + ")"


def yield_tokens(node: ParseNode) -> list[str]:
    """In-order leaf tokens; length equals the node's span length."""
    if node.is_leaf:
        return [node.token]
    out: list[str] = []
    for child in node.children:
        out.extend(yield_tokens(child))
    return out


def iter_nodes(node: ParseNode) -> Iterator[ParseNode]:
    """Pre-order traversal."""
    yield node
    for child in node.children:
        yield from iter_nodes(child)


@dataclass(frozen=True)
class Sentence:
    """Token sequence with optional per-token BIO NER tags."""

    tokens: tuple[str, ...]
    ner: tuple[str, ...] | None = None
    source_id: str = ""

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence must have at least one token")
        if self.ner is not None and len(self.ner) != len(self.tokens):
            raise ValueError("NER tags must align one-to-one with tokens")


def sentence_from_tree(tree: ParseNode, ner=None, source_id: str = "") -> Sentence:
    return Sentence(
        tokens=tuple(yield_tokens(tree)),
        ner=tuple(ner) if ner is not None else None,
        source_id=source_id,
    )


def load_trees(path) -> list[ParseNode]:
    trees = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            trees.append(parse_bracketed(line))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}", exc.offset) from exc
    return trees


def load_corpus(trees_path, ner_path=None, source_prefix: str | None = None):
    """Read a .trees file (+ optional aligned .ner file) into (tree, Sentence) pairs."""
    trees_path = Path(trees_path)
    prefix = source_prefix if source_prefix is not None else trees_path.stem
    tree_lines = trees_path.read_text(encoding="utf-8").splitlines()
    ner_lines = None
    if ner_path is not None:
        ner_lines = Path(ner_path).read_text(encoding="utf-8").splitlines()
        if len(ner_lines) != len(tree_lines):
            raise ValueError(
                f"{ner_path}: {len(ner_lines)} lines, expected {len(tree_lines)}"
            )
    corpus = []
    for lineno, line in enumerate(tree_lines, 1):
        if not line.strip():
            continue
        try:
            tree = parse_bracketed(line)
        except ParseError as exc:
            raise ParseError(f"{trees_path.name} line {lineno}: {exc}", exc.offset) from exc
        ner = None
        if ner_lines is not None:
            ner = tuple(ner_lines[lineno - 1].split())
        corpus.append(
            (tree, sentence_from_tree(tree, ner=ner, source_id=f"{prefix}-{lineno:04d}"))
        )
    return corpus
