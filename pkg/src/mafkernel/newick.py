"""Newick reading and writing for binary trees without branch lengths.

Only the bare topology subset is accepted: unquoted labels on leaves,
no internal labels, no branch lengths, no comments.  Anything else is
rejected with a positioned :class:`NewickError` instead of being skipped.

Documents hold one tree per line.  Blank lines and ``#`` lines are ignored,
except that a ``# rooted`` / ``# unrooted`` header declares rootedness.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .tree import RESERVED, Nested, PhyloTree, TreeError, TreeSet


class NewickError(TreeError):
    """A Newick input error with a 1-based line/column position.

    ``kind`` is one of ``syntax``, ``arity``, ``duplicate``, ``empty-label``,
    ``taxa`` or ``rootedness``.
    """

    def __init__(self, kind: str, message: str, line: int = 1, column: int = 1):
        self.kind = kind
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message} [{kind}]")


_UNSUPPORTED = {
    ":": "branch lengths are not supported",
    "[": "comments are not supported",
    "]": "comments are not supported",
    "'": "quoted labels are not supported",
}


def parse_newick(text: str, rooted: bool, line: int = 1) -> PhyloTree:
    """Parse one Newick string into a :class:`PhyloTree`.

    ``rooted`` is never inferred: a rooted tree needs a two-child top-level
    group, an unrooted one a three-child group (or ``x;`` / ``(x,y);``).
    """
    pos = 0
    size = len(text)

    def err(kind: str, msg: str, at: int) -> NewickError:
        return NewickError(kind, msg, line, at + 1)

    def skip_ws() -> None:
        nonlocal pos
        while pos < size and text[pos].isspace():
            pos += 1

    def read_label() -> str:
        nonlocal pos
        start = pos
        while pos < size and not text[pos].isspace() and text[pos] not in RESERVED:
            pos += 1
        if pos == start:
            if pos < size and text[pos] in _UNSUPPORTED:
                raise err("syntax", _UNSUPPORTED[text[pos]], pos)
            raise err("empty-label", "expected a taxon label", pos)
        return text[start:pos]

    # each open group: [children, position of '(']
    stack: list[list] = []
    labels_at: dict[str, int] = {}
    result: Nested | None = None
    top_pos = 0

    skip_ws()
    if pos >= size:
        raise err("syntax", "empty tree", pos)
    while True:
        skip_ws()
        if pos >= size:
            raise err("syntax", "unexpected end of input", pos)
        ch = text[pos]
        if ch == "(":
            stack.append([[], pos])
            pos += 1
            continue
        # a subtree: leaf label
        at = pos
        lab = read_label()
        if lab in labels_at:
            raise err("duplicate", f"duplicate taxon {lab!r}", at)
        labels_at[lab] = at
        node: Nested = lab
        # close as many groups as the following tokens demand
        while True:
            skip_ws()
            if not stack:
                result = node
                break
            if pos >= size:
                raise err("syntax", "unexpected end of input, missing ')'", pos)
            ch = text[pos]
            if ch == ",":
                stack[-1][0].append(node)
                pos += 1
                break
            if ch == ")":
                children, open_at = stack.pop()
                children.append(node)
                pos += 1
                if stack and len(children) != 2:
                    raise err("arity", f"internal group has {len(children)} children, expected 2", open_at)
                node = tuple(children)
                top_pos = open_at
                skip_ws()
                if pos < size and text[pos] not in ",);":
                    if text[pos] in _UNSUPPORTED:
                        raise err("syntax", _UNSUPPORTED[text[pos]], pos)
                    raise err("syntax", "internal node labels are not supported", pos)
                continue
            if ch in _UNSUPPORTED:
                raise err("syntax", _UNSUPPORTED[ch], pos)
            raise err("syntax", f"unexpected character {ch!r}", pos)
        if result is not None:
            break

    skip_ws()
    if pos >= size or text[pos] != ";":
        raise err("syntax", "expected ';' at end of tree", pos)
    pos += 1
    skip_ws()
    if pos < size:
        raise err("syntax", "trailing characters after ';'", pos)

    if isinstance(result, tuple):
        k = len(result)
        if rooted and k != 2:
            raise err("arity", f"rooted top-level group has {k} children, expected 2", top_pos)
        if not rooted:
            leaf_pair = k == 2 and all(isinstance(c, str) for c in result)
            if k != 3 and not leaf_pair:
                hint = " (re-serialize with a three-way top-level group, or pass rooted)" if k == 2 else ""
                raise err("arity", f"unrooted top-level group has {k} children, expected 3{hint}", top_pos)
    try:
        return PhyloTree.from_nested(result, rooted)
    except NewickError:
        raise
    except TreeError as exc:
        raise err("syntax", str(exc), 0) from None


def _format(nested: Nested) -> str:
    if isinstance(nested, str):
        return nested
    parts: list[str] = []
    stack: list = [nested]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
        elif item is None:
            parts.append(")")
        else:
            parts.append("(")
            stack.append(None)
            for i, child in enumerate(reversed(item)):
                if i:
                    stack.append(",")
                stack.append(child)
    return "".join(parts)


def serialize_newick(tree: PhyloTree) -> str:
    """Deterministic Newick text: children by minimum descendant label."""
    return _format(tree.to_nested()) + ";"


# -- documents ---------------------------------------------------------------


def _header_flag(line: str) -> bool | None:
    word = line.lstrip("#").strip().lower()
    if word == "rooted":
        return True
    if word == "unrooted":
        return False
    return None


def parse_document(text: str, rooted: bool | None = None) -> list[PhyloTree]:
    """Parse a one-tree-per-line document.

    ``rooted`` given explicitly must agree with any header declaration;
    if neither is present the document is rejected.
    """
    declared = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            flag = _header_flag(stripped)
            if flag is not None:
                if declared is not None and flag != declared:
                    raise NewickError("rootedness", "mixed rooted/unrooted declarations", lineno, 1)
                declared = flag
            continue
        entries.append((lineno, raw))
    if rooted is None:
        rooted = declared
    elif declared is not None and declared != rooted:
        raise NewickError("rootedness", "header declaration contradicts the requested rootedness", 1, 1)
    if rooted is None:
        raise NewickError("rootedness", "rootedness must be declared (flag or '# rooted'/'# unrooted' header)", 1, 1)
    trees = []
    for lineno, raw in entries:
        tree = parse_newick(raw, rooted, line=lineno)
        if trees and tree.taxa != trees[0].taxa:
            raise NewickError("taxa", "tree has a different taxon set from the first tree", lineno, 1)
        trees.append(tree)
    return trees


def format_document(trees: Iterable[PhyloTree]) -> str:
    trees = list(trees)
    head = "# rooted" if trees and trees[0].rooted else "# unrooted"
    return "\n".join([head] + [serialize_newick(tr) for tr in trees]) + "\n"


def read_treeset(path: str | Path, rooted: bool | None = None) -> TreeSet:
    trees = parse_document(Path(path).read_text(encoding="utf-8"), rooted)
    if len(trees) < 2:
        raise NewickError("taxa", f"need at least two trees, found {len(trees)}", 1, 1)
    return TreeSet(tuple(trees))


def write_treeset(path: str | Path, trees: Iterable[PhyloTree]) -> None:
    Path(path).write_text(format_document(trees), encoding="utf-8")
