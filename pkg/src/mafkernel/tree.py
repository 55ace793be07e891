"""Binary phylogenetic trees and the structural primitives built on them.

Trees are immutable.  Vertex ids are internal integers and never leak into
serialized output; equality between trees is always topological.

A *nested* form is used as the construction format: a leaf is its label
(``str``) and an internal vertex is a ``tuple`` of child subtrees.  Rooted
trees nest from the root; unrooted trees nest from an arbitrary internal
vertex, so their top-level tuple has three members (or is ``(x, y)`` for the
two-taxon tree).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

Nested = Union[str, tuple]

RESERVED = frozenset("(),;:'[] \t\r\n")


class TreeError(ValueError):
    """Raised for malformed trees, unknown taxa and similar domain errors."""


def check_label(label: str) -> str:
    if not isinstance(label, str) or not label:
        raise TreeError(f"empty or non-text taxon label: {label!r}")
    bad = set(label) & RESERVED
    if bad or any(ch.isspace() for ch in label):
        raise TreeError(f"taxon label {label!r} contains reserved characters")
    return label


class PhyloTree:
    """A rooted or unrooted binary phylogenetic tree."""

    __slots__ = ("_adj", "_labels", "_leaf", "rooted", "root", "_parent", "taxa", "_canon")

    def __init__(
        self,
        adjacency: Sequence[Sequence[int]],
        labels: Sequence[str | None],
        rooted: bool,
        root: int | None = None,
    ):
        self._adj = tuple(tuple(nb) for nb in adjacency)
        self._labels = tuple(labels)
        self.rooted = bool(rooted)
        self.root = root
        self._canon: str | None = None
        leaf = {}
        for v, lab in enumerate(self._labels):
            if lab is not None:
                check_label(lab)
                if lab in leaf:
                    raise TreeError(f"duplicate taxon {lab!r}")
                leaf[lab] = v
        self._leaf = leaf
        self.taxa = frozenset(leaf)
        self._parent: tuple[int, ...] | None = None
        self._validate()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_nested(cls, nested: Nested, rooted: bool) -> "PhyloTree":
        adj: list[list[int]] = []
        labels: list[str | None] = []
        stack: list[tuple[Nested, int]] = [(nested, -1)]
        while stack:
            node, par = stack.pop()
            v = len(adj)
            adj.append([])
            if par >= 0:
                adj[par].append(v)
                adj[v].append(par)
            if isinstance(node, str):
                labels.append(node)
            else:
                labels.append(None)
                if not isinstance(node, tuple):
                    raise TreeError(f"nested node must be str or tuple, got {type(node).__name__}")
                for child in reversed(node):
                    stack.append((child, v))
        if not rooted and len(adj) == 3 and labels[0] is None and len(adj[0]) == 2:
            # ``(x, y)`` unrooted: two leaves joined by a single edge
            a, b = adj[0]
            return cls([[1], [0]], [labels[a], labels[b]], rooted=False)
        return cls(adj, labels, rooted, root=0 if rooted else None)

    @classmethod
    def caterpillar(cls, order: Sequence[str], rooted: bool) -> "PhyloTree":
        """Caterpillar whose leaves read ``order`` along the spine.

        The first two and the last two taxa form cherries (unrooted); in the
        rooted case the root is on the pendant edge of ``order[0]``.
        """
        order = list(order)
        if len(order) <= 2 or rooted:
            nested: Nested = order[-1]
            for lab in reversed(order[:-1]):
                nested = (lab, nested)
            if len(order) == 1:
                nested = order[0]
            return cls.from_nested(nested, rooted)
        nested = (order[-2], order[-1])
        for lab in reversed(order[2:-2]):
            nested = (lab, nested)
        return cls.from_nested((order[0], order[1], nested), rooted=False)

    def _validate(self) -> None:
        nv = len(self._adj)
        n = len(self._leaf)
        if nv == 0 or n == 0:
            raise TreeError("a tree needs at least one taxon")
        edges = sum(len(nb) for nb in self._adj)
        if edges % 2 or edges // 2 != nv - 1:
            raise TreeError("tree must be connected and acyclic")
        for v, nb in enumerate(self._adj):
            if v in nb or len(set(nb)) != len(nb):
                raise TreeError("self loops and parallel edges are not allowed")
            for u in nb:
                if v not in self._adj[u]:
                    raise TreeError("adjacency is not symmetric")
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in self._adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if len(seen) != nv:
            raise TreeError("tree must be connected")

        if nv == 1:
            if self._labels[0] is None:
                raise TreeError("single-vertex tree must be labelled")
            if self.rooted:
                self.root = 0
                self._parent = (-1,)
            return

        for v, nb in enumerate(self._adj):
            lab = self._labels[v]
            if lab is not None and len(nb) != 1:
                raise TreeError(f"taxon {lab!r} is not a leaf")
            if lab is None and len(nb) == 1:
                raise TreeError("unlabelled leaf")

        if self.rooted:
            r = self.root
            if r is None or not 0 <= r < nv:
                raise TreeError("rooted tree needs a root vertex")
            if len(self._adj[r]) != 2 or self._labels[r] is not None:
                raise TreeError("root must have out-degree 2")
            for v, nb in enumerate(self._adj):
                if v != r and self._labels[v] is None and len(nb) != 3:
                    raise TreeError("internal vertices must have in-degree 1 and out-degree 2")
            parent = [-1] * nv
            stack = [r]
            while stack:
                v = stack.pop()
                for u in self._adj[v]:
                    if u != parent[v]:
                        parent[u] = v
                        stack.append(u)
            self._parent = tuple(parent)
        else:
            self.root = None
            if n == 2:
                if nv != 2:
                    raise TreeError("two-taxon unrooted tree is a single edge")
                return
            for v, nb in enumerate(self._adj):
                if self._labels[v] is None and len(nb) != 3:
                    raise TreeError("internal vertices of an unrooted tree must have degree 3")

    # -- accessors --------------------------------------------------------

    def __len__(self) -> int:
        return len(self._leaf)

    @property
    def n(self) -> int:
        return len(self._leaf)

    @property
    def num_vertices(self) -> int:
        return len(self._adj)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def label(self, v: int) -> str | None:
        return self._labels[v]

    def leaf(self, taxon: str) -> int:
        try:
            return self._leaf[taxon]
        except KeyError:
            raise TreeError(f"unknown taxon {taxon!r}") from None

    def parent(self, v: int) -> int:
        """Parent vertex in a rooted tree (-1 at the root)."""
        if not self.rooted:
            raise TreeError("parent() is only defined for rooted trees")
        return self._parent[v]

    def taxon_parent(self, taxon: str) -> int | None:
        """The vertex adjacent to a taxon's leaf (``None`` for a one-taxon tree)."""
        nb = self._adj[self.leaf(taxon)]
        return nb[0] if nb else None

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` pairs; parent first for rooted trees, ``u < v`` otherwise."""
        out = []
        for v, nb in enumerate(self._adj):
            for u in nb:
                if self.rooted:
                    if self._parent[u] == v:
                        out.append((v, u))
                elif v < u:
                    out.append((v, u))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhyloTree):
            return NotImplemented
        return (
            self.rooted == other.rooted
            and self.taxa == other.taxa
            and canonical_form(self) == canonical_form(other)
        )

    def __hash__(self) -> int:
        return hash((self.rooted, canonical_form(self)))

    def __repr__(self) -> str:
        kind = "rooted" if self.rooted else "unrooted"
        return f"PhyloTree({canonical_form(self)!r}, {kind})"

    def to_nested(self) -> Nested:
        """Deterministic nested form, children ordered by minimum descendant label.

        Unrooted trees are anchored at the internal vertex adjacent to the
        minimum-label leaf.
        """
        if self.num_vertices == 1:
            return self._labels[0]
        if not self.rooted and self.n == 2:
            return tuple(sorted(self.taxa))
        if self.rooted:
            top = self.root
        else:
            top = self._adj[self._leaf[min(self.taxa)]][0]
        return _build_sorted(self, top)


def _postorder(tree: PhyloTree, start: int) -> tuple[list[int], list[int]]:
    """Iterative DFS from ``start``: returns (postorder, parent-in-traversal)."""
    parent = [-1] * tree.num_vertices
    order = []
    stack = [start]
    parent[start] = start
    while stack:
        v = stack.pop()
        order.append(v)
        for u in tree._adj[v]:
            if parent[u] == -1:
                parent[u] = v
                stack.append(u)
    parent[start] = -1
    order.reverse()
    return order, parent


def _build_sorted(tree: PhyloTree, top: int) -> Nested:
    order, parent = _postorder(tree, top)
    built: dict[int, tuple[str, Nested]] = {}
    for v in order:
        lab = tree._labels[v]
        if lab is not None:
            built[v] = (lab, lab)
            continue
        kids = sorted(built.pop(u) for u in tree._adj[v] if u != parent[v])
        built[v] = (kids[0][0], tuple(k[1] for k in kids))
    return built[top][1]


def _encode_from(tree: PhyloTree, top: int, skip: int = -1) -> str:
    """Rooted canonical encoding of the subtree hanging at ``top`` (away from ``skip``)."""
    parent = [-1] * tree.num_vertices
    parent[top] = skip
    order = []
    stack = [top]
    while stack:
        v = stack.pop()
        order.append(v)
        for u in tree._adj[v]:
            if u != parent[v]:
                parent[u] = v
                stack.append(u)
    enc: dict[int, str] = {}
    for v in reversed(order):
        lab = tree._labels[v]
        if lab is not None:
            enc[v] = lab
        else:
            kids = sorted(enc.pop(u) for u in tree._adj[v] if u != parent[v])
            enc[v] = "(" + ",".join(kids) + ")"
    return enc[top]


def canonical_form(tree: PhyloTree) -> str:
    """Canonical text encoding; equal iff the trees are label-preserving isomorphic.

    Rooted trees: recursive encoding with lexicographically sorted children.
    Unrooted trees: rooted at the edge incident to the minimum-label leaf.
    """
    if tree._canon is None:
        if tree.num_vertices == 1:
            tree._canon = tree._labels[0]
        elif tree.rooted:
            tree._canon = _encode_from(tree, tree.root)
        else:
            x = min(tree.taxa)
            lx = tree._leaf[x]
            w = tree._adj[lx][0]
            tree._canon = "(" + x + "," + _encode_from(tree, w, skip=lx) + ")"
    return tree._canon


def trees_equal(a: PhyloTree, b: PhyloTree) -> bool:
    if a.taxa != b.taxa:
        raise TreeError("trees_equal needs trees on the same taxon set")
    if a.rooted != b.rooted:
        raise TreeError("cannot compare a rooted with an unrooted tree")
    return canonical_form(a) == canonical_form(b)


# -- blocks, spans, restriction ---------------------------------------------


class Span(NamedTuple):
    vertices: frozenset
    edges: frozenset  # frozensets {u, v}


def _check_block(tree: PhyloTree, block: Iterable[str]) -> frozenset:
    block = frozenset(block)
    if not block:
        raise TreeError("block must be nonempty")
    unknown = block - tree.taxa
    if unknown:
        raise TreeError(f"unknown taxa {sorted(unknown)}")
    return block


def _marked_from(tree: PhyloTree, start: int, block: frozenset) -> tuple[list[int], list[int], list[bool]]:
    order, parent = _postorder(tree, start)
    has = [False] * tree.num_vertices
    for v in order:
        if tree._labels[v] in block:
            has[v] = True
        if has[v] and parent[v] >= 0:
            has[parent[v]] = True
    return order, parent, has


def induced_span(tree: PhyloTree, block: Iterable[str]) -> Span:
    """Minimal connected subgraph T[B] containing all leaves labelled by ``block``."""
    block = _check_block(tree, block)
    b0 = tree._leaf[min(block)]
    _, parent, has = _marked_from(tree, b0, block)
    verts = frozenset(v for v in range(tree.num_vertices) if has[v])
    edges = frozenset(frozenset((v, parent[v])) for v in verts if parent[v] >= 0)
    return Span(verts, edges)


def _restricted_nested(tree: PhyloTree, block: frozenset) -> Nested:
    if len(block) == 1:
        return next(iter(block))
    if tree.rooted:
        order, parent, has = _marked_from(tree, tree.root, block)
        top = tree.root
        while tree._labels[top] is None:
            kids = [u for u in tree._adj[top] if u != parent[top] and has[u]]
            if len(kids) != 1:
                break
            top = kids[0]
        return _suppressed(tree, top, parent, has)
    b0 = tree._leaf[min(block)]
    order, parent, has = _marked_from(tree, b0, block)
    below = _suppressed(tree, tree._adj[b0][0], parent, has)
    if isinstance(below, str):
        return (tree._labels[b0], below)
    return (tree._labels[b0],) + below


def _suppressed(tree: PhyloTree, top: int, parent: list[int], has: list[bool]) -> Nested:
    """Nested form of the marked subtree below ``top`` with degree-2 vertices suppressed."""
    out: dict[int, Nested] = {}
    stack = [(top, False)]
    while stack:
        v, done = stack.pop()
        kids = [u for u in tree._adj[v] if u != parent[v] and has[u]]
        if tree._labels[v] is not None and not kids:
            out[v] = tree._labels[v]
            continue
        if not done:
            stack.append((v, True))
            stack.extend((u, False) for u in kids)
            continue
        if len(kids) == 1:
            out[v] = out.pop(kids[0])
        else:
            out[v] = tuple(out.pop(u) for u in kids)
    return out[top]


def restrict(tree: PhyloTree, block: Iterable[str]) -> PhyloTree:
    """T|B: the span of ``block`` with degree-2 vertices suppressed."""
    block = _check_block(tree, block)
    if block == tree.taxa:
        return tree
    return PhyloTree.from_nested(_restricted_nested(tree, block), tree.rooted)


def block_degree(tree: PhyloTree, block: Iterable[str]) -> int:
    """Number of edges with exactly one endpoint in T[B] (edge direction ignored)."""
    span = induced_span(tree, block)
    return sum(len(tree._adj[v]) for v in span.vertices) - 2 * len(span.edges)


def is_pendant(tree: PhyloTree, block: Iterable[str]) -> bool:
    return block_degree(tree, block) == 1


# -- chains -----------------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    taxa: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "taxa", tuple(self.taxa))
        if len(self.taxa) < 2:
            raise TreeError("a chain needs at least two taxa")
        if len(set(self.taxa)) != len(self.taxa):
            raise TreeError("a chain may not repeat taxa")

    def __len__(self) -> int:
        return len(self.taxa)

    def __iter__(self) -> Iterator[str]:
        return iter(self.taxa)

    def reversed(self) -> "Chain":
        return Chain(self.taxa[::-1])

    def canonical(self) -> "Chain":
        """Orientation with the smaller endpoint label first (unrooted use)."""
        return self if self.taxa[0] <= self.taxa[-1] else self.reversed()


def is_chain(tree: PhyloTree, chain: Chain | Sequence[str]) -> bool:
    """Whether ``chain`` is a chain of ``tree``.

    Consecutive taxa must have equal or adjacent parents; equal parents only
    for the first or last pair.  The walk of parents may not revisit a vertex.
    Rooted chains run root-first: each parent is the previous one or its child.
    """
    taxa = chain.taxa if isinstance(chain, Chain) else tuple(chain)
    _check_block(tree, taxa)
    if len(taxa) < 2 or len(set(taxa)) != len(taxa):
        return False
    if tree.num_vertices == 1:
        return False
    m = len(taxa)
    parents = [tree._adj[tree._leaf[x]][0] for x in taxa]
    walk = [parents[0]]
    for i in range(m - 1):
        p, q = parents[i], parents[i + 1]
        if p == q:
            if i not in (0, m - 2):
                return False
            continue
        if tree.rooted:
            if tree._parent[q] != p:
                return False
        elif q not in tree._adj[p]:
            return False
        walk.append(q)
    return len(set(walk)) == len(walk)


# -- tree sets and partitions ------------------------------------------------


@dataclass(frozen=True)
class TreeSet:
    trees: tuple[PhyloTree, ...]

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        if len(self.trees) < 2:
            raise TreeError("a tree set needs at least two trees")
        first = self.trees[0]
        for tr in self.trees[1:]:
            if tr.taxa != first.taxa:
                raise TreeError("all trees must carry the same taxon set")
            if tr.rooted != first.rooted:
                raise TreeError("trees must be uniformly rooted or unrooted")

    @property
    def t(self) -> int:
        return len(self.trees)

    @property
    def n(self) -> int:
        return self.trees[0].n

    @property
    def taxa(self) -> frozenset:
        return self.trees[0].taxa

    @property
    def rooted(self) -> bool:
        return self.trees[0].rooted

    def __iter__(self) -> Iterator[PhyloTree]:
        return iter(self.trees)

    def __len__(self) -> int:
        return len(self.trees)

    def __getitem__(self, i: int) -> PhyloTree:
        return self.trees[i]


@dataclass(frozen=True)
class Partition:
    """Pairwise-disjoint nonempty blocks; their union is the covered taxon set."""

    blocks: frozenset

    def __post_init__(self):
        blocks = frozenset(frozenset(b) for b in self.blocks)
        seen: set = set()
        for b in blocks:
            if not b:
                raise TreeError("blocks must be nonempty")
            if seen & b:
                raise TreeError("blocks must be pairwise disjoint")
            seen |= b
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def of(cls, blocks: Iterable[Iterable[str]], taxa: Iterable[str] | None = None) -> "Partition":
        blocks = [frozenset(b) for b in blocks]
        total = sum(len(b) for b in blocks)
        part = cls(frozenset(blocks))
        if total != len(part.taxa):
            raise TreeError("blocks must be pairwise disjoint")
        if taxa is not None and part.taxa != frozenset(taxa):
            raise TreeError("partition does not cover the taxon set exactly")
        return part

    @classmethod
    def singletons(cls, taxa: Iterable[str]) -> "Partition":
        return cls(frozenset(frozenset([x]) for x in taxa))

    @property
    def taxa(self) -> frozenset:
        return frozenset().union(*self.blocks) if self.blocks else frozenset()

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[frozenset]:
        return iter(self.sorted_blocks())

    def sorted_blocks(self) -> list[tuple[str, ...]]:
        return sorted(tuple(sorted(b)) for b in self.blocks)


def restrict_treeset(ts: TreeSet, subset: Iterable[str]) -> TreeSet:
    subset = frozenset(subset)
    if not subset:
        raise TreeError("restriction needs a nonempty taxon set")
    if not subset <= ts.taxa:
        raise TreeError(f"unknown taxa {sorted(subset - ts.taxa)}")
    return TreeSet(tuple(restrict(tr, subset) for tr in ts.trees))


def project_forest(forest: Partition, subset: Iterable[str]) -> Partition:
    subset = frozenset(subset)
    if not subset:
        raise TreeError("projection needs a nonempty taxon set")
    return Partition(frozenset(b & subset for b in forest.blocks if b & subset))
