"""Instance generators: tightness families for the truncation length and
seeded uniform random tree sets."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .reductions import apply_chain_reduction
from .tree import Chain, PhyloTree, TreeError, TreeSet


@dataclass(frozen=True)
class TightFamily:
    """A generated instance together with its long common chain."""

    trees: TreeSet
    chain: Chain
    backbone: tuple[str, ...]

    def truncated(self, length: int) -> TreeSet:
        """The instance with the chain cut down to ``length`` taxa.

        Any length may be requested here, including unsafe ones; the public
        kernelization never takes a caller-supplied truncation length.
        """
        return apply_chain_reduction(self.trees, self.chain, length)


def _family(t: int, m: int, reversed_tree: int | None, rooted: bool) -> TightFamily:
    backbone = tuple(str(i) for i in range(1, t + 2))
    chain = tuple(f"x{j}" for j in range(1, m + 1))
    trees = []
    for i in range(1, t + 1):
        inserted = chain[::-1] if i == reversed_tree else chain
        order = backbone[:i] + inserted + backbone[i:]
        trees.append(PhyloTree.caterpillar(order, rooted))
    ch = Chain(chain)
    if not rooted:
        ch = ch.canonical()
    return TightFamily(TreeSet(tuple(trees)), ch, backbone)


def tight_family_A(t: int, rooted: bool = False, reversed_tree: int | None = None) -> TightFamily:
    """t trees on a (t+1)-taxon backbone with a 2(t+2)-chain after taxon i in tree i.

    Unrooted: the chain is reversed in tree ``reversed_tree`` (default 2).
    Reversing an interior tree puts every backbone taxon on both ends of the
    chain across the set, so no block can hold a backbone taxon together with
    three chain taxa.  Reversing tree 1 instead leaves taxon 2 on the x1 end
    everywhere, and {2} plus the chain is then a valid block.
    Rooted: trees are rooted on the pendant edge of taxon ``1`` and nothing
    is reversed.
    """
    if t < 3:
        raise TreeError("family A needs t >= 3")
    if rooted:
        reversed_tree = None
    elif reversed_tree is None:
        reversed_tree = 2
    elif not 1 <= reversed_tree <= t:
        raise TreeError(f"reversed_tree must lie in 1..{t}")
    return _family(t, 2 * (t + 2), reversed_tree, rooted)


def tight_family_B(k: int, rooted: bool = False) -> TightFamily:
    """t = k+2 trees with a (2k+1)-chain after taxon i in tree i, never reversed."""
    if k < 4:
        raise TreeError("family B needs k >= 4")
    return _family(k + 2, 2 * k + 1, None, rooted)


def default_labels(n: int) -> list[str]:
    return [f"x{i}" for i in range(1, n + 1)]


def random_tree(labels: list[str], rooted: bool, rng: random.Random) -> PhyloTree:
    """Uniform labelled binary topology by random stepwise leaf insertion."""
    n = len(labels)
    if n == 1:
        return PhyloTree([[]], [labels[0]], rooted)
    if n == 2 and not rooted:
        return PhyloTree([[1], [0]], list(labels), rooted=False)
    adj: list[list[int]] = []
    names: list[str | None] = []

    def vertex(name):
        adj.append([])
        names.append(name)
        return len(adj) - 1

    def link(u, v):
        adj[u].append(v)
        adj[v].append(u)

    def unlink(u, v):
        adj[u].remove(v)
        adj[v].remove(u)

    if rooted:
        root = vertex(None)
        for lab in labels[:2]:
            link(root, vertex(lab))
        edges = [(root, 1), (root, 2)]
        rest = labels[2:]
    else:
        centre = vertex(None)
        for lab in labels[:3]:
            link(centre, vertex(lab))
        edges = [(centre, 1), (centre, 2), (centre, 3)]
        rest = labels[3:]
    for lab in rest:
        # rooted trees also admit insertion above the root
        choices = len(edges) + (1 if rooted else 0)
        e = rng.randrange(choices)
        leaf = vertex(lab)
        mid = vertex(None)
        link(mid, leaf)
        if e == len(edges):
            link(mid, root)
            edges.append((mid, root))
            root = mid
        else:
            u, v = edges[e]
            unlink(u, v)
            link(u, mid)
            link(mid, v)
            edges[e] = (u, mid)
            edges.append((mid, v))
        edges.append((mid, leaf))
    return PhyloTree(adj, names, rooted, root=root if rooted else None)


def random_instance(n: int, t: int, rooted: bool, seed: int, labels: list[str] | None = None) -> TreeSet:
    """t independent uniform topologies on the same n taxa; deterministic per seed."""
    if n < 1:
        raise TreeError("n must be at least 1")
    if t < 2:
        raise TreeError("t must be at least 2")
    labels = list(labels) if labels is not None else default_labels(n)
    if len(labels) != n:
        raise TreeError("need exactly n labels")
    rng = random.Random(seed)
    return TreeSet(tuple(random_tree(labels, rooted, rng) for _ in range(t)))
