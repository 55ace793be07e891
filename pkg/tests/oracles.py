"""Independent reference implementations used as test oracles.

Nothing here calls into the package's structural algorithms; only the raw
adjacency accessors of ``PhyloTree`` are used.
"""

from __future__ import annotations

import itertools
from collections import deque


def adjacency(tree):
    return {v: set(tree.neighbors(v)) for v in range(tree.num_vertices)}


def components_without(tree, cut_edge):
    """Taxon sets of the two sides of ``cut_edge``."""
    u, v = cut_edge
    adj = adjacency(tree)
    side = {u}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        for x in adj[w]:
            if {w, x} == {u, v} or x in side:
                continue
            side.add(x)
            queue.append(x)
    taxa_u = frozenset(tree.label(w) for w in side if tree.label(w) is not None)
    return taxa_u, tree.taxa - taxa_u


def splits(tree):
    """Nontrivial bipartitions (unrooted) as a set of frozensets of sides."""
    out = set()
    for e in tree.edges():
        a, b = components_without(tree, e)
        if len(a) >= 2 and len(b) >= 2:
            out.add(frozenset([a, b]))
    return out


def clusters(tree):
    """Clusters of a rooted tree: leaf sets below each non-root vertex."""
    out = set()
    for p, c in tree.edges():
        # edges are parent-first for rooted trees
        below, _ = components_without(tree, (c, p))
        out.add(below)
    return out


def topology_signature(tree):
    """Splits (unrooted) or clusters (rooted): determine the topology."""
    return clusters(tree) if tree.rooted else splits(tree)


def restricted_signature(tree, block):
    """Signature of T|block derived from T's own splits / clusters."""
    block = frozenset(block)
    if tree.rooted:
        return {c & block for c in clusters(tree) if 1 <= len(c & block) < len(block)}
    out = set()
    for s in splits(tree):
        a, b = tuple(s)
        a, b = a & block, b & block
        if len(a) >= 2 and len(b) >= 2:
            out.add(frozenset([a, b]))
    return out


def brute_span(tree, block):
    """Intersection of all connected vertex sets containing the block's leaves."""
    adj = adjacency(tree)
    need = {tree.leaf(x) for x in block}
    nv = tree.num_vertices
    best = set(range(nv))
    for mask in range(1 << nv):
        verts = {v for v in range(nv) if mask >> v & 1}
        if not need <= verts:
            continue
        start = next(iter(verts))
        seen = {start}
        queue = [start]
        for w in queue:
            for x in adj[w]:
                if x in verts and x not in seen:
                    seen.add(x)
                    queue.append(x)
        if seen == verts:
            best &= verts
    return best


def brute_isomorphic(t1, t2):
    """Search every leaf-preserving bijection of internal vertices."""
    if t1.taxa != t2.taxa or t1.num_vertices != t2.num_vertices:
        return False
    e1 = {frozenset(e) for e in t1.edges()}
    e2 = {frozenset(e) for e in t2.edges()}
    fixed = {t1.leaf(x): t2.leaf(x) for x in t1.taxa}
    in1 = [v for v in range(t1.num_vertices) if v not in fixed]
    in2 = [v for v in range(t2.num_vertices) if v not in fixed.values()]
    for perm in itertools.permutations(in2):
        m = dict(fixed)
        m.update(zip(in1, perm))
        if t1.rooted and m.get(t1.root) != t2.root:
            continue
        if {frozenset(m[v] for v in e) for e in e1} == e2:
            return True
    return False


def _taxon_parent(tree, x):
    return next(iter(tree.neighbors(tree.leaf(x))))


def _depth(tree, v):
    d = 0
    while v != tree.root:
        v = tree.parent(v)
        d += 1
    return d


def definitional_chain(tree, seq):
    """Chain check written straight from the definition."""
    if len(seq) < 2 or len(set(seq)) != len(seq):
        return False
    ps = [_taxon_parent(tree, x) for x in seq]
    m = len(seq)
    for i in range(m - 1):
        p, q = ps[i], ps[i + 1]
        if p == q:
            if i not in (0, m - 2):
                return False
        elif q not in tree.neighbors(p):
            return False
        elif tree.rooted and _depth(tree, q) != _depth(tree, p) + 1:
            return False
    # consecutive distinct parents trace a path without revisits
    path = [p for i, p in enumerate(ps) if i == 0 or p != ps[i - 1]]
    return len(path) == len(set(path))


def brute_common_chains(ts):
    """All common chains (as tuples), via DFS with the definitional test."""
    taxa = sorted(ts.taxa)
    out = set()

    def grow(seq):
        if len(seq) >= 2:
            if not all(definitional_chain(tr, seq) for tr in ts.trees):
                return
            out.add(tuple(seq))
        for y in taxa:
            if y not in seq:
                grow(seq + [y])

    for x in taxa:
        grow([x])
    return out


def brute_maximal_chains(ts):
    """Common chains not contained contiguously in a longer common chain."""
    chains = brute_common_chains(ts)

    def contained(c, d):
        m = len(c)
        forms = [d] if ts.rooted else [d, d[::-1]]
        return any(f[i:i + m] == c for f in forms for i in range(len(f) - m + 1))

    maximal = {c for c in chains if not any(len(d) > len(c) and contained(c, d) for d in chains)}
    if not ts.rooted:
        maximal = {min(c, c[::-1]) for c in maximal}
    return maximal


def pendant_sides(tree):
    """Taxon sets split off by one edge (rooted: clusters only)."""
    if tree.rooted:
        return clusters(tree) | {tree.taxa}
    out = set()
    for e in tree.edges():
        a, b = components_without(tree, e)
        out.add(a)
        out.add(b)
    return out


def brute_common_pendant(ts):
    """Taxon sets (size >= 2) hanging identically from one edge in every tree."""
    X = ts.taxa
    sides = [pendant_sides(tr) for tr in ts.trees]
    out = set()
    if len(X) >= 2 and len({frozenset(topology_signature(tr)) for tr in ts.trees}) == 1:
        out.add(frozenset(X))
    for size in range(2, len(X)):
        for S in itertools.combinations(sorted(X), size):
            S = frozenset(S)
            if not all(S in sd for sd in sides):
                continue
            # the hanging subtree's clusters: split sides / clusters inside S
            shapes = set()
            for tr, sd in zip(ts.trees, sides):
                shapes.add(frozenset(A for A in sd if A < S and len(A) >= 2))
            if len(shapes) == 1:
                out.add(S)
    return out


def chi_square(counts, expected):
    return sum((c - expected) ** 2 / expected for c in counts)
