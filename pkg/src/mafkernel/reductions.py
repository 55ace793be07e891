"""Common subtree and multi-tree chain reduction, and the kernelization driver.

Long common chains are truncated to ``r = min(max(k, 3), t + 1)`` taxa, where
``k`` is the target forest size and ``t`` the number of trees.  After both
rules are exhausted a yes-instance has at most

    4trk - 4tr - 3rk        taxa (unrooted)
    4trk - 4tr - 2rk + r    taxa (rooted)

so a larger kernel certifies a no-instance.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

from .tree import (
    Chain,
    PhyloTree,
    TreeError,
    TreeSet,
    _postorder,
    canonical_form,
    is_chain,
    restrict_treeset,
)

log = logging.getLogger(__name__)


class PreconditionError(TreeError):
    """A reduction rule was asked to act where it does not apply."""


def compute_r(t: int, k: int) -> int:
    """Truncation length for common chains."""
    if t < 2:
        raise ValueError(f"need at least two trees, got t={t}")
    if k < 1:
        raise ValueError(f"k must be positive, got k={k}")
    return min(max(k, 3), t + 1)


def kernel_bound(t: int, k: int, r: int, rooted: bool) -> int:
    if rooted:
        return 4 * t * r * k - 4 * t * r - 2 * r * k + r
    return 4 * t * r * k - 4 * t * r - 3 * r * k


# -- common pendant subtrees ---------------------------------------------------


def pendant_subtrees(tree: PhyloTree) -> dict[frozenset, str]:
    """Map every pendant taxon set to the encoding of its subtree.

    The subtree is encoded as a rooted tree hanging from its attachment
    edge.  Rooted trees contribute their clusters only.  The full taxon set
    maps to the canonical form of the whole tree.
    """
    out: dict[frozenset, str] = {tree.taxa: canonical_form(tree)}
    if tree.n == 1:
        return out
    if tree.rooted:
        order, parent = _postorder(tree, tree.root)
        cl: dict[int, frozenset] = {}
        enc: dict[int, str] = {}
        for v in order:
            lab = tree.label(v)
            kids = [u for u in tree.neighbors(v) if u != parent[v]]
            if lab is not None:
                cl[v], enc[v] = frozenset([lab]), lab
            else:
                cl[v] = cl[kids[0]] | cl[kids[1]]
                enc[v] = "(" + ",".join(sorted(enc[u] for u in kids)) + ")"
            if v != tree.root:
                out[cl[v]] = enc[v]
        return out

    r0 = tree.leaf(min(tree.taxa))
    order, parent = _postorder(tree, r0)
    down: dict[int, frozenset] = {}
    denc: dict[int, str] = {}
    for v in order:
        lab = tree.label(v)
        if lab is not None and v != r0:
            down[v], denc[v] = frozenset([lab]), lab
        elif v != r0:
            kids = [u for u in tree.neighbors(v) if u != parent[v]]
            down[v] = down[kids[0]] | down[kids[1]]
            denc[v] = "(" + ",".join(sorted(denc[u] for u in kids)) + ")"
    # side away from each child, hung at the parent
    uenc: dict[int, str] = {}
    for v in reversed(order):
        if v == r0:
            continue
        p = parent[v]
        if p == r0:
            uenc[v] = tree.label(r0)
        else:
            sib = [u for u in tree.neighbors(p) if u != parent[p] and u != v][0]
            uenc[v] = "(" + ",".join(sorted((denc[sib], uenc[p]))) + ")"
        out[down[v]] = denc[v]
        out[tree.taxa - down[v]] = uenc[v]
    return out


def common_pendant_subtrees(ts: TreeSet) -> list[frozenset]:
    """All taxon sets of size >= 2 inducing a common pendant subtree."""
    maps = [pendant_subtrees(tr) for tr in ts.trees]
    first = maps[0]
    common = []
    for s, enc in first.items():
        if len(s) >= 2 and all(m.get(s) == enc for m in maps[1:]):
            common.append(s)
    return common


def find_common_pendant_subtree(ts: TreeSet) -> frozenset | None:
    """A maximal common pendant subtree, lexicographically smallest among maximal ones.

    When all trees are identical the whole taxon set is returned.
    """
    common = common_pendant_subtrees(ts)
    if not common:
        return None
    maximal = [s for s in common if not any(s < o for o in common)]
    return min(maximal, key=lambda s: tuple(sorted(s)))


def apply_subtree_reduction(ts: TreeSet, subtree: frozenset | set) -> TreeSet:
    """Collapse a common pendant subtree onto its minimum-label taxon."""
    subtree = frozenset(subtree)
    if len(subtree) < 2 or subtree not in common_pendant_subtrees(ts):
        raise PreconditionError(f"{sorted(subtree)} is not a common pendant subtree")
    keep = (ts.taxa - subtree) | {min(subtree)}
    return restrict_treeset(ts, keep)


# -- common chains ---------------------------------------------------------------


class _ChainState:
    """Incremental validity of an appended chain in one tree."""

    __slots__ = ("tree", "parents", "walk")

    def __init__(self, tree: PhyloTree, first: str):
        self.tree = tree
        self.parents = [tree.taxon_parent(first)]
        self.walk = {self.parents[0]}

    def can_append(self, x: str) -> bool:
        tree = self.tree
        q = tree.taxon_parent(x)
        p = self.parents[-1]
        m = len(self.parents)
        # the current last pair becomes interior
        if m >= 3 and self.parents[-2] == p:
            return False
        if q == p:
            return True
        if q in self.walk:
            return False
        if tree.rooted:
            return tree.parent(q) == p
        return q in tree.neighbors(p)

    def push(self, x: str) -> None:
        q = self.tree.taxon_parent(x)
        self.parents.append(q)
        self.walk.add(q)

    def pop(self) -> None:
        q = self.parents.pop()
        if q not in self.parents:
            self.walk.discard(q)


def _follow_candidates(tree: PhyloTree) -> dict[str, set]:
    """Taxa whose parent equals or neighbours each taxon's parent."""
    out: dict[str, set] = {}
    for x in tree.taxa:
        p = tree.taxon_parent(x)
        near = set()
        for w in (p, *tree.neighbors(p)):
            for u in (w, *tree.neighbors(w)) if w != p else tree.neighbors(p):
                lab = tree.label(u)
                if lab is not None and lab != x:
                    near.add(lab)
        out[x] = near
    return out


def maximal_common_chains(ts: TreeSet) -> list[Chain]:
    """Every common chain that cannot be extended at either end.

    Unrooted chains are given in canonical orientation.  These may overlap,
    e.g. both orders of a cherry closing a chain.
    """
    if ts.n < 2:
        return []
    cand = None
    for tr in ts.trees:
        f = _follow_candidates(tr)
        cand = f if cand is None else {x: cand[x] & f[x] for x in cand}

    found: set[tuple[str, ...]] = set()
    for start in sorted(ts.taxa):
        states = [_ChainState(tr, start) for tr in ts.trees]
        path = [start]
        # explicit DFS: stack of candidate iterators
        stack = [iter(sorted(cand[start]))]
        extended = [False]
        while stack:
            nxt = None
            for y in stack[-1]:
                if y not in path and all(s.can_append(y) for s in states):
                    nxt = y
                    break
            if nxt is None:
                stack.pop()
                if not extended.pop() and len(path) >= 2:
                    found.add(tuple(path))
                path.pop()
                if path:
                    for s in states:
                        s.pop()
                continue
            extended[-1] = True
            for s in states:
                s.push(nxt)
            path.append(nxt)
            stack.append(iter(sorted(cand[nxt])))
            extended.append(False)

    chains = set()
    for seq in found:
        if not ts.rooted:
            seq = min(seq, seq[::-1])
        chains.add(seq)
    # drop right-maximal sequences that extend to the left
    out = []
    for seq in sorted(chains):
        if not _extends_left(ts, seq, cand):
            out.append(Chain(seq))
    return out


def _extends_left(ts: TreeSet, seq: tuple, cand: dict) -> bool:
    ends = [seq] if ts.rooted else [seq, seq[::-1]]
    for s in ends:
        for y in cand[s[0]]:
            if y not in s and all(is_chain(tr, (y,) + s) for tr in ts.trees):
                return True
    return False


def find_common_chains(ts: TreeSet) -> list[Chain]:
    """Pairwise taxon-disjoint maximal common chains, longest first."""
    chosen: list[Chain] = []
    used: set = set()
    for ch in sorted(maximal_common_chains(ts), key=lambda c: (-len(c), c.taxa)):
        if used.isdisjoint(ch.taxa):
            chosen.append(ch)
            used.update(ch.taxa)
    return chosen


def apply_chain_reduction(ts: TreeSet, chain: Chain, r: int) -> TreeSet:
    """Keep the first ``r`` taxa of a common chain and delete the rest."""
    if not isinstance(chain, Chain):
        chain = Chain(tuple(chain))
    if len(chain) <= r:
        raise PreconditionError(f"chain of length {len(chain)} is not longer than r={r}")
    if not all(is_chain(tr, chain) for tr in ts.trees):
        raise PreconditionError(f"{chain.taxa} is not a common chain")
    if not ts.rooted:
        chain = chain.canonical()
    return restrict_treeset(ts, ts.taxa - set(chain.taxa[r:]))


# -- driver --------------------------------------------------------------------------


@dataclass
class KernelReport:
    t: int
    n_before: int
    n_after: int
    k: int
    r: int
    rooted: bool
    subtree_applications: int
    chain_applications: int
    taxa_removed_by_rule: tuple[int, int]
    bound: int
    verdict: str  # "yes" (trivially), "kernel" or "no"

    def as_dict(self) -> dict:
        d = asdict(self)
        d["taxa_removed_by_rule"] = list(self.taxa_removed_by_rule)
        return d


def kernelize(ts: TreeSet, k: int) -> tuple[TreeSet, KernelReport]:
    """Apply both rules to exhaustion for target size ``k``."""
    return _kernelize(ts, k, compute_r(ts.t, k))


def _kernelize(ts: TreeSet, k: int, r: int) -> tuple[TreeSet, KernelReport]:
    # r is a parameter only for tightness experiments; kernelize() pins it
    if k < 1:
        raise ValueError("k must be positive")
    n0 = ts.n
    bound = kernel_bound(ts.t, k, compute_r(ts.t, k), ts.rooted)
    if k >= n0:
        report = KernelReport(ts.t, n0, n0, k, r, ts.rooted, 0, 0, (0, 0), bound, "yes")
        return ts, report
    sub_apps = chain_apps = sub_removed = chain_removed = 0
    cur = ts
    while True:
        while (s := find_common_pendant_subtree(cur)) is not None:
            nxt = apply_subtree_reduction(cur, s)
            assert nxt.n < cur.n
            sub_apps += 1
            sub_removed += cur.n - nxt.n
            log.debug("subtree reduction on %s: n %d -> %d", sorted(s), cur.n, nxt.n)
            cur = nxt
        long = [c for c in find_common_chains(cur) if len(c) > r]
        if not long:
            break
        nxt = apply_chain_reduction(cur, long[0], r)
        assert nxt.n < cur.n
        chain_apps += 1
        chain_removed += cur.n - nxt.n
        log.debug("chain reduction on %s: n %d -> %d", long[0].taxa, cur.n, nxt.n)
        cur = nxt
    n1 = cur.n
    if n1 <= k:
        verdict = "yes"
    elif n1 > bound:
        verdict = "no"
    else:
        verdict = "kernel"
    report = KernelReport(
        ts.t, n0, n1, k, r, ts.rooted, sub_apps, chain_apps, (sub_removed, chain_removed), bound, verdict,
    )
    return cur, report
