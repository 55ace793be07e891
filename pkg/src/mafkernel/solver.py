"""Agreement-forest validation and exact MAF solving at desk scale.

Two independent exact routes are provided so that one can check the other:

* :func:`maf_bruteforce` enumerates set partitions in restricted-growth order
  and validates them with the definitional checker (restrictions compared by
  canonical form, spans compared as vertex sets).
* :func:`maf_cutset` cuts j edges of the first tree for j = 0, 1, ... and
  validates the induced partition with the array kernels in ``_kernels``
  (triplet/quartet agreement, LCA-path span marking).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .tree import (
    Partition,
    PhyloTree,
    TreeError,
    TreeSet,
    canonical_form,
    induced_span,
    restrict,
)


class SolverLimitError(RuntimeError):
    """The requested search exceeds a configured cap."""


@dataclass(frozen=True)
class SolveResult:
    maf_size: int
    witness: Partition
    method: str  # "partition-enumeration" or "cutset-search"

    def blocks(self) -> list[list[str]]:
        return [list(b) for b in self.witness.sorted_blocks()]


def _check_partition(ts: TreeSet, forest: Partition) -> None:
    if forest.taxa != ts.taxa:
        raise TreeError("forest is not a partition of the tree set's taxa")


def forest_violation(ts: TreeSet, forest: Partition) -> tuple[str, str] | None:
    """First violated agreement-forest condition, or ``None`` when valid.

    Returns ``("topology", detail)`` when some block restricts to different
    trees, ``("overlap", detail)`` when two spans share a vertex in some tree.
    """
    _check_partition(ts, forest)
    blocks = forest.sorted_blocks()
    for block in blocks:
        if len(block) < 3:
            continue
        forms = {canonical_form(restrict(tr, block)) for tr in ts.trees}
        if len(forms) > 1:
            return "topology", f"block {{{','.join(block)}}} induces different topologies"
    for ti, tr in enumerate(ts.trees):
        owner: dict[int, tuple[str, ...]] = {}
        for block in blocks:
            for v in induced_span(tr, block).vertices:
                if v in owner:
                    a, b = owner[v], block
                    return "overlap", (
                        f"blocks {{{','.join(a)}}} and {{{','.join(b)}}} overlap in tree {ti + 1}"
                    )
                owner[v] = block
    return None


def is_agreement_forest(ts: TreeSet, forest: Partition) -> bool:
    return forest_violation(ts, forest) is None


def rgs_key(forest: Partition) -> tuple[int, ...]:
    """Restricted-growth string of a partition over the sorted taxa.

    Witness ties are broken by the smallest string, which favours putting
    early taxa together.
    """
    ids: dict[frozenset, int] = {}
    owner = {x: b for b in forest.blocks for x in b}
    out = []
    for x in sorted(owner):
        out.append(ids.setdefault(owner[x], len(ids)))
    return tuple(out)


# -- brute force ----------------------------------------------------------------


def maf_bruteforce(ts: TreeSet, cap: int = 10) -> SolveResult:
    """Minimum agreement forest by restricted-growth partition enumeration.

    Partial partitions are abandoned as soon as a block's topology disagrees
    or two spans overlap, since growing blocks can only keep that so, and as
    soon as they use more blocks than the best forest found so far.
    """
    taxa = sorted(ts.taxa)
    n = len(taxa)
    if n > cap:
        raise SolverLimitError(f"brute force refuses n={n} > cap={cap}")
    trees = ts.trees

    best_size = n + 1
    best_key: tuple | None = None
    best_blocks: list[list[str]] = []
    assign: list[int] = []
    blocks: list[list[str]] = []
    # spans[b][ti] = vertex set of block b in tree ti
    spans: list[list[frozenset]] = []

    def block_ok(b: int) -> bool:
        block = blocks[b]
        if len(block) >= 3:
            forms = {canonical_form(restrict(tr, block)) for tr in trees}
            if len(forms) > 1:
                return False
        new = [induced_span(tr, block).vertices for tr in trees]
        for other in range(len(blocks)):
            if other != b:
                for ti in range(len(trees)):
                    if new[ti] & spans[other][ti]:
                        return False
        spans[b] = new
        return True

    def visit(i: int) -> None:
        nonlocal best_size, best_key, best_blocks
        if i == n:
            key = tuple(assign)
            if len(blocks) < best_size or (len(blocks) == best_size and key < best_key):
                best_size, best_key = len(blocks), key
                best_blocks = [list(b) for b in blocks]
            return
        x = taxa[i]
        for b in range(len(blocks)):
            old = spans[b]
            blocks[b].append(x)
            assign.append(b)
            if block_ok(b):
                visit(i + 1)
            assign.pop()
            blocks[b].pop()
            spans[b] = old
        if len(blocks) + 1 <= best_size:
            blocks.append([x])
            assign.append(len(blocks) - 1)
            spans.append([frozenset([tr.leaf(x)]) for tr in trees])
            if block_ok(len(blocks) - 1):
                visit(i + 1)
            assign.pop()
            blocks.pop()
            spans.pop()

    visit(0)
    witness = Partition.of(best_blocks, ts.taxa)
    return SolveResult(best_size, witness, "partition-enumeration")


# -- cut-set search -------------------------------------------------------------


@dataclass
class TreeSetArrays:
    """Padded array view of a tree set for the kernels."""

    taxa: list[str]
    rooted: bool
    parents: np.ndarray  # (t, V)
    depths: np.ndarray  # (t, V)
    leafvs: np.ndarray  # (t, n)
    mats: np.ndarray  # (t, n, n): LCA depths (rooted) or path lengths (unrooted)
    adj_ptr: np.ndarray  # CSR adjacency of tree 0
    adj_to: np.ndarray
    adj_eid: np.ndarray
    nedges: int

    @classmethod
    def build(cls, ts: TreeSet) -> "TreeSetArrays":
        taxa = sorted(ts.taxa)
        n = len(taxa)
        t = ts.t
        nv = max(tr.num_vertices for tr in ts.trees)
        parents = np.full((t, nv), -1, dtype=np.int64)
        depths = np.zeros((t, nv), dtype=np.int64)
        leafvs = np.zeros((t, n), dtype=np.int64)
        mats = np.zeros((t, n, n), dtype=np.int64)
        for ti, tr in enumerate(ts.trees):
            top = tr.root if tr.rooted else tr.leaf(taxa[0])
            dist = _bfs(tr, top)
            parents[ti, : tr.num_vertices] = dist[1]
            depths[ti, : tr.num_vertices] = dist[0]
            for i, x in enumerate(taxa):
                leafvs[ti, i] = tr.leaf(x)
            for i, x in enumerate(taxa):
                d = _bfs(tr, leafvs[ti, i])[0]
                for j in range(n):
                    v = leafvs[ti, j]
                    if tr.rooted:
                        # depth of the LCA from the three-distance identity
                        mats[ti, i, j] = (depths[ti, leafvs[ti, i]] + depths[ti, v] - d[v]) // 2
                    else:
                        mats[ti, i, j] = d[v]
        first = ts.trees[0]
        edges = first.edges()
        ptr = np.zeros(first.num_vertices + 1, dtype=np.int64)
        for u, v in edges:
            ptr[u + 1] += 1
            ptr[v + 1] += 1
        ptr = np.cumsum(ptr)
        fill = ptr[:-1].copy()
        to = np.zeros(2 * len(edges), dtype=np.int64)
        eid = np.zeros(2 * len(edges), dtype=np.int64)
        for e, (u, v) in enumerate(edges):
            to[fill[u]], eid[fill[u]] = v, e
            fill[u] += 1
            to[fill[v]], eid[fill[v]] = u, e
            fill[v] += 1
        return cls(taxa, ts.rooted, parents, depths, leafvs, mats, ptr, to, eid, len(edges))

    def partition(self, rgs: np.ndarray) -> Partition:
        groups: dict[int, list[str]] = {}
        for i, b in enumerate(rgs):
            groups.setdefault(int(b), []).append(self.taxa[i])
        return Partition.of(groups.values())


def _bfs(tree: PhyloTree, start: int) -> tuple[list[int], list[int]]:
    dist = [-1] * tree.num_vertices
    parent = [-1] * tree.num_vertices
    dist[start] = 0
    queue = [start]
    for v in queue:
        for u in tree.neighbors(v):
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                parent[u] = v
                queue.append(u)
    return dist, parent


def cutset_candidates(nedges: int, kmax: int) -> int:
    """Number of cut sets examined by a full search up to ``kmax`` blocks."""
    return sum(math.comb(nedges, j) for j in range(min(kmax, nedges + 1)))


def maf_cutset(
    ts: TreeSet,
    kmax: int,
    max_candidates: int = 10**7,
    use_numba: bool | None = None,
    first_only: bool = False,
) -> SolveResult | None:
    """Smallest agreement forest of size at most ``kmax`` by cutting tree edges.

    ``None`` certifies that no agreement forest of size ``<= kmax`` exists.
    Every forest of size j + 1 separates in the first tree by cutting j
    edges, so scanning j upward finds the optimum.  Among optimal forests the
    lexicographically smallest witness is returned unless ``first_only``.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    if ts.n == 1:
        return SolveResult(1, Partition.of([ts.taxa]), "cutset-search")
    arrays = TreeSetArrays.build(ts)
    need = cutset_candidates(arrays.nedges, kmax)
    if need > max_candidates:
        raise SolverLimitError(f"{need} cut sets exceed the cap of {max_candidates}")
    kern = _kernels.backend(use_numba)
    out = np.zeros((1 if first_only else 1 << 14, ts.n), dtype=np.int64)
    for j in range(min(kmax, arrays.nedges + 1)):
        found = kern.search_level(
            j, arrays.nedges, arrays.adj_ptr, arrays.adj_to, arrays.adj_eid,
            arrays.parents, arrays.depths, arrays.leafvs, arrays.mats,
            arrays.rooted, first_only, out,
        )
        if found:
            # rows are restricted-growth strings already
            row = min(range(found), key=lambda i: tuple(out[i]))
            best = arrays.partition(out[row])
            return SolveResult(len(best), best, "cutset-search")
    return None


def exact_decision(ts: TreeSet, k: int, use_numba: bool | None = None) -> bool:
    """Whether an agreement forest with at most ``k`` blocks exists."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if k >= ts.n:
        return True
    return maf_cutset(ts, k, use_numba=use_numba, first_only=True) is not None


def exact_maf(ts: TreeSet, use_numba: bool | None = None) -> SolveResult:
    result = maf_cutset(ts, ts.n, use_numba=use_numba)
    assert result is not None
    return result


def fast_is_agreement_forest(ts: TreeSet, forest: Partition, use_numba: bool | None = None) -> bool:
    """Kernel-based validity check, used to cross-check :func:`is_agreement_forest`."""
    _check_partition(ts, forest)
    arrays = TreeSetArrays.build(ts)
    index = {x: i for i, x in enumerate(arrays.taxa)}
    rgs = np.zeros(ts.n, dtype=np.int64)
    for b, block in enumerate(forest.sorted_blocks()):
        for x in block:
            rgs[index[x]] = b
    kern = _kernels.backend(use_numba)
    members = np.empty(ts.n, dtype=np.int64)
    start = np.empty(ts.n + 2, dtype=np.int64)
    mark = np.empty(arrays.parents.shape[1], dtype=np.int64)
    return bool(kern.is_forest(
        rgs, len(forest), arrays.parents, arrays.depths, arrays.leafvs,
        arrays.mats, arrays.rooted, 0, members, start, mark,
    ))
