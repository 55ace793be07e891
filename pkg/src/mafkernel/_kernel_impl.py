"""Kernel bodies for the cut-set search, written once as plain Python over numpy.

This file is not imported directly.  :mod:`mafkernel._kernels` loads it as
two separate modules, injecting ``_JIT`` before execution: numba's ``njit``
for the compiled backend and the identity for the pure backend.  Calls
between kernels go through module globals, so each copy calls its own kind.
"""

import numpy as np

jit = globals().get("_JIT") or (lambda fn: fn)


@jit
def group_members(rgs, nblocks, members, start):
    # counting sort of taxa by block id
    n = rgs.shape[0]
    for b in range(nblocks + 1):
        start[b] = 0
    for i in range(n):
        start[rgs[i] + 1] += 1
    for b in range(nblocks):
        start[b + 1] += start[b]
    fill = start[:nblocks].copy()
    for i in range(n):
        b = rgs[i]
        members[fill[b]] = i
        fill[b] += 1


@jit
def block_agrees(members, lo, hi, mats, rooted):
    t = mats.shape[0]
    m = hi - lo
    if rooted:
        if m < 3:
            return True
        for x in range(lo, hi - 2):
            a = members[x]
            for y in range(x + 1, hi - 1):
                b = members[y]
                for z in range(y + 1, hi):
                    c = members[z]
                    ref = -1
                    for ti in range(t):
                        ab = mats[ti, a, b]
                        ac = mats[ti, a, c]
                        if ab > ac:
                            code = 0
                        elif ac > ab:
                            code = 1
                        else:
                            code = 2
                        if ref < 0:
                            ref = code
                        elif code != ref:
                            return False
        return True
    if m < 4:
        return True
    for w in range(lo, hi - 3):
        a = members[w]
        for x in range(w + 1, hi - 2):
            b = members[x]
            for y in range(x + 1, hi - 1):
                c = members[y]
                for z in range(y + 1, hi):
                    d = members[z]
                    ref = -1
                    for ti in range(t):
                        s1 = mats[ti, a, b] + mats[ti, c, d]
                        s2 = mats[ti, a, c] + mats[ti, b, d]
                        if s1 < s2:
                            code = 0
                        elif s2 < s1:
                            code = 1
                        else:
                            code = 2
                        if ref < 0:
                            ref = code
                        elif code != ref:
                            return False
    return True


@jit
def lca(u, v, parent, depth):
    while depth[u] > depth[v]:
        u = parent[u]
    while depth[v] > depth[u]:
        v = parent[v]
    while u != v:
        u = parent[u]
        v = parent[v]
    return u


@jit
def spans_disjoint(members, start, nblocks, parent, depth, leafv, mark):
    for v in range(mark.shape[0]):
        mark[v] = -1
    for b in range(nblocks):
        lo = start[b]
        hi = start[b + 1]
        top = leafv[members[lo]]
        for i in range(lo + 1, hi):
            top = lca(top, leafv[members[i]], parent, depth)
        for i in range(lo, hi):
            v = leafv[members[i]]
            while True:
                if mark[v] == b:
                    break
                if mark[v] != -1:
                    return False
                mark[v] = b
                if v == top:
                    break
                v = parent[v]
    return True


@jit
def is_forest(rgs, nblocks, parents, depths, leafvs, mats, rooted, first_tree, members, start, mark):
    group_members(rgs, nblocks, members, start)
    for ti in range(first_tree, parents.shape[0]):
        if not spans_disjoint(members, start, nblocks, parents[ti], depths[ti], leafvs[ti], mark):
            return False
    for b in range(nblocks):
        if not block_agrees(members, start[b], start[b + 1], mats, rooted):
            return False
    return True


@jit
def cut_partition(cut, adj_ptr, adj_to, adj_eid, leafv0, comp, queue, rgs, remap):
    # components of tree 0 without the cut edges, numbered by first taxon
    nv = adj_ptr.shape[0] - 1
    for v in range(nv):
        comp[v] = -1
    nc = 0
    for s in range(nv):
        if comp[s] >= 0:
            continue
        comp[s] = nc
        head = 0
        tail = 1
        queue[0] = s
        while head < tail:
            v = queue[head]
            head += 1
            for p in range(adj_ptr[v], adj_ptr[v + 1]):
                if cut[adj_eid[p]]:
                    continue
                u = adj_to[p]
                if comp[u] < 0:
                    comp[u] = nc
                    queue[tail] = u
                    tail += 1
        nc += 1
    for c in range(nc):
        remap[c] = -1
    nb = 0
    for i in range(leafv0.shape[0]):
        c = comp[leafv0[i]]
        if remap[c] < 0:
            remap[c] = nb
            nb += 1
        rgs[i] = remap[c]
    return nb


@jit
def search_level(j, nedges, adj_ptr, adj_to, adj_eid, parents, depths, leafvs, mats, rooted, first_only, out):
    """Try every j-subset of tree-0 edges; store valid partitions in ``out``.

    Returns the number of stored rows (capped at ``out.shape[0]``).
    """
    n = leafvs.shape[1]
    nv = adj_ptr.shape[0] - 1
    cut = np.zeros(nedges, dtype=np.bool_)
    comp = np.empty(nv, dtype=np.int64)
    queue = np.empty(nv, dtype=np.int64)
    rgs = np.empty(n, dtype=np.int64)
    remap = np.empty(nv, dtype=np.int64)
    members = np.empty(n, dtype=np.int64)
    start = np.empty(n + 2, dtype=np.int64)
    mark = np.empty(parents.shape[1], dtype=np.int64)
    idx = np.arange(j)
    found = 0
    if j > nedges:
        return 0
    while True:
        for e in range(nedges):
            cut[e] = False
        for q in range(j):
            cut[idx[q]] = True
        nb = cut_partition(cut, adj_ptr, adj_to, adj_eid, leafvs[0], comp, queue, rgs, remap)
        # components without taxa are dropped, so nb may be below j + 1
        if is_forest(rgs, nb, parents, depths, leafvs, mats, rooted, 1, members, start, mark):
            if found < out.shape[0]:
                for i in range(n):
                    out[found, i] = rgs[i]
                found += 1
            if first_only or found >= out.shape[0]:
                return found
        # next combination
        q = j - 1
        while q >= 0 and idx[q] == nedges - j + q:
            q -= 1
        if q < 0:
            return found
        idx[q] += 1
        for r in range(q + 1, j):
            idx[r] = idx[r - 1] + 1
