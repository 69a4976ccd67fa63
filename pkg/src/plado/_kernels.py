"""Hot numeric kernels: Dijkstra, cycle-side classification, portal greedy.

Every kernel exists twice with identical semantics: a numba @njit version
(`*_nb`) and a pure numpy/Python version (`*_py`). The dispatchers at the
bottom pick one according to `backends.USE_NUMBA`. The pure versions are the
reference; tests assert both produce bit-identical results.
"""
from __future__ import annotations

import heapq

import numpy as np

from .backends import HAS_NUMBA, USE_NUMBA

INF64 = np.int64(2**62)

# classification side codes
ON_CYCLE = 0
INTERIOR = 1
EXTERIOR = 2

# classification status codes
_OK = 0
_ERR_TREE_EDGE = 1
_ERR_FACES = 2
_ERR_VERTEX = 3


# ----------------------------------------------------------------------
# Dijkstra (deterministic tree: settle order by (dist, vertex); on equal
# tentative distance prefer the smaller parent id, then smaller edge id)
# ----------------------------------------------------------------------


def _dijkstra_py(n, indptr, nbr, wt, eid, src):
    dist = np.full(n, INF64, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int32)
    pedge = np.full(n, -1, dtype=np.int32)
    level = np.zeros(n, dtype=np.int32)
    settled = np.zeros(n, dtype=bool)
    dist[src] = 0
    heap = [(0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        for k in range(indptr[u], indptr[u + 1]):
            v = nbr[k]
            if settled[v]:
                continue
            nd = d + wt[k]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                pedge[v] = eid[k]
                level[v] = level[u] + 1
                heapq.heappush(heap, (int(nd), int(v)))
            elif nd == dist[v] and (
                u < parent[v] or (u == parent[v] and eid[k] < pedge[v])
            ):
                parent[v] = u
                pedge[v] = eid[k]
                level[v] = level[u] + 1
    return dist, parent, pedge, level


def _classify_one_py(
    e, eu, ev, parent, pedge, level, face_of_dart, face_indptr, face_darts, is_tree
):
    """Sides of the fundamental cycle of non-tree edge e.

    Returns (status, side) where side[v] is ON_CYCLE / INTERIOR / EXTERIOR.
    INTERIOR is the side of the face left of dart 2e (u -> v with u < v).
    """
    n = parent.shape[0]
    m = eu.shape[0]
    nf = face_indptr.shape[0] - 1
    if is_tree[e]:
        return _ERR_TREE_EDGE, None
    side = np.full(n, -1, dtype=np.int8)
    on_cycle_edge = np.zeros(m, dtype=bool)
    on_cycle_edge[e] = True
    x, y = eu[e], ev[e]
    side[x] = ON_CYCLE
    side[y] = ON_CYCLE
    while level[x] > level[y]:
        on_cycle_edge[pedge[x]] = True
        x = parent[x]
        side[x] = ON_CYCLE
    while level[y] > level[x]:
        on_cycle_edge[pedge[y]] = True
        y = parent[y]
        side[y] = ON_CYCLE
    while x != y:
        on_cycle_edge[pedge[x]] = True
        on_cycle_edge[pedge[y]] = True
        x = parent[x]
        y = parent[y]
        side[x] = ON_CYCLE
        side[y] = ON_CYCLE

    face_color = np.zeros(nf, dtype=np.int8)
    queue = np.empty(nf, dtype=np.int32)
    for color, start in ((INTERIOR, face_of_dart[2 * e]), (EXTERIOR, face_of_dart[2 * e + 1])):
        if face_color[start] != 0:
            return _ERR_FACES, None
        face_color[start] = color
        queue[0] = start
        head, tail = 0, 1
        while head < tail:
            f = queue[head]
            head += 1
            for k in range(face_indptr[f], face_indptr[f + 1]):
                d = face_darts[k]
                if on_cycle_edge[d >> 1]:
                    continue
                g = face_of_dart[d ^ 1]
                if face_color[g] == 0:
                    face_color[g] = color
                    queue[tail] = g
                    tail += 1
                elif face_color[g] != color:
                    return _ERR_FACES, None
    if np.any(face_color == 0):
        return _ERR_FACES, None

    for e2 in range(m):
        c0 = face_color[face_of_dart[2 * e2]]
        c1 = face_color[face_of_dart[2 * e2 + 1]]
        for w in (eu[e2], ev[e2]):
            if side[w] == ON_CYCLE:
                continue
            for c in (c0, c1):
                if side[w] == -1:
                    side[w] = c
                elif side[w] != c:
                    return _ERR_VERTEX, None
    return _OK, side


def _classify_batch_py(
    nontree, eu, ev, parent, pedge, level, face_of_dart, face_indptr, face_darts, is_tree
):
    n = parent.shape[0]
    out = np.empty((nontree.shape[0], n), dtype=np.int8)
    for i in range(nontree.shape[0]):
        status, side = _classify_one_py(
            nontree[i], eu, ev, parent, pedge, level,
            face_of_dart, face_indptr, face_darts, is_tree,
        )
        if status != _OK:
            return status, i, out
        out[i] = side
    return _OK, -1, out


# ----------------------------------------------------------------------
# portal greedy: given per-path-node distances d and root distances h
# (non-decreasing), pick the projection plus the two greedy phases.
# All comparisons are (Q+P)*d[z] < Q*(d[anchor] + |h delta|) in exact
# integer arithmetic; the caller guarantees int64 does not overflow.
# ----------------------------------------------------------------------


def _select_positions_py(d, h, nodes, p_num, q_den):
    ln = len(d)
    z0 = 0
    for i in range(1, ln):
        if (d[i], h[i], nodes[i]) < (d[z0], h[z0], nodes[z0]):
            z0 = i
    qp = q_den + p_num
    toward: list[int] = []
    cur = z0
    while True:
        best = -1
        for j in range(ln):
            if h[j] < h[cur] and qp * d[j] < q_den * (d[cur] + h[cur] - h[j]):
                if best < 0 or h[j] > h[best]:
                    best = j
        if best < 0:
            break
        toward.append(best)
        cur = best
    away: list[int] = []
    cur = z0
    while True:
        best = -1
        for j in range(ln):
            if h[j] > h[cur] and qp * d[j] < q_den * (d[cur] + h[j] - h[cur]):
                if best < 0 or h[j] < h[best]:
                    best = j
        if best < 0:
            break
        away.append(best)
        cur = best
    return toward[::-1] + [z0] + away


if HAS_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _heap_push(hd, hv, size, d, v):
        i = size
        hd[i] = d
        hv[i] = v
        while i > 0:
            p = (i - 1) >> 1
            if hd[p] > hd[i] or (hd[p] == hd[i] and hv[p] > hv[i]):
                hd[p], hd[i] = hd[i], hd[p]
                hv[p], hv[i] = hv[i], hv[p]
                i = p
            else:
                break
        return size + 1

    @njit(cache=True)
    def _heap_pop(hd, hv, size):
        d, v = hd[0], hv[0]
        size -= 1
        hd[0] = hd[size]
        hv[0] = hv[size]
        i = 0
        while True:
            l = 2 * i + 1
            r = l + 1
            s = i
            if l < size and (hd[l] < hd[s] or (hd[l] == hd[s] and hv[l] < hv[s])):
                s = l
            if r < size and (hd[r] < hd[s] or (hd[r] == hd[s] and hv[r] < hv[s])):
                s = r
            if s == i:
                break
            hd[s], hd[i] = hd[i], hd[s]
            hv[s], hv[i] = hv[i], hv[s]
            i = s
        return d, v, size

    @njit(cache=True)
    def _dijkstra_nb_impl(n, indptr, nbr, wt, eid, src):
        dist = np.full(n, INF64, dtype=np.int64)
        parent = np.full(n, -1, dtype=np.int32)
        pedge = np.full(n, -1, dtype=np.int32)
        level = np.zeros(n, dtype=np.int32)
        settled = np.zeros(n, dtype=np.uint8)
        cap = indptr[n] + 8
        hd = np.empty(cap, dtype=np.int64)
        hv = np.empty(cap, dtype=np.int32)
        size = 0
        dist[src] = 0
        size = _heap_push(hd, hv, size, 0, src)
        while size > 0:
            d, u, size = _heap_pop(hd, hv, size)
            if settled[u] == 1:
                continue
            settled[u] = 1
            for k in range(indptr[u], indptr[u + 1]):
                v = nbr[k]
                if settled[v] == 1:
                    continue
                nd = d + wt[k]
                if nd < dist[v]:
                    dist[v] = nd
                    parent[v] = u
                    pedge[v] = eid[k]
                    level[v] = level[u] + 1
                    size = _heap_push(hd, hv, size, nd, v)
                elif nd == dist[v] and (
                    u < parent[v] or (u == parent[v] and eid[k] < pedge[v])
                ):
                    parent[v] = u
                    pedge[v] = eid[k]
                    level[v] = level[u] + 1
        return dist, parent, pedge, level

    def _dijkstra_nb(n, indptr, nbr, wt, eid, src):
        return _dijkstra_nb_impl(n, indptr, nbr, wt, eid, src)

    @njit(cache=True)
    def _classify_one_nb(
        e, eu, ev, parent, pedge, level,
        face_of_dart, face_indptr, face_darts, is_tree, side, face_color, queue,
        on_cycle_edge,
    ):
        if is_tree[e]:
            return _ERR_TREE_EDGE
        n = parent.shape[0]
        m = eu.shape[0]
        nf = face_color.shape[0]
        for i in range(n):
            side[i] = -1
        for i in range(nf):
            face_color[i] = 0
        for i in range(m):
            on_cycle_edge[i] = False
        on_cycle_edge[e] = True
        x, y = eu[e], ev[e]
        side[x] = ON_CYCLE
        side[y] = ON_CYCLE
        while level[x] > level[y]:
            on_cycle_edge[pedge[x]] = True
            x = parent[x]
            side[x] = ON_CYCLE
        while level[y] > level[x]:
            on_cycle_edge[pedge[y]] = True
            y = parent[y]
            side[y] = ON_CYCLE
        while x != y:
            on_cycle_edge[pedge[x]] = True
            on_cycle_edge[pedge[y]] = True
            x = parent[x]
            y = parent[y]
            side[x] = ON_CYCLE
            side[y] = ON_CYCLE

        for seed in range(2):
            color = INTERIOR if seed == 0 else EXTERIOR
            start = face_of_dart[2 * e + seed]
            if face_color[start] != 0:
                return _ERR_FACES
            face_color[start] = color
            queue[0] = start
            head, tail = 0, 1
            while head < tail:
                f = queue[head]
                head += 1
                for k in range(face_indptr[f], face_indptr[f + 1]):
                    dd = face_darts[k]
                    if on_cycle_edge[dd >> 1]:
                        continue
                    g = face_of_dart[dd ^ 1]
                    if face_color[g] == 0:
                        face_color[g] = color
                        queue[tail] = g
                        tail += 1
                    elif face_color[g] != color:
                        return _ERR_FACES
        for f in range(nf):
            if face_color[f] == 0:
                return _ERR_FACES

        for e2 in range(m):
            c0 = face_color[face_of_dart[2 * e2]]
            c1 = face_color[face_of_dart[2 * e2 + 1]]
            for t in range(2):
                w = eu[e2] if t == 0 else ev[e2]
                if side[w] == ON_CYCLE:
                    continue
                for s in range(2):
                    c = c0 if s == 0 else c1
                    if side[w] == -1:
                        side[w] = c
                    elif side[w] != c:
                        return _ERR_VERTEX
        return _OK

    @njit(cache=True)
    def _classify_batch_nb_impl(
        nontree, eu, ev, parent, pedge, level,
        face_of_dart, face_indptr, face_darts, is_tree,
    ):
        n = parent.shape[0]
        m = eu.shape[0]
        nf = face_indptr.shape[0] - 1
        out = np.empty((nontree.shape[0], n), dtype=np.int8)
        side = np.empty(n, dtype=np.int8)
        face_color = np.empty(nf, dtype=np.int8)
        queue = np.empty(nf, dtype=np.int32)
        on_cycle_edge = np.zeros(m, dtype=np.bool_)
        for i in range(nontree.shape[0]):
            status = _classify_one_nb(
                nontree[i], eu, ev, parent, pedge, level,
                face_of_dart, face_indptr, face_darts, is_tree,
                side, face_color, queue, on_cycle_edge,
            )
            if status != _OK:
                return status, i, out
            out[i] = side
        return _OK, -1, out

    def _classify_batch_nb(*args):
        return _classify_batch_nb_impl(*args)

    @njit(cache=True)
    def _select_positions_nb_impl(d, h, nodes, p_num, q_den):
        ln = d.shape[0]
        z0 = 0
        for i in range(1, ln):
            if d[i] < d[z0] or (
                d[i] == d[z0]
                and (h[i] < h[z0] or (h[i] == h[z0] and nodes[i] < nodes[z0]))
            ):
                z0 = i
        qp = q_den + p_num
        out = np.empty(ln, dtype=np.int32)
        n_toward = 0
        cur = z0
        while True:
            best = -1
            for j in range(ln):
                if h[j] < h[cur] and qp * d[j] < q_den * (d[cur] + h[cur] - h[j]):
                    if best < 0 or h[j] > h[best]:
                        best = j
            if best < 0:
                break
            out[n_toward] = best
            n_toward += 1
            cur = best
        out[: n_toward] = out[: n_toward][::-1].copy()
        out[n_toward] = z0
        count = n_toward + 1
        cur = z0
        while True:
            best = -1
            for j in range(ln):
                if h[j] > h[cur] and qp * d[j] < q_den * (d[cur] + h[j] - h[cur]):
                    if best < 0 or h[j] < h[best]:
                        best = j
            if best < 0:
                break
            out[count] = best
            count += 1
            cur = best
        return out[:count].copy()

    def _select_positions_nb(d, h, nodes, p_num, q_den):
        return list(_select_positions_nb_impl(d, h, nodes, p_num, q_den))


def dijkstra(n, indptr, nbr, wt, eid, src):
    """Shortest paths from src over the CSR adjacency; returns
    (dist, parent, parent_edge, level) arrays."""
    if USE_NUMBA:
        return _dijkstra_nb(n, indptr, nbr, wt, eid, src)
    return _dijkstra_py(n, indptr, nbr, wt, eid, src)


def classify_batch(nontree, eu, ev, parent, pedge, level, face_of_dart,
                   face_indptr, face_darts, is_tree):
    """Cycle-side classification for every edge id in `nontree`; returns
    (status, failing_index, matrix of side codes)."""
    args = (nontree, eu, ev, parent, pedge, level, face_of_dart,
            face_indptr, face_darts, is_tree)
    if USE_NUMBA:
        return _classify_batch_nb(*args)
    return _classify_batch_py(*args)


def select_positions(d, h, nodes, p_num, q_den):
    """Portal positions (projection + both greedy phases) sorted by h.

    Falls back to exact Python integers when the cross-multiplied
    comparisons might overflow int64.
    """
    ln = len(d)
    if ln == 0:
        return []
    bound = (int(q_den) + int(p_num)) * (int(max(d)) + int(h[-1]) + 1)
    if USE_NUMBA and bound < 2**62:
        return _select_positions_nb(
            np.asarray(d, dtype=np.int64),
            np.asarray(h, dtype=np.int64),
            np.asarray(nodes, dtype=np.int64),
            p_num,
            q_den,
        )
    return _select_positions_py(
        [int(x) for x in d], [int(x) for x in h], [int(x) for x in nodes],
        int(p_num), int(q_den),
    )
