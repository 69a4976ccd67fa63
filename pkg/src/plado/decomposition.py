"""Fundamental-cycle separators and the recursive decomposition tree.

A separator is the cycle closed by one non-tree edge of the triangulated
graph plus the two tree paths from its endpoints up to their common ancestor.
Each path descends from that apex along the shortest-path tree, so root
distances are non-decreasing along it and the distance between two of its
nodes is exactly their h difference.

Pieces split recursively: the cycle's interior and exterior members become
the two children, cycle members stay at the piece. Balance is guaranteed:
some non-tree edge always leaves at most 2/3 of the piece weight per side.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import EXTERIOR, INTERIOR, ON_CYCLE, _OK
from .errors import EdgeInTree, InconsistentEmbedding, NoBalancedEdge
from .graph import PlanarGraph
from .shortest_paths import Spt


@dataclass(frozen=True)
class SeparatorPath:
    """One descending root path of a separator cycle, apex first."""

    nodes: np.ndarray  # int32
    h: np.ndarray  # int64, aligned with nodes, non-decreasing
    edge_ids: np.ndarray  # int32, edge between nodes[i] and nodes[i+1]
    position: dict[int, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class Separator:
    nontree_edge: int
    path_a: SeparatorPath
    path_b: SeparatorPath
    cycle_vertices: frozenset[int]

    @property
    def paths(self) -> tuple[SeparatorPath, SeparatorPath]:
        return (self.path_a, self.path_b)


@dataclass
class Piece:
    id: int
    parent: int | None
    depth: int
    members: np.ndarray  # sorted int32
    separator: Separator | None = None
    children: tuple[int, ...] = ()
    # (vertex, label) -> (distance, witness) within the member-induced
    # subgraph; present only at separator-less pieces with > 1 member
    leaf_table: dict[tuple[int, int], tuple[int, int]] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.separator is None


@dataclass
class Rgd:
    pieces: list[Piece]
    root: int
    deepest_piece: np.ndarray  # int32 per vertex

    @property
    def depth(self) -> int:
        return max(p.depth for p in self.pieces)


def _root_path(spt: Spt, v: int, apex: int) -> tuple[list[int], list[int]]:
    """Vertices and edge ids from apex down to v along the tree."""
    nodes = [v]
    eids = []
    while v != apex:
        eids.append(int(spt.parent_edge[v]))
        v = int(spt.parent[v])
        nodes.append(v)
    return nodes[::-1], eids[::-1]


def fundamental_cycle(g: PlanarGraph, spt: Spt, e: int) -> Separator:
    """The cycle of non-tree edge e, split into its two descending paths."""
    edge = g.edges[e]
    a, b = edge.u, edge.v
    if spt.parent_edge[a] == e or spt.parent_edge[b] == e:
        raise EdgeInTree(f"edge {e} is a tree edge")
    x, y = a, b
    while spt.level[x] > spt.level[y]:
        x = int(spt.parent[x])
    while spt.level[y] > spt.level[x]:
        y = int(spt.parent[y])
    while x != y:
        x = int(spt.parent[x])
        y = int(spt.parent[y])
    apex = x

    def make_path(endpoint: int) -> SeparatorPath:
        nodes, eids = _root_path(spt, endpoint, apex)
        arr = np.asarray(nodes, dtype=np.int32)
        return SeparatorPath(
            arr,
            spt.h[arr].astype(np.int64),
            np.asarray(eids, dtype=np.int32),
            {int(v): i for i, v in enumerate(nodes)},
        )

    pa, pb = make_path(a), make_path(b)
    return Separator(e, pa, pb, frozenset(pa.position) | frozenset(pb.position))


def classify_sides(g: PlanarGraph, sep: Separator) -> np.ndarray:
    """Per-vertex side codes (ON_CYCLE / INTERIOR / EXTERIOR) for a separator.

    Faces are two-colored by a dual-graph traversal that never crosses a
    cycle edge, seeded from the two faces incident to the non-tree edge;
    INTERIOR is the side of the face left of the dart u -> v (u < v). An
    off-cycle vertex must see a single color on all incident faces.
    """
    fd = g.face_data()
    n, m = g.n, g.m
    side = np.full(n, -1, dtype=np.int8)
    on_cycle_edge = np.zeros(m, dtype=bool)
    e = sep.nontree_edge
    on_cycle_edge[e] = True
    for path in sep.paths:
        on_cycle_edge[path.edge_ids] = True
        side[path.nodes] = ON_CYCLE

    face_color = np.zeros(fd.nfaces, dtype=np.int8)
    for color, start in (
        (INTERIOR, int(fd.face_of_dart[2 * e])),
        (EXTERIOR, int(fd.face_of_dart[2 * e + 1])),
    ):
        if face_color[start] != 0:
            raise InconsistentEmbedding("cycle does not separate its two faces")
        face_color[start] = color
        stack = [start]
        while stack:
            f = stack.pop()
            for k in range(fd.face_indptr[f], fd.face_indptr[f + 1]):
                d = int(fd.face_darts[k])
                if on_cycle_edge[d >> 1]:
                    continue
                nf = int(fd.face_of_dart[d ^ 1])
                if face_color[nf] == 0:
                    face_color[nf] = color
                    stack.append(nf)
                elif face_color[nf] != color:
                    raise InconsistentEmbedding("face reached from both sides")
    if np.any(face_color == 0):
        raise InconsistentEmbedding("dual traversal left a face uncolored")

    for e2, edge in enumerate(g.edges):
        c0 = face_color[fd.face_of_dart[2 * e2]]
        c1 = face_color[fd.face_of_dart[2 * e2 + 1]]
        for w in (edge.u, edge.v):
            if side[w] == ON_CYCLE:
                continue
            for c in (c0, c1):
                if side[w] == -1:
                    side[w] = c
                elif side[w] != c:
                    raise InconsistentEmbedding(
                        f"vertex {w} touches faces on both sides"
                    )
    return side


class SeparatorFinder:
    """Batch side classification for every non-tree edge of one graph/tree.

    Classifications do not depend on piece weights, so they are computed once
    (via the kernel backend) and reused for every piece of the decomposition.
    """

    def __init__(self, g: PlanarGraph, spt: Spt):
        self.g = g
        self.spt = spt
        m = g.m
        is_tree = np.zeros(m, dtype=bool)
        for v in range(g.n):
            if spt.parent_edge[v] >= 0:
                is_tree[spt.parent_edge[v]] = True
        self.nontree = np.asarray(
            [e for e in range(m) if not is_tree[e]], dtype=np.int32
        )
        self._row_of = {int(e): i for i, e in enumerate(self.nontree)}
        self._is_tree = is_tree
        self._sides: np.ndarray | None = None

    def sides_matrix(self) -> np.ndarray:
        if self._sides is None:
            g = self.g
            fd = g.face_data()
            eu = np.asarray([e.u for e in g.edges], dtype=np.int32)
            ev = np.asarray([e.v for e in g.edges], dtype=np.int32)
            status, at, out = _kernels.classify_batch(
                self.nontree, eu, ev,
                self.spt.parent, self.spt.parent_edge, self.spt.level,
                fd.face_of_dart, fd.face_indptr, fd.face_darts, self._is_tree,
            )
            if status != _OK:
                raise InconsistentEmbedding(
                    f"classification failed for edge {int(self.nontree[at])}"
                )
            self._sides = out
        return self._sides

    def side_row(self, e: int) -> np.ndarray:
        return self.sides_matrix()[self._row_of[e]]

    def choose(self, members: np.ndarray) -> int:
        """Non-tree edge whose cycle best balances the member weights: both
        sides at most 2/3 of the total, minimizing the larger side, then the
        smallest edge id."""
        if self.nontree.size == 0:
            raise NoBalancedEdge("graph has no non-tree edge")
        sub = self.sides_matrix()[:, members]
        w_int = (sub == INTERIOR).sum(axis=1)
        w_ext = (sub == EXTERIOR).sum(axis=1)
        total = members.size
        ok = (3 * w_int <= 2 * total) & (3 * w_ext <= 2 * total)
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            raise NoBalancedEdge(f"no balanced cycle for a piece of {total} members")
        score = np.maximum(w_int, w_ext)
        best = idx[int(np.argmin(score[idx]))]  # first minimum: smallest edge id
        return int(self.nontree[best])


def choose_separator(
    g: PlanarGraph, spt: Spt, weights: np.ndarray | dict[int, int]
) -> Separator:
    """Balanced separator for an explicit 0/1 weight assignment."""
    if isinstance(weights, dict):
        arr = np.zeros(g.n, dtype=np.int8)
        for v, w in weights.items():
            arr[v] = w
        weights = arr
    members = np.flatnonzero(np.asarray(weights) != 0).astype(np.int64)
    finder = SeparatorFinder(g, spt)
    return fundamental_cycle(g, spt, finder.choose(members))


def _leaf_distances(
    g: PlanarGraph, members: np.ndarray
) -> dict[tuple[int, int], tuple[int, int]]:
    """Exact label distances inside the member-induced subgraph (real edges).

    Unreachable (vertex, label) pairs are omitted; any path leaving the
    induced subgraph crosses an ancestor separator and is covered by portals.
    """
    idx_of = {int(v): i for i, v in enumerate(members)}
    k = len(members)
    deg = np.zeros(k + 1, dtype=np.int64)
    sub_edges = []
    for i, e in enumerate(g.edges):
        if e.artificial:
            continue
        iu, iv = idx_of.get(e.u), idx_of.get(e.v)
        if iu is not None and iv is not None:
            sub_edges.append((iu, iv, e.length, i))
            deg[iu + 1] += 1
            deg[iv + 1] += 1
    indptr = np.cumsum(deg)
    nbr = np.zeros(indptr[-1], dtype=np.int32)
    wt = np.zeros(indptr[-1], dtype=np.int64)
    eid = np.zeros(indptr[-1], dtype=np.int32)
    fill = indptr[:-1].copy()
    for iu, iv, w, i in sub_edges:
        for x, y in ((iu, iv), (iv, iu)):
            nbr[fill[x]] = y
            wt[fill[x]] = w
            eid[fill[x]] = i
            fill[x] += 1

    table: dict[tuple[int, int], tuple[int, int]] = {}
    member_labels = g.labels[members]
    for i, v in enumerate(members):
        dist, _, _, _ = _kernels.dijkstra(k, indptr, nbr, wt, eid, i)
        for lam in sorted(set(int(x) for x in member_labels)):
            holders = np.flatnonzero(member_labels == lam)
            sub = dist[holders]
            j = int(np.argmin(sub))
            if sub[j] < _kernels.INF64:
                table[(int(v), lam)] = (int(sub[j]), int(members[holders[j]]))
    return table


def build_rgd(g: PlanarGraph, spt: Spt, leaf_max: int = 1) -> Rgd:
    """Recursive decomposition of the triangulated graph g down to pieces of
    at most leaf_max members.

    Cycle members stay at their piece (they are their own portals there, at
    distance 0). A piece whose members all land on its cycle keeps the
    separator but gets no children. A piece that cannot be split because the
    graph has no non-tree edge (n <= 2) becomes a forced leaf with an exact
    distance table.
    """
    if leaf_max < 1:
        raise ValueError("leaf_max must be >= 1")
    finder = SeparatorFinder(g, spt)
    pieces: list[Piece] = []
    deepest = np.full(g.n, -1, dtype=np.int32)

    def make_leaf(piece: Piece) -> None:
        deepest[piece.members] = piece.id
        if len(piece.members) > 1:
            piece.leaf_table = _leaf_distances(g, piece.members)

    stack = [(np.arange(g.n, dtype=np.int32), None, 0)]
    while stack:
        members, parent, depth = stack.pop()
        pid = len(pieces)
        piece = Piece(pid, parent, depth, members)
        pieces.append(piece)
        if parent is not None:
            pieces[parent].children = pieces[parent].children + (pid,)
        if members.size <= leaf_max or finder.nontree.size == 0:
            make_leaf(piece)
            continue
        e = finder.choose(members)
        piece.separator = fundamental_cycle(g, spt, e)
        side = finder.side_row(e)
        msides = side[members]
        on_cycle = members[msides == ON_CYCLE]
        ext = members[msides == EXTERIOR]
        int_ = members[msides == INTERIOR]
        deepest[on_cycle] = pid
        if ext.size == 0 and int_.size == 0:
            continue  # separator swallowed every member
        # push interior first so the exterior child gets the next id
        stack.append((int_, pid, depth + 1))
        stack.append((ext, pid, depth + 1))

    return Rgd(pieces, 0, deepest)


def ancestors(rgd: Rgd, piece_id: int) -> list[int]:
    """Piece ids from the root down to piece_id, inclusive."""
    out = []
    p: int | None = piece_id
    while p is not None:
        out.append(p)
        p = rgd.pieces[p].parent
    return out[::-1]


def lca(rgd: Rgd, p: int, q: int) -> int:
    """Deepest common ancestor of two pieces (depth-equalizing walk)."""
    while rgd.pieces[p].depth > rgd.pieces[q].depth:
        p = rgd.pieces[p].parent  # type: ignore[assignment]
    while rgd.pieces[q].depth > rgd.pieces[p].depth:
        q = rgd.pieces[q].parent  # type: ignore[assignment]
    while p != q:
        p = rgd.pieces[p].parent  # type: ignore[assignment]
        q = rgd.pieces[q].parent  # type: ignore[assignment]
    return p
