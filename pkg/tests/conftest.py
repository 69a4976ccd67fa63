"""Shared fixtures and independent reference oracles for the test suite.

The reference implementations here (Floyd-Warshall, BFS eccentricity, naive
scans) deliberately share no code with the library paths they check.
"""
from __future__ import annotations

from collections import deque

import numpy as np
import pytest

from plado import Edge, PlanarGraph

FW_INF = 2**61


def floyd_warshall(g: PlanarGraph) -> np.ndarray:
    """All-pairs distances over real edges, cubic min-plus recursion."""
    n = g.n
    dist = np.full((n, n), FW_INF, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    for e in g.edges:
        if e.artificial:
            continue
        if e.length < dist[e.u, e.v]:
            dist[e.u, e.v] = e.length
            dist[e.v, e.u] = e.length
    for k in range(n):
        via = dist[:, k, None] + dist[None, k, :]
        np.minimum(dist, via, out=dist)
    return dist


def bfs_hop_ecc(g: PlanarGraph, src: int) -> int:
    """Hop eccentricity over real edges (equals SPT levels on unit weights)."""
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for e in g.edges:
        if not e.artificial:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
    depth = [-1] * g.n
    depth[src] = 0
    q = deque([src])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if depth[y] < 0:
                depth[y] = depth[x] + 1
                q.append(y)
    return max(depth)


def unit_path(k: int, num_labels: int = 2) -> PlanarGraph:
    """Path 0-1-...-k-1 with unit lengths; labels alternate 0/1."""
    edges = [Edge(i, i + 1, 1) for i in range(k - 1)]
    rot = []
    for v in range(k):
        r = []
        if v > 0:
            r.append(v - 1)
        if v < k - 1:
            r.append(v)
        rot.append(r)
    return PlanarGraph(k, num_labels, [v % 2 for v in range(k)], edges, rot)


def triangle(labels=(0, 0, 1), lengths=(1, 1, 1)) -> PlanarGraph:
    edges = [
        Edge(0, 1, lengths[0]),
        Edge(0, 2, lengths[1]),
        Edge(1, 2, lengths[2]),
    ]
    return PlanarGraph(3, max(labels) + 1, list(labels), edges, [[0, 1], [0, 2], [1, 2]])


def k4() -> PlanarGraph:
    """K4 embedded with vertex 0 inside triangle 1-2-3."""
    edges = [
        Edge(0, 1, 1), Edge(0, 2, 1), Edge(0, 3, 1),
        Edge(1, 2, 1), Edge(1, 3, 1), Edge(2, 3, 1),
    ]
    rotations = [
        [2, 0, 1],  # around the hub: 3, 1, 2 counterclockwise
        [3, 0, 4],
        [5, 1, 3],
        [5, 4, 2],
    ]
    return PlanarGraph(4, 2, [0, 0, 1, 1], edges, rotations)


def wheel5() -> PlanarGraph:
    """Wheel: hub 0, rim 1..5. Spokes get ids 0..4, rim edges 5..9."""
    edges = [Edge(0, i, 1) for i in range(1, 6)] + [
        Edge(1, 2, 1), Edge(2, 3, 1), Edge(3, 4, 1), Edge(4, 5, 1), Edge(1, 5, 1),
    ]
    rotations = [
        [0, 1, 2, 3, 4],
        [5, 0, 9],
        [6, 1, 5],
        [6, 7, 2],
        [3, 7, 8],
        [9, 4, 8],
    ]
    return PlanarGraph(6, 2, [0, 1, 0, 1, 0, 1], edges, rotations)


@pytest.fixture(scope="session")
def grid44():
    from plado import gen_grid

    return gen_grid(4, 4, (1, 100), 3, 42)


@pytest.fixture(scope="session")
def grid88():
    from plado import gen_grid

    return gen_grid(8, 8, (1, 100), 5, 7)
