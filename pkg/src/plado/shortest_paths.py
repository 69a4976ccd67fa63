"""Single-source shortest paths, tree construction, center finding, and the
exact brute-force vertex-to-label distance used as ground truth.

All distances run over real edges only. Trees are deterministic: vertices
settle in (distance, id) order and, among parents giving equal distance, the
smaller parent id then smaller edge id wins.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import LabelAbsent
from .graph import PlanarGraph


@dataclass(frozen=True)
class DistanceMap:
    source: int
    dist: np.ndarray  # int64 per vertex


@dataclass(frozen=True)
class Spt:
    """Shortest-path tree: weighted distance h and hop level per vertex."""

    root: int
    parent: np.ndarray  # int32, -1 at the root
    parent_edge: np.ndarray  # int32, -1 at the root
    h: np.ndarray  # int64 weighted distance to root
    level: np.ndarray  # int32 hop depth
    levels: int  # max hop depth


def sssp(g: PlanarGraph, source: int) -> tuple[DistanceMap, Spt]:
    csr = g.real_csr()
    dist, parent, pedge, level = _kernels.dijkstra(
        g.n, csr.indptr, csr.nbr, csr.wt, csr.eid, source
    )
    spt = Spt(source, parent, pedge, dist.copy(), level, int(level.max()))
    return DistanceMap(source, dist), spt


def find_center(g: PlanarGraph) -> tuple[int, int]:
    """Vertex whose shortest-path tree has the fewest hop levels (the graph
    radius, measured in levels); ties go to the smallest vertex id."""
    csr = g.real_csr()
    best_v, best_levels = -1, -1
    for v in range(g.n):
        _, _, _, level = _kernels.dijkstra(
            g.n, csr.indptr, csr.nbr, csr.wt, csr.eid, v
        )
        lv = int(level.max())
        if best_v < 0 or lv < best_levels:
            best_v, best_levels = v, lv
    return best_v, best_levels


def weighted_eccentricity(g: PlanarGraph, v: int) -> int:
    """Largest weighted distance from v; reported by the CLI for information."""
    dm, _ = sssp(g, v)
    return int(dm.dist.max())


def exact_label_distance(g: PlanarGraph, u: int, lam: int) -> tuple[int, int]:
    """Ground-truth nearest-label distance: one full SSSP from u, then a scan
    over the vertices carrying lam. Returns (distance, witness); the witness
    is the smallest-id vertex attaining the minimum."""
    holders = np.flatnonzero(g.labels == lam)
    if holders.size == 0:
        raise LabelAbsent(f"no vertex carries label {lam}")
    dm, _ = sssp(g, u)
    sub = dm.dist[holders]
    k = int(np.argmin(sub))  # argmin takes the first minimum: smallest id
    return int(sub[k]), int(holders[k])
