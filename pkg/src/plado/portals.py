"""Portal selection along separator paths and per-vertex portal tables.

For a vertex v and one separator path, the portal set is the projection z0
(the path node nearest to v) plus two greedy sweeps: toward the root, keep
picking the farthest-from-root node z with h(z) < h(anchor) and

    (1+eps) * d(v,z) < d(v,anchor) + h(anchor) - h(z)

and away from the root, the closest-from-root node z with h(z) > h(anchor)
and (1+eps) * d(v,z) < d(v,anchor) + h(z) - h(anchor). Every comparison is
exact: eps = P/Q is cross-multiplied to integers. The resulting list covers
every path node w within (1+eps) * d(v,w) and has fewer than
4/(eps - eps^2) + 1 entries for 0 < eps < 1.

With eps = 2 (the 3-stretch configuration) the list is just the projection,
which covers every path node within a factor of 3.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .decomposition import Rgd, SeparatorPath, ancestors
from .graph import PlanarGraph
from .shortest_paths import DistanceMap, Spt, sssp

MAX_EPS_TERM = 2**20

THREE_STRETCH_EPS = Fraction(2)


def check_eps(eps: Fraction) -> None:
    if not isinstance(eps, Fraction):
        raise TypeError("eps must be an exact Fraction")
    if not (0 < eps < 1 or eps == 2):
        raise ValueError("eps must satisfy 0 < eps < 1, or equal 2 for 3-stretch")
    if eps.numerator > MAX_EPS_TERM or eps.denominator > MAX_EPS_TERM:
        raise ValueError("eps numerator/denominator must be <= 2^20")


def portal_count_limit(eps: Fraction) -> int:
    """Largest legal portal list length per path, projection included."""
    if eps == 2:
        return 1
    bound = 4 / (eps - eps * eps)  # exact Fraction arithmetic
    limit = int(bound) if bound != int(bound) else int(bound) - 1
    return limit + 1  # strict "< bound" plus the projection


@dataclass(frozen=True)
class Portal:
    pos: int  # index into the separator path
    node: int
    d: int  # exact graph distance from the owning vertex to node
    h: int  # root distance of node


def project(dist_v: DistanceMap, path: SeparatorPath) -> Portal:
    """Path node closest to the vertex; ties by smaller h, then smaller id."""
    d = dist_v.dist[path.nodes]
    best = 0
    for i in range(1, len(path)):
        key = (d[i], path.h[i], path.nodes[i])
        if key < (d[best], path.h[best], path.nodes[best]):
            best = i
    return Portal(best, int(path.nodes[best]), int(d[best]), int(path.h[best]))


def select_portals(
    dist_v: DistanceMap, path: SeparatorPath, eps: Fraction
) -> list[Portal]:
    check_eps(eps)
    if eps == 2:
        return [project(dist_v, path)]
    d = dist_v.dist[path.nodes]
    positions = _kernels.select_positions(
        d, path.h, path.nodes, eps.numerator, eps.denominator
    )
    return [
        Portal(int(i), int(path.nodes[i]), int(d[i]), int(path.h[i]))
        for i in positions
    ]


def verify_distance_property(
    dist_v: DistanceMap, path: SeparatorPath, portals: list[Portal], eps: Fraction
) -> bool:
    """Exhaustive exact check: every path node w is covered by some portal,
    i.e. min_i (d_i + |h_i - h(w)|) <= (1+eps) * d(v,w)."""
    check_eps(eps)
    p, q = eps.numerator, eps.denominator
    for w in range(len(path)):
        dw = int(dist_v.dist[path.nodes[w]])
        hw = int(path.h[w])
        covered = any(
            q * (pt.d + abs(pt.h - hw)) <= (q + p) * dw for pt in portals
        )
        if not covered:
            return False
    return True


class VertexPortalTables:
    """For every vertex: portal lists on both paths of each ancestor piece
    that carries a separator, keyed by piece id."""

    def __init__(self, tables: list[dict[int, tuple[list[Portal], list[Portal]]]]):
        self.tables = tables

    def __getitem__(self, v: int) -> dict[int, tuple[list[Portal], list[Portal]]]:
        return self.tables[v]

    def total_entries(self) -> int:
        return sum(
            len(side)
            for t in self.tables
            for pair in t.values()
            for side in pair
        )


def build_vertex_tables(
    g: PlanarGraph, spt: Spt, rgd: Rgd, eps: Fraction
) -> VertexPortalTables:
    """One exact SSSP per vertex, then portal selection on both paths of every
    ancestor piece of the vertex's deepest piece."""
    check_eps(eps)
    chains: dict[int, list[int]] = {}
    tables: list[dict[int, tuple[list[Portal], list[Portal]]]] = []
    for v in range(g.n):
        leaf = int(rgd.deepest_piece[v])
        chain = chains.get(leaf)
        if chain is None:
            chain = [
                p for p in ancestors(rgd, leaf) if rgd.pieces[p].separator is not None
            ]
            chains[leaf] = chain
        if not chain:
            tables.append({})
            continue
        dist_v, _ = sssp(g, v)
        entry: dict[int, tuple[list[Portal], list[Portal]]] = {}
        for p in chain:
            sep = rgd.pieces[p].separator
            entry[p] = (
                select_portals(dist_v, sep.path_a, eps),
                select_portals(dist_v, sep.path_b, eps),
            )
        tables.append(entry)
    return VertexPortalTables(tables)
