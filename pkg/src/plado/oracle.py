"""The assembled distance oracle.

Preprocessing: pick the center (fewest shortest-path-tree levels), build its
tree, triangulate, decompose recursively, select portals per vertex, and
index them per label. A query walks the ancestor pieces of the query
vertex's deepest piece; on each separator path it combines every portal of
the vertex with the label's best farther/closer portal (two RMQ lookups) and
keeps the smallest sum

    d(u, z_u) + |h(z) - h(z_u)| + d_min(z)

which is the length of a real walk u -> z_u -> z -> witness, so answers are
never below the true distance and, by the portal distance property, never
above (1+eps) times it (3x in the single-portal configuration).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .decomposition import Rgd, build_rgd
from .errors import LabelAbsent
from .graph import PlanarGraph, triangulate
from .index import (
    MODE_BINARY,
    MODE_BITVECTOR,
    LabelIndex,
    LabelPathIndex,
    build_label_index,
    locate_split,
)
from .portals import (
    THREE_STRETCH_EPS,
    VertexPortalTables,
    build_vertex_tables,
    check_eps,
)
from .shortest_paths import Spt, find_center, sssp


@dataclass(frozen=True)
class OracleConfig:
    eps: Fraction  # 0 < eps < 1, or exactly 2 for the 3-stretch variant
    range_mode: str = MODE_BINARY
    leaf_max: int = 1
    root_override: int | None = None

    def __post_init__(self):
        check_eps(self.eps)
        if self.range_mode not in (MODE_BINARY, MODE_BITVECTOR):
            raise ValueError(f"unknown range mode {self.range_mode!r}")
        if self.leaf_max < 1:
            raise ValueError("leaf_max must be >= 1")

    @property
    def three_stretch(self) -> bool:
        return self.eps == THREE_STRETCH_EPS


@dataclass
class QueryStats:
    pieces_visited: int = 0
    portals_examined: int = 0
    binary_search_steps: int = 0
    rmq_calls: int = 0


@dataclass(frozen=True)
class QueryResult:
    d: int
    witness: int
    stats: QueryStats = field(compare=False, default_factory=QueryStats)


@dataclass(frozen=True)
class SpaceReport:
    portal_entries: int
    label_entries: int
    contributor_pairs: int
    rmq_cells: int
    bitvector_words: int
    leaf_table_cells: int
    pieces: int


@dataclass(frozen=True)
class RelabelReport:
    vertex: int
    old_label: int
    new_label: int
    structures_touched: int  # (label-side, piece, path) indexes rebuilt


class Oracle:
    def __init__(
        self,
        graph: PlanarGraph,
        spt: Spt,
        rgd: Rgd,
        tables: VertexPortalTables,
        label_index: LabelIndex,
        config: OracleConfig,
    ):
        self.graph = graph
        self.spt = spt
        self.rho = spt.levels
        self.rgd = rgd
        self.tables = tables
        self.label_index = label_index
        self.config = config
        self.label_counts = np.bincount(
            graph.labels, minlength=graph.num_labels
        ).astype(np.int64)

    # ------------------------------------------------------------------

    @classmethod
    def build(cls, g: PlanarGraph, config: OracleConfig) -> "Oracle":
        if config.root_override is not None:
            root = config.root_override
            if not 0 <= root < g.n:
                raise ValueError(f"root override {root} out of range")
            _, spt = sssp(g, root)
        else:
            root, _ = find_center(g)
            _, spt = sssp(g, root)
        tri = triangulate(g)
        rgd = build_rgd(tri, spt, config.leaf_max)
        tables = build_vertex_tables(tri, spt, rgd, config.eps)
        label_index = build_label_index(tables, tri.labels, rgd)
        return cls(tri, spt, rgd, tables, label_index, config)

    # ------------------------------------------------------------------

    def query(self, u: int, lam: int, mode: str | None = None) -> QueryResult:
        if not 0 <= u < self.graph.n:
            raise ValueError(f"vertex {u} out of range")
        if not 0 <= lam < self.graph.num_labels or self.label_counts[lam] == 0:
            raise LabelAbsent(f"no vertex carries label {lam}")
        stats = QueryStats()
        if self.graph.labels[u] == lam:
            return QueryResult(0, u, stats)
        mode = mode or self.config.range_mode

        best_d: int | None = None
        best_w = -1
        per_label = self.label_index.per_label[lam]
        vtable = self.tables[u]
        pid: int | None = int(self.rgd.deepest_piece[u])
        while pid is not None:
            piece = self.rgd.pieces[pid]
            pair = per_label.get(pid)
            if pair is not None and pid in vtable:
                stats.pieces_visited += 1
                for side in (0, 1):
                    lpi = pair[side]
                    if lpi is None or len(lpi) == 0:
                        continue
                    for portal in vtable[pid][side]:
                        stats.portals_examined += 1
                        lo, hi, steps = locate_split(lpi, portal.h, portal.pos, mode)
                        stats.binary_search_steps += steps
                        n_entries = len(lpi)
                        if lo < n_entries:
                            stats.rmq_calls += 1
                            i = lpi.rmq_plus.query(lo, n_entries - 1)
                            ent = lpi.entries[i]
                            cand = portal.d + (ent.h - portal.h) + ent.d_min
                            if best_d is None or cand < best_d:
                                best_d, best_w = cand, ent.witness
                        if hi > 0:
                            stats.rmq_calls += 1
                            i = lpi.rmq_minus.query(0, hi - 1)
                            ent = lpi.entries[i]
                            cand = portal.d + (portal.h - ent.h) + ent.d_min
                            if best_d is None or cand < best_d:
                                best_d, best_w = cand, ent.witness
            pid = piece.parent

        leaf = self.rgd.pieces[int(self.rgd.deepest_piece[u])]
        if leaf.leaf_table is not None:
            hit = leaf.leaf_table.get((u, lam))
            if hit is not None and (best_d is None or hit[0] < best_d):
                best_d, best_w = hit
        if best_d is None:
            raise LabelAbsent(
                f"label {lam} unreachable from vertex {u} (inconsistent oracle)"
            )
        return QueryResult(int(best_d), int(best_w), stats)

    def nearest_labeled(self, u: int, lam: int, mode: str | None = None) -> QueryResult:
        """Approximate nearest neighbor among the vertices carrying lam;
        identical contract to query()."""
        return self.query(u, lam, mode)

    # ------------------------------------------------------------------

    def change_label(self, v: int, new_label: int) -> RelabelReport:
        """Move v's portal contributions from its old label's indexes to the
        new label's, rebuilding only the touched (piece, path) structures.
        The resulting state answers every query exactly like a fresh build on
        the relabeled graph."""
        if not 0 <= v < self.graph.n:
            raise ValueError(f"vertex {v} out of range")
        if not 0 <= new_label < self.graph.num_labels:
            raise ValueError(f"label {new_label} out of range")
        old_label = int(self.graph.labels[v])
        if old_label == new_label:
            return RelabelReport(v, old_label, new_label, 0)
        touched = 0
        old_map = self.label_index.per_label[old_label]
        new_map = self.label_index.per_label[new_label]
        for piece_id, pair in self.tables[v].items():
            sep = self.rgd.pieces[piece_id].separator
            for side in (0, 1):
                portals = pair[side]
                if not portals:
                    continue
                old_pair = old_map[piece_id]
                lpi = old_pair[side]
                for portal in portals:
                    lpi.remove(portal.pos, portal.d, v)
                touched += 1
                if len(lpi) == 0:
                    old_pair[side] = None
                    if old_pair[0] is None and old_pair[1] is None:
                        del old_map[piece_id]
                new_pair = new_map.setdefault(piece_id, [None, None])
                if new_pair[side] is None:
                    new_pair[side] = LabelPathIndex(
                        piece_id, side, sep.paths[side], {}
                    )
                nlpi = new_pair[side]
                for portal in portals:
                    nlpi.contributors.setdefault(portal.pos, []).append(
                        (portal.d, v)
                    )
                for lst in nlpi.contributors.values():
                    lst.sort()
                nlpi._derive()
                touched += 1
        self.graph.labels[v] = new_label
        self.label_counts[old_label] -= 1
        self.label_counts[new_label] += 1
        return RelabelReport(v, old_label, new_label, touched)

    # ------------------------------------------------------------------

    def stats(self) -> SpaceReport:
        rmq_cells = 0
        bv_words = 0
        for label in self.label_index.per_label:
            for pair in label.values():
                for lpi in pair:
                    if lpi is None:
                        continue
                    rmq_cells += lpi.rmq_plus.cells() + lpi.rmq_minus.cells()
                    bv_words += lpi.omega.word_count()
        leaf_cells = sum(
            len(p.leaf_table) for p in self.rgd.pieces if p.leaf_table is not None
        )
        return SpaceReport(
            portal_entries=self.tables.total_entries(),
            label_entries=self.label_index.total_entries(),
            contributor_pairs=self.label_index.total_contributors(),
            rmq_cells=rmq_cells,
            bitvector_words=bv_words,
            leaf_table_cells=leaf_cells,
            pieces=len(self.rgd.pieces),
        )

    # ------------------------------------------------------------------

    def save(self, path: str) -> None:
        from .serialize import save_oracle

        save_oracle(self, path)

    @classmethod
    def load(cls, path: str) -> "Oracle":
        from .serialize import load_oracle

        return load_oracle(path)
