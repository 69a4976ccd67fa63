"""Per-label portal indexes with range-minimum and rank support.

For each (label, piece, path) the portals contributed by that label's
vertices are deduplicated per path position, keeping the minimum distance
(full contributor lists are retained so label changes can delete one
vertex's contribution exactly). Entries are sorted by root distance h and
carry two RMQ structures over the keys d_min + h and d_min - h, which answer
the query's farther-than / closer-than minimizations in O(1). A rank
bitvector over path positions locates the split index without binary search.
"""
from __future__ import annotations

from bisect import insort
from dataclasses import dataclass

import numpy as np

from .decomposition import SeparatorPath
from .errors import BadIndex, BadRange

MODE_BINARY = "binary"
MODE_BITVECTOR = "bitvector"


class SparseTableRMQ:
    """Static argmin-in-range in O(1) after O(k log k) preprocessing; ties go
    to the smallest index."""

    def __init__(self, keys: np.ndarray):
        self.keys = np.asarray(keys, dtype=np.int64)
        k = len(self.keys)
        table = [np.arange(k, dtype=np.int32)]
        span = 1
        while 2 * span <= k:
            prev = table[-1]
            left = prev[: k - 2 * span + 1]
            right = prev[span : k - span + 1]
            take_left = self.keys[left] <= self.keys[right]
            table.append(np.where(take_left, left, right))
            span *= 2
        self.table = table

    def __len__(self) -> int:
        return len(self.keys)

    def query(self, i: int, j: int) -> int:
        """Index of the minimum key in the inclusive range [i, j]."""
        if not (0 <= i <= j < len(self.keys)):
            raise BadRange(f"bad range [{i}, {j}] for length {len(self.keys)}")
        lvl = (j - i + 1).bit_length() - 1
        a = int(self.table[lvl][i])
        b = int(self.table[lvl][j - (1 << lvl) + 1])
        if self.keys[b] < self.keys[a] or (self.keys[b] == self.keys[a] and b < a):
            return b
        return a

    def cells(self) -> int:
        return sum(len(t) for t in self.table)


def rmq_query(t: SparseTableRMQ, i: int, j: int) -> int:
    return t.query(i, j)


class RankBitvector:
    """Bit array with O(1) prefix popcount via per-word running totals."""

    WORD = 64

    def __init__(self, length: int, set_bits=()):
        self.length = length
        self.words = np.zeros((length + self.WORD - 1) // self.WORD + 1, dtype=np.uint64)
        for b in set_bits:
            self.set(b)
        self._rebuild()

    def _rebuild(self) -> None:
        counts = [int(w).bit_count() for w in self.words]
        self.prefix = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)

    def set(self, i: int) -> None:
        self.words[i // self.WORD] |= np.uint64(1 << (i % self.WORD))

    def get(self, i: int) -> bool:
        return bool((int(self.words[i // self.WORD]) >> (i % self.WORD)) & 1)

    def rank(self, i: int) -> int:
        """Number of set bits strictly before position i."""
        if not (0 <= i <= self.length):
            raise BadIndex(f"rank index {i} out of [0, {self.length}]")
        w, r = divmod(i, self.WORD)
        partial = int(self.words[w]) & ((1 << r) - 1)
        return int(self.prefix[w]) + partial.bit_count()

    def word_count(self) -> int:
        return len(self.words)


def bv_rank(bv: RankBitvector, i: int) -> int:
    return bv.rank(i)


@dataclass
class LabelPathEntry:
    pos: int
    node: int
    h: int
    d_min: int
    witness: int
    contributors: list[tuple[int, int]]  # (distance, vertex), sorted


class LabelPathIndex:
    """Deduplicated label portals on one separator path, h-ascending."""

    def __init__(self, piece_id: int, side: int, path: SeparatorPath,
                 contributors: dict[int, list[tuple[int, int]]]):
        self.piece_id = piece_id
        self.side = side
        self.path = path
        self.contributors = contributors
        self._derive()

    def _derive(self) -> None:
        entries = []
        for pos in sorted(self.contributors):
            contrib = self.contributors[pos]
            d_min, witness = contrib[0]
            entries.append(
                LabelPathEntry(
                    pos,
                    int(self.path.nodes[pos]),
                    int(self.path.h[pos]),
                    d_min,
                    witness,
                    contrib,
                )
            )
        self.entries = entries
        self.h = np.asarray([e.h for e in entries], dtype=np.int64)
        d_min = np.asarray([e.d_min for e in entries], dtype=np.int64)
        self.rmq_plus = SparseTableRMQ(d_min + self.h)
        self.rmq_minus = SparseTableRMQ(d_min - self.h)
        self.omega = RankBitvector(len(self.path), (e.pos for e in entries))

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, pos: int, d: int, v: int) -> None:
        insort(self.contributors.setdefault(pos, []), (d, v))
        self._derive()

    def remove(self, pos: int, d: int, v: int) -> bool:
        """Drop one contribution; returns True if the index became empty."""
        contrib = self.contributors[pos]
        contrib.remove((d, v))
        if not contrib:
            del self.contributors[pos]
        self._derive()
        return not self.contributors


class LabelIndex:
    """Per label: hash map from piece id to the two path indexes."""

    def __init__(self, num_labels: int):
        self.per_label: list[dict[int, list[LabelPathIndex | None]]] = [
            {} for _ in range(num_labels)
        ]

    def get(self, lam: int, piece_id: int) -> list[LabelPathIndex | None] | None:
        return self.per_label[lam].get(piece_id)

    def total_entries(self) -> int:
        return sum(
            len(lpi)
            for label in self.per_label
            for pair in label.values()
            for lpi in pair
            if lpi is not None
        )

    def total_contributors(self) -> int:
        return sum(
            len(c)
            for label in self.per_label
            for pair in label.values()
            for lpi in pair
            if lpi is not None
            for c in lpi.contributors.values()
        )


def build_label_index(tables, labels, rgd) -> LabelIndex:
    """Group every vertex's portals by (its label, piece, path), dedup per
    path position keeping the minimum distance (smallest vertex id breaks
    ties), and build the RMQ and rank structures."""
    num_labels = int(labels.max()) + 1 if len(labels) else 1
    buckets: dict[tuple[int, int, int], dict[int, list[tuple[int, int]]]] = {}
    for v in range(len(labels)):
        lam = int(labels[v])
        for piece_id, pair in tables[v].items():
            for side in (0, 1):
                for portal in pair[side]:
                    key = (lam, piece_id, side)
                    buckets.setdefault(key, {}).setdefault(portal.pos, []).append(
                        (portal.d, v)
                    )
    index = LabelIndex(num_labels)
    for (lam, piece_id, side), contrib in buckets.items():
        for lst in contrib.values():
            lst.sort()
        sep = rgd.pieces[piece_id].separator
        path = sep.paths[side]
        pair = index.per_label[lam].setdefault(piece_id, [None, None])
        pair[side] = LabelPathIndex(piece_id, side, path, contrib)
    return index


def locate_split(
    lpi: LabelPathIndex, h_u: int, pos_u: int, mode: str = MODE_BINARY
) -> tuple[int, int, int]:
    """Split of the entry list around a query portal: returns (lo, hi, steps)
    with entries[lo:] the ones at h >= h_u and entries[:hi] the ones at
    h <= h_u. Entries with h == h_u land in both ranges.

    Binary mode bisects the h array (steps counts its iterations); bitvector
    mode ranks the portal's path position and adjusts over the (rare) run of
    equal-h neighbors. Both modes return identical (lo, hi).
    """
    n = len(lpi.entries)
    if n == 0:
        return 0, 0, 0
    h = lpi.h
    if mode == MODE_BINARY:
        lo_l, hi_l = 0, n
        steps = 0
        while lo_l < hi_l:
            mid = (lo_l + hi_l) // 2
            steps += 1
            if h[mid] < h_u:
                lo_l = mid + 1
            else:
                hi_l = mid
        lo = lo_l
        lo_r, hi_r = lo, n
        while lo_r < hi_r:
            mid = (lo_r + hi_r) // 2
            steps += 1
            if h[mid] <= h_u:
                lo_r = mid + 1
            else:
                hi_r = mid
        return lo, lo_r, steps
    if mode == MODE_BITVECTOR:
        k = lpi.omega.rank(pos_u)
        lo = k
        while lo > 0 and h[lo - 1] == h_u:
            lo -= 1
        hi = k
        while hi < n and h[hi] == h_u:
            hi += 1
        return lo, hi, 0
    raise ValueError(f"unknown range mode {mode!r}")
