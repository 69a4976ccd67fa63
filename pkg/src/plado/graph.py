"""Planar graph model: rotation-system embedding, PLGRAPH text format,
triangulation, and deterministic generators.

A graph is undirected, connected, and carries one label per vertex. The
embedding is combinatorial: for every vertex, the counterclockwise cyclic
order of incident edge ids. Artificial edges are added by `triangulate` to
make every face a triangle; they have no length (serialized as INF) and are
excluded from every distance computation.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    Disconnected,
    DuplicateEdge,
    EmbeddingInconsistent,
    EulerViolation,
    MalformedLine,
)

MAX_EDGE_LENGTH = 2**31
_INF_TOKEN = "INF"


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    length: int | None  # None for artificial (triangulation) edges
    artificial: bool = False

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class Csr:
    """Adjacency over real edges only, in compressed sparse row form."""

    indptr: np.ndarray  # int64, length n+1
    nbr: np.ndarray  # int32, neighbor vertex per slot
    wt: np.ndarray  # int64, edge length per slot
    eid: np.ndarray  # int32, edge id per slot


@dataclass(frozen=True)
class FaceData:
    """Faces of the embedding, in dart (directed half-edge) form.

    Dart 2*e runs u -> v for edge e = (u, v); dart 2*e+1 runs v -> u.
    `face_darts[face_indptr[f]:face_indptr[f+1]]` lists face f's darts in
    walk order.
    """

    nfaces: int
    face_of_dart: np.ndarray  # int32, length 2m
    face_indptr: np.ndarray  # int64, length nfaces+1
    face_darts: np.ndarray  # int32, length 2m


class PlanarGraph:
    """Embedded planar graph with labeled vertices and weighted edges."""

    def __init__(
        self,
        n: int,
        num_labels: int,
        labels: list[int] | np.ndarray,
        edges: list[Edge],
        rotations: list[list[int]],
        validate: bool = True,
    ):
        self.n = n
        self.num_labels = num_labels
        self.labels = np.array(labels, dtype=np.int32)  # copy: relabels stay local
        self.edges = list(edges)
        self.rotations = [list(r) for r in rotations]
        self._csr: Csr | None = None
        self._faces: FaceData | None = None
        if validate:
            self.validate()

    @property
    def m(self) -> int:
        return len(self.edges)

    def real_edge_count(self) -> int:
        return sum(1 for e in self.edges if not e.artificial)

    # ------------------------------------------------------------------
    # validation
    # ------------------------------------------------------------------

    def validate(self) -> None:
        n, m = self.n, self.m
        if n < 1:
            raise MalformedLine("graph needs at least one vertex")
        if len(self.labels) != n:
            raise MalformedLine("label array length != n")
        if np.any(self.labels < 0) or np.any(self.labels >= self.num_labels):
            raise MalformedLine("vertex label out of range")
        seen_real: set[tuple[int, int]] = set()
        for i, e in enumerate(self.edges):
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise MalformedLine(f"edge {i} endpoint out of range")
            if e.u == e.v:
                raise MalformedLine(f"edge {i} is a self-loop")
            if e.artificial:
                if e.length is not None:
                    raise MalformedLine(f"artificial edge {i} has a length")
            else:
                if e.length is None or not (0 <= e.length <= MAX_EDGE_LENGTH):
                    raise MalformedLine(f"edge {i} length out of range")
                pair = (min(e.u, e.v), max(e.u, e.v))
                if pair in seen_real:
                    raise DuplicateEdge(f"real edges duplicate pair {pair}")
                seen_real.add(pair)
        if n >= 3 and m > 3 * n - 6:
            raise EulerViolation(f"m={m} exceeds 3n-6={3 * n - 6}")
        self._check_rotations()
        self._check_connected()
        validate_faces(self)

    def _check_rotations(self) -> None:
        if len(self.rotations) != self.n:
            raise EmbeddingInconsistent("rotation count != n")
        incident: list[list[int]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            incident[e.u].append(i)
            incident[e.v].append(i)
        for v in range(self.n):
            rot = self.rotations[v]
            if sorted(rot) != sorted(incident[v]):
                raise EmbeddingInconsistent(
                    f"rotation of vertex {v} does not list incident edges exactly once"
                )

    def _check_connected(self) -> None:
        if self.n == 1:
            return
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for e in self.edges:
            if not e.artificial:
                adj[e.u].append(e.v)
                adj[e.v].append(e.u)
        seen = bytearray(self.n)
        seen[0] = 1
        queue = deque([0])
        count = 1
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = 1
                    count += 1
                    queue.append(y)
        if count != self.n:
            raise Disconnected(f"only {count} of {self.n} vertices reachable")

    # ------------------------------------------------------------------
    # derived structures (cached)
    # ------------------------------------------------------------------

    def real_csr(self) -> Csr:
        if self._csr is None:
            n = self.n
            deg = np.zeros(n + 1, dtype=np.int64)
            real = [(i, e) for i, e in enumerate(self.edges) if not e.artificial]
            for _, e in real:
                deg[e.u + 1] += 1
                deg[e.v + 1] += 1
            indptr = np.cumsum(deg)
            nbr = np.zeros(indptr[-1], dtype=np.int32)
            wt = np.zeros(indptr[-1], dtype=np.int64)
            eid = np.zeros(indptr[-1], dtype=np.int32)
            fill = indptr[:-1].copy()
            for i, e in real:
                for a, b in ((e.u, e.v), (e.v, e.u)):
                    k = fill[a]
                    nbr[k] = b
                    wt[k] = e.length
                    eid[k] = i
                    fill[a] += 1
            self._csr = Csr(indptr, nbr, wt, eid)
        return self._csr

    def face_data(self) -> FaceData:
        if self._faces is None:
            self._faces = _walk_faces(self)
        return self._faces

    def dart_head(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.v if (d & 1) == 0 else e.u

    def dart_tail(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.u if (d & 1) == 0 else e.v

    # ------------------------------------------------------------------

    def same_structure(self, other: "PlanarGraph") -> bool:
        """Structural identity: vertex count, labels, edges, and rotations."""
        return (
            self.n == other.n
            and self.num_labels == other.num_labels
            and np.array_equal(self.labels, other.labels)
            and self.edges == other.edges
            and self.rotations == other.rotations
        )


def _walk_faces(g: PlanarGraph) -> FaceData:
    m = g.m
    if m == 0:
        return FaceData(
            1,
            np.zeros(0, dtype=np.int32),
            np.array([0, 0], dtype=np.int64),
            np.zeros(0, dtype=np.int32),
        )
    # Build the successor permutation first; rotation index lookups are the
    # slow part, so resolve each (vertex, edge) position once.
    pos_u = np.full(m, -1, dtype=np.int64)
    pos_v = np.full(m, -1, dtype=np.int64)
    for v in range(g.n):
        for i, e in enumerate(g.rotations[v]):
            if g.edges[e].u == v:
                pos_u[e] = i
            else:
                pos_v[e] = i
    nxt = np.empty(2 * m, dtype=np.int32)
    for d in range(2 * m):
        e = d >> 1
        h = g.dart_head(d)
        rot = g.rotations[h]
        p = pos_u[e] if g.edges[e].u == h else pos_v[e]
        ne = rot[(p + 1) % len(rot)]
        nxt[d] = 2 * ne if g.edges[ne].u == h else 2 * ne + 1
    face_of = np.full(2 * m, -1, dtype=np.int32)
    indptr = [0]
    darts: list[int] = []
    nf = 0
    for d0 in range(2 * m):
        if face_of[d0] >= 0:
            continue
        d = d0
        while face_of[d] < 0:
            face_of[d] = nf
            darts.append(d)
            d = nxt[d]
        if d != d0:
            raise EmbeddingInconsistent("face walk did not close on its start dart")
        indptr.append(len(darts))
        nf += 1
    return FaceData(
        nf,
        face_of,
        np.asarray(indptr, dtype=np.int64),
        np.asarray(darts, dtype=np.int32),
    )


def validate_faces(g: PlanarGraph) -> int:
    """Walk every face once and check Euler's formula; returns the face count."""
    fd = g.face_data()
    f = fd.nfaces
    if g.n - g.m + f != 2:
        raise EulerViolation(f"n - m + f = {g.n} - {g.m} + {f} != 2")
    return f


# ----------------------------------------------------------------------
# PLGRAPH v1 text format
# ----------------------------------------------------------------------


def parse_graph(data: bytes | str) -> PlanarGraph:
    """Parse the PLGRAPH v1 text format (see serialize_graph for the layout)."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    lines: list[str] = []
    for raw in data.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    it = iter(lines)

    def next_line(what: str) -> str:
        try:
            return next(it)
        except StopIteration:
            raise MalformedLine(f"unexpected end of input, expected {what}") from None

    if next_line("header").split() != ["PLGRAPH", "1"]:
        raise MalformedLine("first line must be 'PLGRAPH 1'")
    counts = next_line("counts").split()
    if len(counts) != 3:
        raise MalformedLine("counts line must be '<n> <m> <L>'")
    try:
        n, m, nl = (int(t) for t in counts)
    except ValueError:
        raise MalformedLine("counts are not integers") from None
    if n < 1 or m < 0 or nl < 1:
        raise MalformedLine("counts out of range")

    labels = [-1] * n
    for _ in range(n):
        tok = next_line("V line").split()
        if len(tok) != 3 or tok[0] != "V":
            raise MalformedLine(f"bad vertex line: {' '.join(tok)}")
        vid, lab = int(tok[1]), int(tok[2])
        if not 0 <= vid < n or labels[vid] != -1:
            raise MalformedLine(f"bad or repeated vertex id {vid}")
        labels[vid] = lab

    edges: list[Edge | None] = [None] * m
    for _ in range(m):
        tok = next_line("E line").split()
        if len(tok) != 5 or tok[0] != "E":
            raise MalformedLine(f"bad edge line: {' '.join(tok)}")
        eid, u, v = int(tok[1]), int(tok[2]), int(tok[3])
        if not 0 <= eid < m or edges[eid] is not None:
            raise MalformedLine(f"bad or repeated edge id {eid}")
        if u == v:
            raise MalformedLine(f"edge {eid} is a self-loop")
        u, v = (u, v) if u < v else (v, u)
        if tok[4] == _INF_TOKEN:
            edges[eid] = Edge(u, v, None, artificial=True)
        else:
            edges[eid] = Edge(u, v, int(tok[4]), artificial=False)

    rotations: list[list[int] | None] = [None] * n
    for _ in range(n):
        tok = next_line("R line").split()
        if len(tok) < 2 or tok[0] != "R":
            raise MalformedLine(f"bad rotation line: {' '.join(tok)}")
        vid = int(tok[1])
        if not 0 <= vid < n or rotations[vid] is not None:
            raise MalformedLine(f"bad or repeated rotation id {vid}")
        rotations[vid] = [int(t) for t in tok[2:]]
    try:
        next(it)
        raise MalformedLine("trailing content after rotation lines")
    except StopIteration:
        pass

    return PlanarGraph(n, nl, labels, edges, rotations)  # type: ignore[arg-type]


def serialize_graph(g: PlanarGraph) -> str:
    """Emit the PLGRAPH v1 text format:

        PLGRAPH 1
        <n> <m> <L>
        V <vertex-id> <label-id>          (n lines)
        E <edge-id> <u> <v> <length|INF>  (m lines)
        R <vertex-id> <edge-id>*          (n lines, counterclockwise order)
    """
    out = ["PLGRAPH 1", f"{g.n} {g.m} {g.num_labels}"]
    for v in range(g.n):
        out.append(f"V {v} {g.labels[v]}")
    for i, e in enumerate(g.edges):
        length = _INF_TOKEN if e.artificial else str(e.length)
        out.append(f"E {i} {e.u} {e.v} {length}")
    for v in range(g.n):
        out.append("R " + " ".join(str(x) for x in [v] + g.rotations[v]))
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------
# triangulation
# ----------------------------------------------------------------------


def triangulate(g: PlanarGraph) -> PlanarGraph:
    """Return a copy of g where every face is a triangle.

    Added chords are artificial (no length). Existing edges, lengths, labels
    and their rotation order are untouched. Graphs with fewer than 3 vertices
    cannot be triangulated and are returned as a plain copy.
    """
    edges = list(g.edges)
    rotations = [list(r) for r in g.rotations]
    if g.n < 3:
        return PlanarGraph(g.n, g.num_labels, g.labels, edges, rotations)

    real_pairs: set[tuple[int, int]] = set()
    art_pairs: set[tuple[int, int]] = set()
    for e in edges:
        pair = (min(e.u, e.v), max(e.u, e.v))
        (art_pairs if e.artificial else real_pairs).add(pair)

    fd = g.face_data()
    faces = [
        list(fd.face_darts[fd.face_indptr[f] : fd.face_indptr[f + 1]])
        for f in range(fd.nfaces)
    ]

    def dart_tail(d: int) -> int:
        e = edges[d >> 1]
        return e.u if (d & 1) == 0 else e.v

    def dart_head(d: int) -> int:
        e = edges[d >> 1]
        return e.v if (d & 1) == 0 else e.u

    for walk in faces:
        while len(walk) > 3:
            # Corner i sits between walk[i] and walk[i+1]; cutting it adds the
            # chord (tail of walk[i], head of walk[i+1]). Prefer fresh chords,
            # then chords parallel only to artificial edges (edge identity is
            # by id, so artificial parallels are tolerated), then any chord.
            k = len(walk)
            choice = -1
            choice_tier = 3
            for i in range(k):
                d1 = walk[i]
                d2 = walk[(i + 1) % k]
                a, c = dart_tail(d1), dart_head(d2)
                if a == c:
                    continue
                pair = (min(a, c), max(a, c))
                if pair in real_pairs:
                    tier = 2
                elif pair in art_pairs:
                    tier = 1
                else:
                    tier = 0
                if tier < choice_tier:
                    choice, choice_tier = i, tier
                    if tier == 0:
                        break
            if choice < 0:
                raise EmbeddingInconsistent("face has no cuttable corner")
            i = choice
            d1 = walk[i]
            d2 = walk[(i + 1) % k]
            a, c = dart_tail(d1), dart_head(d2)
            q = len(edges)
            edges.append(Edge(min(a, c), max(a, c), None, artificial=True))
            art_pairs.add((min(a, c), max(a, c)))
            # Splice the chord into the rotations so the cut-off triangle and
            # the shrunken face both remain closed walks: after edge(d2) at c,
            # before edge(d1) at a.
            rc = rotations[c]
            rc.insert(rc.index(d2 >> 1) + 1, q)
            ra = rotations[a]
            ra.insert(ra.index(d1 >> 1), q)
            chord_dart = 2 * q if edges[q].u == a else 2 * q + 1
            j = (i + 1) % k
            if j > i:
                walk[i : j + 1] = [chord_dart]
            else:  # corner wraps around the list end
                del walk[i:]
                walk[0] = chord_dart
    return PlanarGraph(g.n, g.num_labels, g.labels, edges, rotations)


# ----------------------------------------------------------------------
# generators
# ----------------------------------------------------------------------


def gen_grid(
    rows: int,
    cols: int,
    weight_range: tuple[int, int],
    num_labels: int,
    seed: int,
) -> PlanarGraph:
    """rows x cols grid with uniform random integer lengths and labels."""
    g, _ = _gen_grid_rng(rows, cols, weight_range, num_labels, seed)
    return g


def _gen_grid_rng(rows, cols, weight_range, num_labels, seed):
    if rows < 2 or cols < 2:
        raise ValueError("grid needs rows, cols >= 2")
    lo, hi = weight_range
    if not (1 <= lo <= hi <= MAX_EDGE_LENGTH):
        raise ValueError("weight range must satisfy 1 <= lo <= hi <= 2^31")
    n = rows * cols
    rng = random.Random(seed)

    def vid(r: int, c: int) -> int:
        return r * cols + c

    pairs: list[tuple[int, int]] = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                pairs.append((vid(r, c), vid(r, c + 1)))
            if r + 1 < rows:
                pairs.append((vid(r, c), vid(r + 1, c)))
    pairs.sort()
    eid_of = {p: i for i, p in enumerate(pairs)}
    edges = [Edge(u, v, rng.randint(lo, hi)) for u, v in pairs]
    labels = [rng.randrange(num_labels) for _ in range(n)]

    rotations: list[list[int]] = []
    for r in range(rows):
        for c in range(cols):
            rot = []
            # counterclockwise with x = column, y = -row: east, north, west, south
            if c + 1 < cols:
                rot.append(eid_of[(vid(r, c), vid(r, c + 1))])
            if r > 0:
                rot.append(eid_of[(vid(r - 1, c), vid(r, c))])
            if c > 0:
                rot.append(eid_of[(vid(r, c - 1), vid(r, c))])
            if r + 1 < rows:
                rot.append(eid_of[(vid(r, c), vid(r + 1, c))])
            rotations.append(rot)
    return PlanarGraph(n, num_labels, labels, edges, rotations), rng


def gen_planar(
    n: int,
    density: float,
    weight_range: tuple[int, int],
    num_labels: int,
    seed: int,
) -> PlanarGraph:
    """Connected planar graph on >= n vertices: a grid thinned by random edge
    deletion down to roughly `density` of its edges."""
    if not 0 < density <= 1:
        raise ValueError("density must be in (0, 1]")
    rows = 1
    while rows * rows < n:
        rows += 1
    cols = (n + rows - 1) // rows
    if rows < 2:
        rows = 2
    if cols < 2:
        cols = 2
    g, rng = _gen_grid_rng(rows, cols, weight_range, num_labels, seed)
    m = g.m
    target = int(round((1 - density) * m))
    if target == 0:
        return g

    adj: list[set[int]] = [set() for _ in range(g.n)]
    for e in g.edges:
        adj[e.u].add(e.v)
        adj[e.v].add(e.u)

    def connected_without(u: int, v: int) -> bool:
        # u-v edge already removed from adj; check v reachable from u
        seen = {u}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y == v:
                    return True
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return False

    order = list(range(m))
    rng.shuffle(order)
    removed: set[int] = set()
    for eid in order:
        if len(removed) == target:
            break
        e = g.edges[eid]
        adj[e.u].discard(e.v)
        adj[e.v].discard(e.u)
        if connected_without(e.u, e.v):
            removed.add(eid)
        else:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)

    keep = [i for i in range(m) if i not in removed]
    remap = {old: new for new, old in enumerate(keep)}
    edges = [g.edges[i] for i in keep]
    rotations = [[remap[e] for e in rot if e not in removed] for rot in g.rotations]
    return PlanarGraph(g.n, g.num_labels, g.labels, edges, rotations)
