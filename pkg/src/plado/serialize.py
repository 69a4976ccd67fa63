"""Versioned binary oracle files.

Layout (all integers little-endian):

    magic   8 bytes  b"PLADOv1\\n"
    section*         u32 tag, u64 payload length, payload
    footer  4 bytes  CRC32 of everything before it

Sections, in order: 1 header (config, root, levels), 2 graph, 3 tree,
4 decomposition, 5 vertex portal tables, 6 label index. Integer sequences
are stored as u64 count + count i64 values. Derived data (RMQ tables, rank
bitvectors, portal h values) is rebuilt on load; what is stored suffices to
answer queries and apply label changes exactly as the in-memory oracle
would. Writers iterate every map in sorted key order, so a given oracle
always produces identical bytes.
"""
from __future__ import annotations

import struct
import zlib
from fractions import Fraction
from io import BytesIO

import numpy as np

from .decomposition import Piece, Rgd, SeparatorPath, Separator
from .errors import CorruptOracleFile
from .graph import Edge, PlanarGraph
from .index import MODE_BINARY, MODE_BITVECTOR, LabelIndex, LabelPathIndex
from .oracle import Oracle, OracleConfig
from .portals import Portal, VertexPortalTables
from .shortest_paths import Spt

MAGIC = b"PLADOv1\n"

_SEC_HEADER = 1
_SEC_GRAPH = 2
_SEC_SPT = 3
_SEC_RGD = 4
_SEC_TABLES = 5
_SEC_LABELS = 6

_MODE_CODE = {MODE_BINARY: 0, MODE_BITVECTOR: 1}
_MODE_NAME = {v: k for k, v in _MODE_CODE.items()}


class _Writer:
    def __init__(self):
        self.buf = BytesIO()

    def u64(self, x: int) -> None:
        self.buf.write(struct.pack("<Q", x))

    def i64(self, x: int) -> None:
        self.buf.write(struct.pack("<q", x))

    def seq(self, values) -> None:
        arr = np.asarray(list(values), dtype=np.int64)
        self.u64(len(arr))
        self.buf.write(arr.astype("<i8").tobytes())

    def getvalue(self) -> bytes:
        return self.buf.getvalue()


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.off = 0

    def _take(self, k: int) -> bytes:
        if self.off + k > len(self.data):
            raise CorruptOracleFile("truncated section payload")
        out = self.data[self.off : self.off + k]
        self.off += k
        return out

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def i64(self) -> int:
        return struct.unpack("<q", self._take(8))[0]

    def seq(self) -> np.ndarray:
        k = self.u64()
        return np.frombuffer(self._take(8 * k), dtype="<i8").astype(np.int64)

    def done(self) -> bool:
        return self.off == len(self.data)


def _write_header(o: Oracle) -> bytes:
    w = _Writer()
    cfg = o.config
    w.u64(cfg.eps.numerator)
    w.u64(cfg.eps.denominator)
    w.u64(_MODE_CODE[cfg.range_mode])
    w.u64(cfg.leaf_max)
    w.i64(-1 if cfg.root_override is None else cfg.root_override)
    w.u64(o.spt.root)
    w.u64(o.rho)
    return w.getvalue()


def _write_graph(g: PlanarGraph) -> bytes:
    w = _Writer()
    w.u64(g.n)
    w.u64(g.m)
    w.u64(g.num_labels)
    w.seq(g.labels)
    w.seq(e.u for e in g.edges)
    w.seq(e.v for e in g.edges)
    w.seq(1 if e.artificial else 0 for e in g.edges)
    w.seq(-1 if e.artificial else e.length for e in g.edges)
    for v in range(g.n):
        w.seq(g.rotations[v])
    return w.getvalue()


def _read_graph(r: _Reader) -> PlanarGraph:
    n = r.u64()
    m = r.u64()
    nl = r.u64()
    labels = r.seq()
    eu = r.seq()
    ev = r.seq()
    art = r.seq()
    length = r.seq()
    if not (len(labels) == n and len(eu) == len(ev) == len(art) == len(length) == m):
        raise CorruptOracleFile("graph arrays have inconsistent lengths")
    edges = [
        Edge(int(eu[i]), int(ev[i]), None if art[i] else int(length[i]), bool(art[i]))
        for i in range(m)
    ]
    rotations = [[int(x) for x in r.seq()] for _ in range(n)]
    return PlanarGraph(n, nl, labels, edges, rotations)


def _write_spt(spt: Spt) -> bytes:
    w = _Writer()
    w.u64(spt.root)
    w.u64(spt.levels)
    w.seq(spt.parent)
    w.seq(spt.parent_edge)
    w.seq(spt.h)
    w.seq(spt.level)
    return w.getvalue()


def _read_spt(r: _Reader) -> Spt:
    root = r.u64()
    levels = r.u64()
    parent = r.seq().astype(np.int32)
    pedge = r.seq().astype(np.int32)
    h = r.seq()
    level = r.seq().astype(np.int32)
    return Spt(root, parent, pedge, h, level, levels)


def _path_from_nodes(nodes: np.ndarray, spt: Spt) -> SeparatorPath:
    arr = nodes.astype(np.int32)
    eids = [int(spt.parent_edge[arr[i + 1]]) for i in range(len(arr) - 1)]
    return SeparatorPath(
        arr,
        spt.h[arr].astype(np.int64),
        np.asarray(eids, dtype=np.int32),
        {int(v): i for i, v in enumerate(arr)},
    )


def _write_rgd(rgd: Rgd) -> bytes:
    w = _Writer()
    w.u64(len(rgd.pieces))
    for p in rgd.pieces:
        w.i64(-1 if p.parent is None else p.parent)
        w.u64(p.depth)
        w.seq(p.members)
        w.seq(p.children)
        if p.separator is None:
            w.u64(0)
        else:
            w.u64(1)
            w.u64(p.separator.nontree_edge)
            w.seq(p.separator.path_a.nodes)
            w.seq(p.separator.path_b.nodes)
        if p.leaf_table is None:
            w.u64(0)
        else:
            w.u64(1)
            items = sorted(p.leaf_table.items())
            w.u64(len(items))
            for (u, lam), (d, wit) in items:
                w.u64(u)
                w.u64(lam)
                w.u64(d)
                w.u64(wit)
    w.seq(rgd.deepest_piece)
    return w.getvalue()


def _read_rgd(r: _Reader, spt: Spt) -> Rgd:
    count = r.u64()
    pieces: list[Piece] = []
    for pid in range(count):
        parent = r.i64()
        depth = r.u64()
        members = r.seq().astype(np.int32)
        children = tuple(int(c) for c in r.seq())
        sep = None
        if r.u64():
            edge = r.u64()
            pa = _path_from_nodes(r.seq(), spt)
            pb = _path_from_nodes(r.seq(), spt)
            sep = Separator(
                edge, pa, pb, frozenset(pa.position) | frozenset(pb.position)
            )
        leaf_table = None
        if r.u64():
            leaf_table = {}
            for _ in range(r.u64()):
                u = r.u64()
                lam = r.u64()
                d = r.u64()
                wit = r.u64()
                leaf_table[(u, lam)] = (d, wit)
        pieces.append(
            Piece(pid, None if parent < 0 else parent, depth, members, sep,
                  children, leaf_table)
        )
    deepest = r.seq().astype(np.int32)
    return Rgd(pieces, 0, deepest)


def _write_tables(tables: VertexPortalTables, n: int) -> bytes:
    w = _Writer()
    w.u64(n)
    for v in range(n):
        entry = tables[v]
        w.u64(len(entry))
        for pid in sorted(entry):
            w.u64(pid)
            for side in (0, 1):
                portals = entry[pid][side]
                w.u64(len(portals))
                for pt in portals:
                    w.u64(pt.pos)
                    w.u64(pt.d)
    return w.getvalue()


def _read_tables(r: _Reader, rgd: Rgd) -> VertexPortalTables:
    n = r.u64()
    tables = []
    for _ in range(n):
        entry = {}
        for _ in range(r.u64()):
            pid = r.u64()
            sep = rgd.pieces[pid].separator
            pair = []
            for side in (0, 1):
                path = sep.paths[side]
                portals = []
                for _ in range(r.u64()):
                    pos = r.u64()
                    d = r.u64()
                    portals.append(
                        Portal(pos, int(path.nodes[pos]), d, int(path.h[pos]))
                    )
                pair.append(portals)
            entry[pid] = (pair[0], pair[1])
        tables.append(entry)
    return VertexPortalTables(tables)


def _write_labels(index: LabelIndex) -> bytes:
    w = _Writer()
    w.u64(len(index.per_label))
    for per_piece in index.per_label:
        w.u64(len(per_piece))
        for pid in sorted(per_piece):
            w.u64(pid)
            for side in (0, 1):
                lpi = per_piece[pid][side]
                if lpi is None:
                    w.u64(0)
                    continue
                w.u64(1)
                w.u64(len(lpi.contributors))
                for pos in sorted(lpi.contributors):
                    w.u64(pos)
                    contrib = lpi.contributors[pos]
                    w.u64(len(contrib))
                    for d, v in contrib:
                        w.u64(d)
                        w.u64(v)
    return w.getvalue()


def _read_labels(r: _Reader, rgd: Rgd) -> LabelIndex:
    num_labels = r.u64()
    index = LabelIndex(num_labels)
    for lam in range(num_labels):
        for _ in range(r.u64()):
            pid = r.u64()
            sep = rgd.pieces[pid].separator
            pair: list[LabelPathIndex | None] = [None, None]
            for side in (0, 1):
                if not r.u64():
                    continue
                contrib = {}
                for _ in range(r.u64()):
                    pos = r.u64()
                    k = r.u64()
                    contrib[pos] = [(r.u64(), r.u64()) for _ in range(k)]
                pair[side] = LabelPathIndex(pid, side, sep.paths[side], contrib)
            index.per_label[lam][pid] = pair
    return index


def oracle_to_bytes(o: Oracle) -> bytes:
    out = BytesIO()
    out.write(MAGIC)
    sections = [
        (_SEC_HEADER, _write_header(o)),
        (_SEC_GRAPH, _write_graph(o.graph)),
        (_SEC_SPT, _write_spt(o.spt)),
        (_SEC_RGD, _write_rgd(o.rgd)),
        (_SEC_TABLES, _write_tables(o.tables, o.graph.n)),
        (_SEC_LABELS, _write_labels(o.label_index)),
    ]
    for tag, payload in sections:
        out.write(struct.pack("<IQ", tag, len(payload)))
        out.write(payload)
    body = out.getvalue()
    return body + struct.pack("<I", zlib.crc32(body))


def oracle_from_bytes(data: bytes) -> Oracle:
    if len(data) < len(MAGIC) + 4:
        raise CorruptOracleFile("file too short")
    body, crc = data[:-4], struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(body) != crc:
        raise CorruptOracleFile("checksum mismatch")
    if not body.startswith(MAGIC):
        raise CorruptOracleFile("bad magic")
    off = len(MAGIC)
    payloads: dict[int, bytes] = {}
    while off < len(body):
        if off + 12 > len(body):
            raise CorruptOracleFile("truncated section header")
        tag, size = struct.unpack_from("<IQ", body, off)
        off += 12
        if off + size > len(body):
            raise CorruptOracleFile("truncated section payload")
        payloads[tag] = body[off : off + size]
        off += size
    try:
        hdr = _Reader(payloads[_SEC_HEADER])
        eps = Fraction(hdr.u64(), hdr.u64())
        mode = _MODE_NAME[hdr.u64()]
        leaf_max = hdr.u64()
        root_override = hdr.i64()
        hdr.u64()  # root, restated by the tree section
        hdr.u64()  # levels, restated by the tree section
        config = OracleConfig(
            eps, mode, leaf_max, None if root_override < 0 else root_override
        )
        graph = _read_graph(_Reader(payloads[_SEC_GRAPH]))
        spt = _read_spt(_Reader(payloads[_SEC_SPT]))
        rgd = _read_rgd(_Reader(payloads[_SEC_RGD]), spt)
        tables = _read_tables(_Reader(payloads[_SEC_TABLES]), rgd)
        label_index = _read_labels(_Reader(payloads[_SEC_LABELS]), rgd)
    except KeyError as exc:
        raise CorruptOracleFile(f"missing section {exc}") from None
    except (struct.error, IndexError) as exc:
        raise CorruptOracleFile(str(exc)) from None
    return Oracle(graph, spt, rgd, tables, label_index, config)


def save_oracle(o: Oracle, path: str) -> None:
    data = oracle_to_bytes(o)
    with open(path, "wb") as fh:
        fh.write(data)


def load_oracle(path: str) -> Oracle:
    with open(path, "rb") as fh:
        return oracle_from_bytes(fh.read())
