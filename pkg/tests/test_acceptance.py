"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
(run with -s to see them). Corpora: 10x10 and 16x16 grids plus a thinned
~200-vertex planar graph, weights uniform in [1, 100], 2/5/10 labels,
eps in {1/10, 1/4, 1/2} plus the 3-stretch configuration.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from plado import (
    MODE_BINARY,
    MODE_BITVECTOR,
    Oracle,
    OracleConfig,
    PlanarGraph,
    RankBitvector,
    SparseTableRMQ,
    THREE_STRETCH_EPS,
    gen_grid,
    gen_planar,
    parse_graph,
    portal_count_limit,
    select_portals,
    serialize_graph,
    sssp,
    verify_distance_property,
)
from plado._kernels import dijkstra
from plado.serialize import oracle_from_bytes, oracle_to_bytes

EPS_SET = (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2))
LABEL_SET = (2, 5, 10)
KINDS = ("grid10", "grid16", "planar200")


def _criterion(num: int, name: str, violations: list) -> None:
    status = "PASS" if not violations else f"FAIL first={violations[0]!r}"
    print(f"\n[acceptance {num:02d}] {name}: {status}")
    assert not violations, f"criterion {num} ({name}): {violations[:5]}"


def log32_ceil(n: int) -> int:
    k = 0
    while 3**k < n * 2**k:
        k += 1
    return k


def _make_graph(kind: str, labels: int) -> PlanarGraph:
    if kind == "grid10":
        return gen_grid(10, 10, (1, 100), labels, 101)
    if kind == "grid16":
        return gen_grid(16, 16, (1, 100), labels, 161)
    if kind == "planar200":
        return gen_planar(200, 0.8, (1, 100), labels, 201)
    raise AssertionError(kind)


@pytest.fixture(scope="module")
def corpus():
    return {(kind, nl): _make_graph(kind, nl) for kind in KINDS for nl in LABEL_SET}


@pytest.fixture(scope="module")
def all_pairs(corpus):
    """All-pairs distance matrix per corpus graph. The label count changes
    the generator's random stream, so each (kind, labels) pair gets its own
    matrix."""
    out = {}
    for key, g in corpus.items():
        csr = g.real_csr()
        mat = np.empty((g.n, g.n), dtype=np.int64)
        for s in range(g.n):
            mat[s] = dijkstra(g.n, csr.indptr, csr.nbr, csr.wt, csr.eid, s)[0]
        out[key] = mat
    return out


@pytest.fixture(scope="module")
def oracles(corpus):
    built = {}
    for (kind, nl), g in corpus.items():
        for eps in EPS_SET + (THREE_STRETCH_EPS,):
            built[(kind, nl, eps)] = Oracle.build(g, OracleConfig(eps=eps))
    return built


def _label_deltas(g: PlanarGraph, dists: np.ndarray) -> dict[int, np.ndarray]:
    return {
        lam: dists[:, np.flatnonzero(g.labels == lam)].min(axis=1)
        for lam in range(g.num_labels)
        if (g.labels == lam).any()
    }


def test_criterion_1_stretch_soundness(corpus, all_pairs, oracles):
    violations = []
    for (kind, nl), g in corpus.items():
        deltas = _label_deltas(g, all_pairs[(kind, nl)])
        for eps in EPS_SET:
            o = oracles[(kind, nl, eps)]
            p, q = eps.numerator, eps.denominator
            for lam, dcol in deltas.items():
                for u in range(g.n):
                    d = o.query(u, lam).d
                    delta = int(dcol[u])
                    if d < delta or q * d > (q + p) * delta:
                        violations.append((kind, nl, str(eps), u, lam, d, delta))
    _criterion(1, "stretch soundness", violations)


def test_criterion_2_three_stretch(corpus, all_pairs, oracles):
    violations = []
    for (kind, nl), g in corpus.items():
        deltas = _label_deltas(g, all_pairs[(kind, nl)])
        o = oracles[(kind, nl, THREE_STRETCH_EPS)]
        for v in range(g.n):
            for pid, pair in o.tables[v].items():
                if len(pair[0]) != 1 or len(pair[1]) != 1:
                    violations.append(("portal count", kind, nl, v, pid))
        for lam, dcol in deltas.items():
            for u in range(g.n):
                d = o.query(u, lam).d
                delta = int(dcol[u])
                if d < delta or d > 3 * delta:
                    violations.append((kind, nl, u, lam, d, delta))
    _criterion(2, "3-stretch mode", violations)


def test_criterion_3_portal_bound(oracles):
    violations = []
    for (kind, nl, eps), o in oracles.items():
        limit = portal_count_limit(eps)
        for v in range(o.graph.n):
            for pid, pair in o.tables[v].items():
                for side in (0, 1):
                    if len(pair[side]) > limit:
                        violations.append((kind, nl, str(eps), v, pid, side,
                                           len(pair[side]), limit))
    _criterion(3, "portal count bound", violations)


def test_criterion_4_distance_property_fuzz(oracles):
    rng = random.Random(4040)
    eps_pool = [Fraction(1, 10), Fraction(1, 7), Fraction(1, 4), Fraction(1, 3),
                Fraction(1, 2), Fraction(2, 3), Fraction(9, 10)]
    o = oracles[("grid16", 5, Fraction(1, 4))]
    tri = o.graph
    seps = [p.separator for p in o.rgd.pieces if p.separator is not None]
    dist_cache = {}
    violations = []
    for i in range(1000):
        v = rng.randrange(tri.n)
        path = rng.choice(seps).paths[rng.randrange(2)]
        eps = rng.choice(eps_pool)
        if v not in dist_cache:
            dist_cache[v] = sssp(tri, v)[0]
        dist_v = dist_cache[v]
        portals = select_portals(dist_v, path, eps)
        if not verify_distance_property(dist_v, path, portals, eps):
            violations.append((i, v, str(eps)))
    _criterion(4, "distance property (1000 fuzzed triples)", violations)


def test_criterion_5_balance_and_depth(oracles):
    violations = []
    for (kind, nl, eps), o in oracles.items():
        bound = log32_ceil(o.graph.n) + 1
        if o.rgd.depth > bound:
            violations.append(("depth", kind, nl, str(eps), o.rgd.depth, bound))
        for piece in o.rgd.pieces:
            limit = -(-2 * len(piece.members) // 3)  # ceil(2/3 |N(p)|)
            for c in piece.children:
                if len(o.rgd.pieces[c].members) > limit:
                    violations.append(("balance", kind, nl, str(eps), piece.id))
    _criterion(5, "separator balance and depth", violations)


def test_criterion_6_mode_equivalence(oracles):
    violations = []
    rng = random.Random(66)
    picks = [("grid16", 5, Fraction(1, 4)), ("planar200", 10, Fraction(1, 2))]
    for key in picks:
        o = oracles[key]
        g = o.graph
        present = [lam for lam in range(g.num_labels) if o.label_counts[lam] > 0]
        for _ in range(5000):
            u = rng.randrange(g.n)
            lam = present[rng.randrange(len(present))]
            a = o.query(u, lam, mode=MODE_BINARY)
            b = o.query(u, lam, mode=MODE_BITVECTOR)
            if (a.d, a.witness) != (b.d, b.witness):
                violations.append((key, u, lam))
    for _ in range(10_000):
        ln = rng.randrange(1, 120)
        bits = rng.sample(range(ln), rng.randrange(0, ln + 1))
        bv = RankBitvector(ln, bits)
        bset = set(bits)
        naive = 0
        for i in range(ln + 1):
            if bv.rank(i) != naive:
                violations.append(("rank", ln, i))
                break
            if i < ln and i in bset:
                naive += 1
    for _ in range(1000):
        k = rng.randrange(1, 80)
        keys = [rng.randrange(-1000, 1000) for _ in range(k)]
        t = SparseTableRMQ(np.asarray(keys, dtype=np.int64))
        for _ in range(100):
            i = rng.randrange(k)
            j = rng.randrange(i, k)
            want = min(range(i, j + 1), key=lambda x: (keys[x], x))
            if t.query(i, j) != want:
                violations.append(("rmq", keys, i, j))
                break
    _criterion(6, "mode equivalence, rank, RMQ", violations)


def test_criterion_7_label_changes():
    g = gen_grid(6, 6, (1, 100), 4, 77)
    o = Oracle.build(g, OracleConfig(eps=Fraction(1, 4)))
    bound = 4 * (o.rgd.depth + 1)
    rng = random.Random(7)
    violations = []
    for round_ in range(100):
        v = rng.randrange(g.n)
        lam2 = rng.randrange(4)
        rep = o.change_label(v, lam2)
        if rep.structures_touched > bound:
            violations.append(("touched", round_, rep.structures_touched, bound))
        g2 = PlanarGraph(g.n, 4, o.graph.labels, g.edges, g.rotations)
        fresh = Oracle.build(g2, OracleConfig(eps=Fraction(1, 4)))
        for u in range(g.n):
            for lam in range(4):
                if o.label_counts[lam] == 0:
                    continue
                a = o.query(u, lam)
                b = fresh.query(u, lam)
                if (a.d, a.witness) != (b.d, b.witness):
                    violations.append(("answer", round_, u, lam, a.d, b.d))
        if violations:
            break
    _criterion(7, "label changes match fresh builds (100 rounds)", violations)


@pytest.fixture(scope="module")
def bench_oracles():
    eps = Fraction(1, 4)
    out = {}
    for side in (8, 16, 32):
        g = gen_grid(side, side, (1, 100), 5, 88)
        out[side * side] = (g, Oracle.build(g, OracleConfig(eps=eps)))
    return out


def test_criterion_8_query_work_bound(bench_oracles):
    eps = Fraction(1, 4)
    per_path = math.ceil(4 / (eps - eps * eps))
    rng = random.Random(8)
    means = {}
    violations = []
    for n, (g, o) in bench_oracles.items():
        bound = 2 * (log32_ceil(n) + 1) * per_path
        present = [lam for lam in range(g.num_labels) if o.label_counts[lam] > 0]
        total = 0
        queries = 400
        for _ in range(queries):
            u = rng.randrange(g.n)
            lam = present[rng.randrange(len(present))]
            got = o.query(u, lam).stats.portals_examined
            total += got
            if got > bound:
                violations.append(("bound", n, u, lam, got, bound))
        means[n] = total / queries
    sizes = sorted(means)
    for a, b in zip(sizes, sizes[1:]):
        if means[a] > 0 and means[b] / means[a] > 2.0:
            violations.append(("growth", a, b, means[a], means[b]))
    print(f"\n    mean portals examined by n: {means}")
    _criterion(8, "query work bound", violations)


def test_criterion_9_space_accounting(bench_oracles):
    ratios = {}
    for n, (g, o) in bench_oracles.items():
        entries = o.stats().label_entries
        ratios[n] = entries / (4 * n * math.log2(n))
    lo, hi = min(ratios.values()), max(ratios.values())
    print(f"\n    entries / ((1/eps) n log2 n) by n: "
          f"{ {k: round(v, 4) for k, v in ratios.items()} }")
    violations = [] if hi <= 3 * lo else [("band", ratios)]
    _criterion(9, "space accounting stays in a factor-3 band", violations)


def test_criterion_10_roundtrips(corpus, oracles):
    violations = []
    for (kind, nl), g in corpus.items():
        text = serialize_graph(g)
        g2 = parse_graph(text)
        if not g2.same_structure(g):
            violations.append(("plgraph", kind, nl))
        if serialize_graph(g2) != text:
            violations.append(("plgraph-bytes", kind, nl))
    for (kind, nl, eps), o in oracles.items():
        blob = oracle_to_bytes(o)
        o2 = oracle_from_bytes(blob)
        if oracle_to_bytes(o2) != blob:
            violations.append(("oracle-bytes", kind, nl, str(eps)))
            continue
        g = o.graph
        present = [lam for lam in range(g.num_labels) if o.label_counts[lam] > 0]
        for u in range(g.n):
            for lam in present:
                a = o.query(u, lam)
                b = o2.query(u, lam)
                if (a.d, a.witness) != (b.d, b.witness):
                    violations.append(("answers", kind, nl, str(eps), u, lam))
    _criterion(10, "format round-trips preserve answers", violations)
