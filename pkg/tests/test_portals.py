from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from plado import (
    DistanceMap,
    Edge,
    PlanarGraph,
    THREE_STRETCH_EPS,
    build_rgd,
    build_vertex_tables,
    find_center,
    gen_grid,
    portal_count_limit,
    project,
    select_portals,
    sssp,
    triangulate,
    verify_distance_property,
)
from plado.backends import HAS_NUMBA
from plado.decomposition import SeparatorPath

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def make_path(nodes, h):
    nodes = np.asarray(nodes, dtype=np.int32)
    return SeparatorPath(
        nodes,
        np.asarray(h, dtype=np.int64),
        np.zeros(len(nodes) - 1, dtype=np.int32),
        {int(v): i for i, v in enumerate(nodes)},
    )


def make_dist(n, values):
    dist = np.full(n, 10**9, dtype=np.int64)
    for v, d in values.items():
        dist[v] = d
    return DistanceMap(0, dist)


# Hand instance used below: path nodes 10..15, h = [0,1,3,6,10,11],
# d = [7,6,5,3,1,2]. With eps = 1/4 the projection is position 4 and the
# root-ward greedy picks position 3 then 1; the away phase finds nothing.
HAND_PATH = make_path([10, 11, 12, 13, 14, 15], [0, 1, 3, 6, 10, 11])
HAND_DIST = make_dist(16, {10: 7, 11: 6, 12: 5, 13: 3, 14: 1, 15: 2})


def test_project_vertex_on_path():
    g = gen_grid(3, 3, (1, 10), 2, 0)
    r, _ = find_center(g)
    _, spt = sssp(g, r)
    tri = triangulate(g)
    rgd = build_rgd(tri, spt, 1)
    sep = next(p.separator for p in rgd.pieces if p.separator is not None)
    v = int(sep.path_a.nodes[-1])
    dm, _ = sssp(tri, v)
    z0 = project(dm, sep.path_a)
    assert z0.node == v and z0.d == 0


def test_project_unit_path_neighbor():
    # r - a - b path, v attached only to b
    g = PlanarGraph(
        4, 1, [0, 0, 0, 0],
        [Edge(0, 1, 1), Edge(1, 2, 1), Edge(2, 3, 1)],
        [[0], [0, 1], [1, 2], [2]],
    )
    _, spt = sssp(g, 0)
    path = make_path([0, 1, 2], [0, 1, 2])
    dm, _ = sssp(g, 3)
    assert project(dm, path).node == 2


def test_project_matches_linear_scan():
    g = gen_grid(5, 5, (1, 40), 2, 19)
    _, spt = sssp(g, find_center(g)[0])
    tri = triangulate(g)
    rgd = build_rgd(tri, spt, 1)
    rng = random.Random(1)
    seps = [p.separator for p in rgd.pieces if p.separator is not None]
    for _ in range(20):
        sep = rng.choice(seps)
        path = sep.paths[rng.randrange(2)]
        v = rng.randrange(g.n)
        dm, _ = sssp(tri, v)
        best = min(
            range(len(path)),
            key=lambda i: (int(dm.dist[path.nodes[i]]), int(path.h[i]), int(path.nodes[i])),
        )
        assert project(dm, path).pos == best


def test_select_portals_v_on_path_single():
    # when v lies on the path, the shortest-subpath equality kills every
    # candidate and only the projection remains
    g = gen_grid(4, 4, (1, 30), 2, 3)
    _, spt = sssp(g, find_center(g)[0])
    tri = triangulate(g)
    rgd = build_rgd(tri, spt, 1)
    sep = next(p.separator for p in rgd.pieces if p.separator is not None)
    for path in sep.paths:
        for v in path.nodes:
            dm, _ = sssp(tri, int(v))
            portals = select_portals(dm, path, HALF)
            assert len(portals) == 1
            assert portals[0].node == int(v) and portals[0].d == 0


def test_select_portals_hand_instance():
    portals = select_portals(HAND_DIST, HAND_PATH, QUARTER)
    assert [p.pos for p in portals] == [1, 3, 4]
    assert [p.d for p in portals] == [6, 3, 1]
    assert verify_distance_property(HAND_DIST, HAND_PATH, portals, QUARTER)


def test_distance_property_fails_without_needed_portal():
    portals = select_portals(HAND_DIST, HAND_PATH, QUARTER)
    assert not verify_distance_property(HAND_DIST, HAND_PATH, portals[:-1], QUARTER)
    assert not verify_distance_property(
        HAND_DIST, HAND_PATH, [portals[0], portals[2]], QUARTER
    )


def test_select_portals_three_stretch():
    portals = select_portals(HAND_DIST, HAND_PATH, THREE_STRETCH_EPS)
    assert len(portals) == 1
    assert portals[0].pos == 4
    # projection covers every node within 3x: d0 + |h0 - h(w)| <= 3 d(v,w)
    assert verify_distance_property(HAND_DIST, HAND_PATH, portals, THREE_STRETCH_EPS)


def test_select_portals_property_fuzz_lipschitz():
    # arbitrary 1-Lipschitz (in h) distance vectors: the greedy must still
    # cover every node, though the count bound needs metric consistency
    rng = random.Random(7)
    eps_pool = [Fraction(1, 10), Fraction(1, 4), Fraction(1, 3), HALF, Fraction(9, 10)]
    for _ in range(150):
        ln = rng.randrange(1, 40)
        h = np.cumsum([0] + [rng.randrange(0, 7) for _ in range(ln - 1)])
        base = rng.randrange(0, 50)
        d = [base]
        for i in range(1, ln):
            step = int(h[i] - h[i - 1])
            d.append(max(0, d[-1] + rng.randint(-step, step)))
        nodes = list(range(ln))
        path = make_path(nodes, list(h))
        dist = make_dist(ln, dict(zip(nodes, d)))
        eps = rng.choice(eps_pool)
        portals = select_portals(dist, path, eps)
        hs = [p.h for p in portals]
        assert hs == sorted(hs) and len(set(p.pos for p in portals)) == len(portals)
        assert verify_distance_property(dist, path, portals, eps)


def test_select_portals_count_bound_metric_fuzz():
    # realizable distances: the vertex hangs off the path, reachable through
    # a few attachment nodes; d_i = min_j (w_j + |h_i - h_j|) with the w_j
    # chosen so no attachment pair undercuts the path (w_s + w_t >= |h gap|)
    rng = random.Random(13)
    eps_pool = [Fraction(1, 10), Fraction(1, 4), Fraction(1, 3), HALF, Fraction(9, 10)]
    for _ in range(200):
        ln = rng.randrange(1, 40)
        h = list(np.cumsum([0] + [rng.randrange(0, 7) for _ in range(ln - 1)]))
        x = rng.randrange(-10, (int(h[-1]) or 1) + 10)
        r = rng.randrange(0, 40)
        attach = rng.sample(range(ln), rng.randrange(1, min(ln, 6) + 1))
        w = {j: abs(int(h[j]) - x) + r + rng.randrange(0, 15) for j in attach}
        d = [min(w[j] + abs(int(h[i]) - int(h[j])) for j in attach) for i in range(ln)]
        nodes = list(range(ln))
        path = make_path(nodes, h)
        dist = make_dist(ln, dict(zip(nodes, d)))
        eps = rng.choice(eps_pool)
        portals = select_portals(dist, path, eps)
        assert len(portals) <= portal_count_limit(eps)
        assert verify_distance_property(dist, path, portals, eps)


@pytest.mark.skipif(not HAS_NUMBA, reason="numba unavailable")
def test_select_positions_backends_identical():
    from plado._kernels import _select_positions_nb, _select_positions_py

    rng = random.Random(3)
    for _ in range(200):
        ln = rng.randrange(1, 30)
        h = np.cumsum([0] + [rng.randrange(0, 5) for _ in range(ln - 1)]).astype(np.int64)
        d = np.asarray([rng.randrange(0, 60) for _ in range(ln)], dtype=np.int64)
        nodes = np.asarray(rng.sample(range(1000), ln), dtype=np.int64)
        p, q = rng.choice([(1, 10), (1, 4), (1, 2), (3, 4)])
        a = _select_positions_py(list(map(int, d)), list(map(int, h)),
                                 list(map(int, nodes)), p, q)
        b = _select_positions_nb(d, h, nodes, p, q)
        assert list(a) == list(b)


def test_select_portals_big_values_fall_back_exactly():
    # distances near the 2^31 edge-length cap force the big-int path
    scale = 2**31
    path = make_path([0, 1, 2, 3], [0, scale, 2 * scale, 3 * scale])
    dist = make_dist(4, {0: 3 * scale, 1: 2 * scale, 2: scale, 3: 0})
    portals = select_portals(dist, path, Fraction(1, 2**20))
    assert portals[-1].pos == 3
    assert verify_distance_property(dist, path, portals, Fraction(1, 2**20))


def test_build_vertex_tables_grid(grid44):
    g = grid44
    r, _ = find_center(g)
    _, spt = sssp(g, r)
    tri = triangulate(g)
    rgd = build_rgd(tri, spt, 1)
    tables = build_vertex_tables(tri, spt, rgd, HALF)
    limit = portal_count_limit(HALF)
    for v in range(g.n):
        dm, _ = sssp(tri, v)
        for pid, pair in tables[v].items():
            sep = rgd.pieces[pid].separator
            for side in (0, 1):
                assert len(pair[side]) <= limit
                assert verify_distance_property(dm, sep.paths[side], pair[side], HALF)
    # a vertex on its piece's separator has a d = 0 portal there
    for p in rgd.pieces:
        if p.separator is None:
            continue
        for v in p.members:
            v = int(v)
            if v in p.separator.path_a.position:
                assert any(pt.d == 0 for pt in tables[v][p.id][0])
            elif v in p.separator.path_b.position:
                assert any(pt.d == 0 for pt in tables[v][p.id][1])


def test_build_vertex_tables_single_vertex():
    g = PlanarGraph(1, 1, [0], [], [[]])
    _, spt = sssp(g, 0)
    tri = triangulate(g)
    rgd = build_rgd(tri, spt, 1)
    tables = build_vertex_tables(tri, spt, rgd, HALF)
    assert tables[0] == {}
    assert tables.total_entries() == 0
