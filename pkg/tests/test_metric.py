import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarsegeom import (
    DisconnectedError,
    InadmissibleError,
    MetricSpace,
    ResolutionError,
    SpaceKindError,
    four_point_delta,
    gromov_product,
    h_bound,
    h_short_path,
    make_path,
    point_at,
    tripod_gap,
    vais_gap,
)
from coarsegeom.spaces import (
    RegionSpec,
    explicit_example_points,
    explicit_plane,
    generate,
    path_graph,
    random_tree,
)


def square_space():
    return explicit_plane({0: (0.0, 0.0), 1: (1.0, 0.0), 2: (0.0, 1.0),
                           3: (1.0, 1.0)})


# ---------------------------------------------------------------------------
# gromov_product
# ---------------------------------------------------------------------------

def test_gromov_product_degenerate_cases():
    sp = square_space()
    assert gromov_product(sp, 0, 0, 0) == 0.0
    assert gromov_product(sp, 1, 2, 1) == 0.0  # w = x


def test_gromov_product_conjugate_points():
    fam = explicit_example_points("ex51", 1)
    sp = fam.space
    x1, y1 = fam.sequences["x"][0], fam.sequences["y"][0]
    got = gromov_product(sp, x1, y1, 0)
    assert got == pytest.approx(math.sqrt(20.0) - 2.0, abs=1e-9)


def test_gromov_product_identity_exact():
    # 2<x,y;w> + d(x,y) = d(x,w) + d(y,w), as floating identity
    tree = random_tree(40, seed=11)
    rng = np.random.default_rng(0)
    for _ in range(300):
        x, y, w = (int(k) for k in rng.integers(0, 40, 3))
        lhs = 2.0 * gromov_product(tree, x, y, w) + tree.d(x, y)
        assert abs(lhs - tree.d(x, w) - tree.d(y, w)) <= 1e-9
        assert gromov_product(tree, x, y, w) >= -1e-12


# ---------------------------------------------------------------------------
# four_point_delta
# ---------------------------------------------------------------------------

def labeling_oracle(space, quad):
    import itertools

    best = 0.0
    for x, y, z, w in itertools.permutations(quad):
        defect = (min(gromov_product(space, x, y, w),
                      gromov_product(space, y, z, w))
                  - gromov_product(space, x, z, w))
        best = max(best, defect)
    return best


def test_delta_tiny_spaces_are_zero():
    sp = explicit_plane({0: (0.0, 0.0), 1: (5.0, 1.0), 2: (2.0, 7.0)})
    rep = four_point_delta(sp, "exact")
    assert rep.delta == 0.0 and rep.exact


def test_delta_path_graph_is_zero():
    rep = four_point_delta(path_graph(4), "exact")
    assert rep.delta == pytest.approx(0.0, abs=1e-9)


def test_delta_square_matches_labeling_oracle():
    sp = square_space()
    rep = four_point_delta(sp, "exact")
    assert rep.delta == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-9)
    assert rep.delta == pytest.approx(labeling_oracle(sp, (0, 1, 2, 3)), abs=1e-9)
    assert rep.exact and rep.samples == 1


def test_delta_exact_tree_is_zero():
    for seed in range(6):
        tree = random_tree(25 + seed, seed=seed)
        assert four_point_delta(tree, "exact").delta <= 1e-9


def test_delta_sampling_matches_oracle_on_witness():
    sp = generate(RegionSpec("halfplane-hyperbolic", eps=1.0))
    rep = four_point_delta(sp, 400, seed=3)
    assert rep.delta == pytest.approx(labeling_oracle(sp, rep.witness_quadruple),
                                      abs=1e-9)


def test_delta_budget_monotone():
    sp = generate(RegionSpec("rectangle", eps=0.25, extent=2.0))
    deltas = [four_point_delta(sp, b, seed=7).delta for b in (50, 200, 800)]
    assert deltas == sorted(deltas)


def test_delta_point_order_invariant():
    coords = {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (0.0, 1.0), 3: (1.0, 1.0),
              4: (3.0, 2.0), 5: (-1.0, 4.0)}
    a = MetricSpace("explicit-euclidean", [0, 1, 2, 3, 4, 5], coords=coords)
    b = MetricSpace("explicit-euclidean", [5, 3, 1, 0, 2, 4], coords=coords)
    assert (four_point_delta(a, "exact").delta
            == four_point_delta(b, "exact").delta)
    assert (four_point_delta(a, 64, seed=5).delta
            == four_point_delta(b, 64, seed=5).delta)


def test_delta_exact_guard():
    tree = random_tree(60, seed=1)
    with pytest.raises(InadmissibleError):
        four_point_delta(tree, "exact")


def test_delta_empty_space():
    with pytest.raises((InadmissibleError, ValueError)):
        four_point_delta(MetricSpace("graph", [], edges=[]), 10)


# ---------------------------------------------------------------------------
# h_short_path / point_at
# ---------------------------------------------------------------------------

def test_h_short_path_same_point():
    pg = path_graph(6)
    p = h_short_path(pg, 2, 2, 0.5)
    assert p.vertices == (2,) and p.length == 0.0


def test_h_short_path_unique_geodesic():
    pg = path_graph(6)
    p = h_short_path(pg, 0, 5, 0.1)
    assert p.vertices == (0, 1, 2, 3, 4, 5)
    assert p.cum_len[-1] == pytest.approx(5.0)
    assert p.slack == 0.0
    assert p.validate_in(pg)


def reference_dijkstra(space, source):
    """Independent oracle: textbook heap Dijkstra over the adjacency lists."""
    import heapq

    dist = {int(i): math.inf for i in space.ids}
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u] + 1e-12:
            continue
        for v, w in space.neighbors(u):
            nd = d + w
            if nd < dist[v] - 1e-12:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def test_h_short_path_net_floor():
    net = generate(RegionSpec("rectangle", eps=0.05, extent=1.0))
    corner = net.basepoint
    far = max(int(i) for i in net.ids)
    with pytest.raises(ResolutionError):
        h_short_path(net, corner, far, 0.1)  # below 4 * eps
    p = h_short_path(net, corner, far, 0.25)
    oracle = reference_dijkstra(net, corner)
    assert p.length <= oracle[far] + 0.25
    assert p.length == pytest.approx(oracle[far], abs=1e-9)


def test_distance_rows_match_reference_dijkstra():
    net = generate(RegionSpec("parabolic", eps=0.2, extent=2.0))
    src = net.basepoint
    oracle = reference_dijkstra(net, src)
    row = net.distances_from(src)
    for i in net.ids:
        assert row[net.index_of(int(i))] == pytest.approx(oracle[int(i)], abs=1e-9)


def test_h_short_path_requires_graph():
    with pytest.raises(SpaceKindError):
        h_short_path(square_space(), 0, 3, 0.5)


def test_h_short_path_rejects_disconnected():
    sp = MetricSpace("graph", [0, 1, 2, 3], edges=[(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(DisconnectedError):
        h_short_path(sp, 0, 3, 0.5)


def test_geodesic_tie_break_is_lexicographic():
    # two equal-length routes 0-1-3 and 0-2-3: the smaller ids win
    sp = MetricSpace("graph", [0, 1, 2, 3],
                     edges=[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
    assert sp.geodesic(0, 3).vertices == (0, 1, 3)


def test_point_at_examples():
    pg = path_graph(3)
    p = pg.geodesic(0, 2)
    assert point_at(p, 0.0) == 0
    assert point_at(p, p.length) == 2
    assert point_at(p, 0.9) == 1
    assert point_at(p, 0.5) == 0  # tie goes to the earlier vertex
    with pytest.raises(InadmissibleError):
        point_at(p, 2.5)


# ---------------------------------------------------------------------------
# h_bound / vais_gap / tripod_gap
# ---------------------------------------------------------------------------

def test_h_bound():
    sp = explicit_plane({0: (0.0, 0.0), 1: (0.5, 0.0), 2: (0.0, 0.5)})
    assert h_bound(sp, 0, 1, 2) == 1.0
    assert h_bound(sp, 0, 0, 0) == 1.0
    sp2 = explicit_plane({0: (0.0, 0.0), 1: (4.0, 0.0), 2: (2.0, 0.0)})
    assert h_bound(sp2, 0, 1, 2) == pytest.approx(0.25)


def test_vais_gap_on_path_and_tree():
    pg = path_graph(7)
    p = pg.geodesic(0, 6)
    dist, prod = vais_gap(pg, p, 3)
    assert dist == 0.0 and prod == pytest.approx(0.0, abs=1e-9)
    assert prod <= dist + p.slack / 2.0 + 1e-9


def test_vais_gap_planar():
    coords = {0: (-5.0, 0.0), 1: (5.0, 0.0), 2: (0.0, 3.0)}
    chain = [0]
    nid = 3
    for k in range(1, 10):
        coords[nid] = (-5.0 + k, 0.0)
        chain.append(nid)
        nid += 1
    chain.append(1)
    sp = explicit_plane(coords, segments=[chain])
    p = sp.geodesic(0, 1)
    dist, prod = vais_gap(sp, p, 2)
    assert dist == pytest.approx(3.0, abs=1e-9)
    assert prod == pytest.approx(math.sqrt(34.0) - 5.0, abs=1e-4)
    assert prod <= dist + 1e-9


def test_tripod_gap_identical_paths():
    pg = path_graph(9)
    p = pg.geodesic(0, 8)
    # identical paths share endpoints, so every t up to the product is fine
    for t in (0.0, 1.0, 3.5, 8.0):
        assert tripod_gap(pg, p, p, t) == 0.0


def test_tripod_gap_tree_prefix():
    tree = random_tree(40, seed=2)
    p1 = tree.geodesic(0, 31)
    p2 = tree.geodesic(0, 37)
    ip = gromov_product(tree, 31, 37, 0)
    for t in np.linspace(0.0, ip, 5):
        assert tripod_gap(tree, p1, p2, float(t)) == pytest.approx(0.0, abs=1e-9)


def test_tripod_gap_gates():
    tree = random_tree(40, seed=2)
    p1 = tree.geodesic(0, 31)
    p2 = tree.geodesic(0, 37)
    ip = gromov_product(tree, 31, 37, 0)
    with pytest.raises(InadmissibleError):
        tripod_gap(tree, p1, p2, ip + 1.0)
    with pytest.raises(InadmissibleError):
        tripod_gap(tree, tree.geodesic(1, 31), p2, 0.0)


# ---------------------------------------------------------------------------
# MetricSpace plumbing
# ---------------------------------------------------------------------------

def test_pathrec_invariant_checked():
    pg = path_graph(5)
    p = make_path(pg, [0, 1, 2, 3])
    assert p.validate_in(pg)
    with pytest.raises(InadmissibleError):
        make_path(pg, [0, 1, 2, 1, 0], slack=0.0)  # loops are not 0-short


def test_space_json_roundtrip():
    net = generate(RegionSpec("star", eps=1.0, extent=5.0, k=3))
    clone = MetricSpace.from_json(net.to_json())
    assert clone.n_points == net.n_points
    assert clone.basepoint == net.basepoint
    assert clone.d(0, int(clone.ids[-1])) == pytest.approx(
        net.d(0, int(net.ids[-1])))
    assert net.to_json()["schema_version"] == 1


def test_distance_matrix_guard():
    sp = path_graph(10)
    m = sp.distance_matrix()
    assert m[0, 9] == pytest.approx(9.0)
    big = MetricSpace("graph", range(5001),
                      edges=[(i, i + 1, 1.0) for i in range(5000)])
    with pytest.raises(ResolutionError):
        big.distance_matrix()


def test_row_cache_is_read_through():
    sp = path_graph(30)
    r1 = sp.distances_from(3)
    r2 = sp.distances_from(3)
    assert r1 is r2
    sp.warm_rows([5, 7, 5])
    assert sp.d(5, 20) == 15.0


def test_concurrent_reads_match_sequential():
    from concurrent.futures import ThreadPoolExecutor

    sp = generate(RegionSpec("rectangle", eps=0.25, extent=2.0))
    rng = np.random.default_rng(3)
    pairs = [(int(sp.ids[a]), int(sp.ids[b]))
             for a, b in rng.integers(0, sp.n_points, (200, 2))]
    sequential = [sp.d(a, b) for a, b in pairs]
    fresh = generate(RegionSpec("rectangle", eps=0.25, extent=2.0))
    with ThreadPoolExecutor(max_workers=8) as pool:
        concurrent = list(pool.map(lambda ab: fresh.d(*ab), pairs))
    assert concurrent == sequential


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-20, 20), st.floats(-20, 20)),
                min_size=4, max_size=4, unique=True))
def test_quadruple_defect_equals_labeling_oracle(points):
    # the sorted-pair-sums shortcut agrees with the worst labeling everywhere
    sp = explicit_plane({i: p for i, p in enumerate(points)})
    rep = four_point_delta(sp, "exact")
    assert rep.delta == pytest.approx(labeling_oracle(sp, (0, 1, 2, 3)),
                                      abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)),
                min_size=3, max_size=8, unique=True))
def test_explicit_metric_axioms(points):
    coords = {i: p for i, p in enumerate(points)}
    sp = explicit_plane(coords)
    n = len(points)
    for a in range(n):
        for b in range(n):
            assert sp.d(a, b) == sp.d(b, a)
            for c in range(n):
                assert sp.d(a, c) <= sp.d(a, b) + sp.d(b, c) + 1e-9
