import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarsegeom import (
    InadmissibleError,
    TriangleError,
    build_comparison_triangle,
    comparison_point,
    fellow_traveler_gap,
    make_path,
    rcat0_constant_cat0,
    rcat0_constant_hyperbolic,
    rcat0_triangle_check,
    rough_convexity_gap,
    weak_rcat0_check,
)
from coarsegeom.spaces import RegionSpec, explicit_plane, generate, random_tree


def _dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


# ---------------------------------------------------------------------------
# comparison triangles
# ---------------------------------------------------------------------------

def test_triangle_345():
    tri = build_comparison_triangle(3.0, 4.0, 5.0)
    assert tri.coords[0] == (0.0, 0.0)
    assert tri.coords[1] == (3.0, 0.0)
    assert tri.coords[2] == pytest.approx((0.0, 4.0), abs=1e-9)


def test_triangle_equilateral():
    tri = build_comparison_triangle(2.0, 2.0, 2.0)
    assert tri.coords[2] == pytest.approx((1.0, math.sqrt(3.0)), abs=1e-9)


def test_triangle_degenerate_collinear():
    tri = build_comparison_triangle(2.0, 1.0, 1.0)
    assert tri.coords[2] == pytest.approx((1.0, 0.0), abs=1e-9)


def test_triangle_inequality_gate():
    with pytest.raises(InadmissibleError):
        build_comparison_triangle(10.0, 1.0, 2.0)
    with pytest.raises(InadmissibleError):
        build_comparison_triangle(-1.0, 1.0, 1.0)


def test_triangle_side_reproduction_bulk():
    # placement reproduces the inputs for 10^4 random admissible triples
    rng = np.random.default_rng(42)
    pts = rng.uniform(-100, 100, size=(10_000, 3, 2))
    worst = 0.0
    for p in pts:
        a, b, c = (_dist(p[0], p[1]), _dist(p[0], p[2]), _dist(p[1], p[2]))
        tri = build_comparison_triangle(a, b, c)
        x, y, z = tri.coords
        worst = max(worst, abs(_dist(x, y) - a), abs(_dist(x, z) - b),
                    abs(_dist(y, z) - c))
        assert z[1] >= -1e-12 and y[1] == 0.0 and y[0] >= 0.0
    assert worst <= 1e-9


@settings(max_examples=80, deadline=None)
@given(st.tuples(st.floats(0.1, 50), st.floats(0.1, 50), st.floats(0.0, 1.0)))
def test_triangle_sides_from_planar_points(args):
    a, b, frac = args
    c = abs(a - b) + frac * (a + b - abs(a - b))
    tri = build_comparison_triangle(a, b, c)
    x, y, z = tri.coords
    assert _dist(x, y) == pytest.approx(a, abs=1e-9)
    assert _dist(x, z) == pytest.approx(b, abs=1e-9)
    assert _dist(y, z) == pytest.approx(c, abs=1e-7)


# ---------------------------------------------------------------------------
# comparison points
# ---------------------------------------------------------------------------

def test_comparison_point_geodesic_midpoint():
    tri = build_comparison_triangle(4.0, 3.0, 5.0)
    cp = comparison_point(tri, 0, 2.0, 2.0)
    assert cp.planar == pytest.approx((2.0, 0.0))
    assert cp.along == 2.0


def test_comparison_point_start():
    tri = build_comparison_triangle(4.0, 3.0, 5.0)
    cp = comparison_point(tri, 1, 0.0, 5.0)
    assert cp.planar == pytest.approx(tri.side_endpoints(1)[0])


def test_comparison_point_slack_rule():
    tri = build_comparison_triangle(5.0, 4.0, 3.0)
    cp = comparison_point(tri, 0, 2.05, 3.05)
    assert cp.along == pytest.approx(2.05)
    start, end = tri.side_endpoints(0)
    assert _dist(cp.planar, start) <= 2.05 + 1e-9
    assert _dist(cp.planar, end) <= 3.05 + 1e-9


def test_comparison_point_inconsistent_lengths():
    tri = build_comparison_triangle(5.0, 4.0, 3.0)
    with pytest.raises(InadmissibleError):
        comparison_point(tri, 0, 1.0, 2.0)  # sum below the side length


# ---------------------------------------------------------------------------
# rcat0_triangle_check
# ---------------------------------------------------------------------------

def test_rcat0_degenerate_triangle():
    sp = explicit_plane({0: (0.0, 0.0)})
    p = make_path(sp, [0])
    rep = rcat0_triangle_check(sp, [p, p, p], C=2.0)
    assert rep.c_required == 0.0 and rep.passed


def test_rcat0_tree_never_fails():
    for seed in range(4):
        tree = random_tree(35, seed=seed)
        rng = np.random.default_rng(seed)
        for _ in range(25):
            a, b, c = (int(k) for k in rng.choice(35, 3, replace=False))
            paths = [tree.geodesic(a, b), tree.geodesic(b, c),
                     tree.geodesic(c, a)]
            rep = rcat0_triangle_check(tree, paths, C=2.0, pair_samples=20,
                                       seed=int(rng.integers(0, 1 << 30)))
            assert rep.passed, (seed, a, b, c, rep.c_required)


def test_rcat0_convex_net_cat0_constant():
    net = generate(RegionSpec("rectangle", eps=0.05, extent=1.0))
    net.distance_matrix()
    rng = np.random.default_rng(5)
    C = rcat0_constant_cat0()
    for _ in range(15):
        a, b, c = (int(net.ids[k]) for k in rng.choice(net.n_points, 3,
                                                       replace=False))
        paths = [net.geodesic(a, b), net.geodesic(b, c), net.geodesic(c, a)]
        rep = rcat0_triangle_check(net, paths, C=C, pair_samples=24, seed=9)
        assert rep.passed


def test_rcat0_rejects_inadmissible_slack():
    # a wandering path has too much slack for the vertex triple
    sp = explicit_plane({0: (0.0, 0.0), 1: (10.0, 0.0), 2: (5.0, 8.0),
                         3: (5.0, -7.0)})
    slack_path = make_path(sp, [0, 3, 1])  # detour: long slack
    direct_02 = make_path(sp, [0, 2])
    direct_12 = make_path(sp, [1, 2])
    with pytest.raises(InadmissibleError):
        rcat0_triangle_check(sp, [slack_path, direct_12, direct_02], C=2.0)


def test_rcat0_rejects_non_triangle():
    sp = explicit_plane({0: (0.0, 0.0), 1: (1.0, 0.0), 2: (0.0, 1.0),
                         3: (1.0, 1.0)})
    with pytest.raises(TriangleError):
        rcat0_triangle_check(sp, [make_path(sp, [0, 1]), make_path(sp, [1, 2]),
                                  make_path(sp, [2, 3])], C=2.0)


def test_rcat0_report_is_seed_deterministic():
    tree = random_tree(30, seed=3)
    paths = [tree.geodesic(0, 20), tree.geodesic(20, 27), tree.geodesic(27, 0)]
    a = rcat0_triangle_check(tree, paths, C=2.0, pair_samples=32, seed=11)
    b = rcat0_triangle_check(tree, paths, C=2.0, pair_samples=32, seed=11)
    assert a == b


def test_hyperbolic_constant_helper():
    assert rcat0_constant_hyperbolic(0.0) == 2.0
    assert rcat0_constant_cat0() == pytest.approx(2.0 + math.sqrt(3.0))


# ---------------------------------------------------------------------------
# weak rCAT(0)
# ---------------------------------------------------------------------------

def _median_config():
    coords = {0: (0.7, 2.3), 1: (-1.0, 0.0), 2: (1.0, 0.0), 3: (0.0, 0.0)}
    sp = explicit_plane(coords)
    return sp, make_path(sp, [1, 3, 2])


def test_weak_rcat0_euclidean_median_identity():
    sp, path = _median_config()
    res = weak_rcat0_check(sp, 0, path, s=1.0, t=0.5, C=0.0)
    assert res == pytest.approx(0.0, abs=1e-9)


def test_weak_rcat0_endpoint_trivial():
    sp, path = _median_config()
    for C in (0.0, 1.0, 5.0):
        assert weak_rcat0_check(sp, 0, path, s=0.0, t=0.0, C=C) <= 1e-9


def test_weak_rcat0_tree_sampled():
    tree = random_tree(50, seed=8)
    rng = np.random.default_rng(8)
    done = 0
    while done < 20:
        x, y, z = (int(k) for k in rng.choice(50, 3, replace=False))
        path = tree.geodesic(y, z)
        s = float(rng.uniform(0, path.length))
        dyz = tree.d(y, z)
        t = min(s / dyz, 1.0) if dyz > 0 else 0.0
        if (1.0 - t) * dyz > path.length - s + 1e-12:
            continue
        assert weak_rcat0_check(tree, x, path, s=s, t=t, C=2.0) <= 1e-9
        done += 1


def test_weak_rcat0_gates():
    sp, path = _median_config()
    with pytest.raises(InadmissibleError):
        weak_rcat0_check(sp, 0, path, s=0.0, t=1.0, C=0.0)


# ---------------------------------------------------------------------------
# rough convexity
# ---------------------------------------------------------------------------

def test_rough_convexity_t0_is_zero():
    tree = random_tree(40, seed=4)
    g1 = tree.geodesic(0, 30)
    g2 = tree.geodesic(5, 35)
    assert rough_convexity_gap(tree, g1, g2, 0.0) == pytest.approx(0.0, abs=1e-9)


def test_rough_convexity_euclidean_segments():
    coords = {0: (0.0, 0.0)}
    c1, c2 = [0], [0]
    nid = 1
    for k in range(1, 9):
        coords[nid] = (k, 0.5 * k)
        c1.append(nid)
        nid += 1
    for k in range(1, 9):
        coords[nid] = (-0.25 * k, k)
        c2.append(nid)
        nid += 1
    sp = explicit_plane(coords, segments=[c1, c2])
    g1, g2 = sp.geodesic(0, c1[-1]), sp.geodesic(0, c2[-1])
    for k in range(9):
        assert rough_convexity_gap(sp, g1, g2, k / 8.0) <= 1e-9


def test_rough_convexity_tree_shared_origin():
    tree = random_tree(60, seed=14)
    from coarsegeom import snap_allowance

    g1 = tree.geodesic(0, 50)
    g2 = tree.geodesic(0, 57)
    allowance = snap_allowance(tree, [g1, g2])
    for t in np.linspace(0.0, 1.0, 9):
        assert rough_convexity_gap(tree, g1, g2, float(t)) <= 2.0 + allowance


def test_rough_convexity_slack_gate():
    sp = explicit_plane({0: (0.0, 0.0), 1: (9.0, 0.0), 2: (4.5, 4.0)})
    detour = make_path(sp, [0, 2, 1])  # slack way above 1/(1 v d)
    with pytest.raises(InadmissibleError):
        rough_convexity_gap(sp, detour, detour, 0.5)


# ---------------------------------------------------------------------------
# fellow traveler
# ---------------------------------------------------------------------------

def test_fellow_traveler_identical():
    tree = random_tree(40, seed=6)
    g = tree.geodesic(0, 33)
    assert fellow_traveler_gap(tree, "two-tips", g, g, g.length / 2) <= 0.0


def test_fellow_traveler_euclidean_two_tips():
    coords = {0: (0.0, 0.0)}
    c1, c2 = [0], [0]
    nid = 1
    for k in range(1, 11):
        coords[nid] = (k, 0.0)
        c1.append(nid)
        nid += 1
    for k in range(1, 11):
        coords[nid] = (k * math.cos(0.5), k * math.sin(0.5))
        c2.append(nid)
        nid += 1
    sp = explicit_plane(coords, segments=[c1, c2])
    g1, g2 = sp.geodesic(0, c1[-1]), sp.geodesic(0, c2[-1])
    for s in (0.0, 2.0, 5.0, 10.0):
        assert fellow_traveler_gap(sp, "two-tips", g1, g2, s) <= 1e-9


def test_fellow_traveler_tree_two_origins():
    # two origins at distance 4 joined to a common tip
    from coarsegeom import MetricSpace

    edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0),  # o1 .. o2
             (2, 5, 1.0), (5, 6, 1.0), (6, 7, 1.0)]               # stem to x
    sp = MetricSpace("graph", range(8), edges=edges, basepoint=0)
    p1 = sp.geodesic(0, 7)
    p2 = sp.geodesic(4, 7)
    assert sp.d(0, 4) == 4.0
    for s in (0.0, 1.0, 2.0):
        gap = fellow_traveler_gap(sp, "two-origins", p1, p2, s)
        assert gap <= 2.0 + 1e-9  # C = 2 on trees


def test_fellow_traveler_mode_gates():
    tree = random_tree(30, seed=9)
    g1 = tree.geodesic(0, 20)
    g2 = tree.geodesic(1, 25)
    with pytest.raises(InadmissibleError):
        fellow_traveler_gap(tree, "two-tips", g1, g2, 0.5)
    with pytest.raises(ValueError):
        fellow_traveler_gap(tree, "sideways", g1, g1, 0.5)
