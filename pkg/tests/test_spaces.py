import math
from collections import defaultdict

import numpy as np
import pytest

from coarsegeom import ResolutionError
from coarsegeom.spaces import (
    KING_DISTORTION,
    RegionSpec,
    explicit_example_points,
    generate,
    random_tree,
)


def test_rectangle_counts():
    sp = generate(RegionSpec("rectangle", eps=0.5, extent=1.0))
    assert sp.n_points == 9
    sp.triangle_spot_check(samples=20)
    # 4-point grid connectivity through king moves
    assert sp.d(sp.basepoint, int(sp.ids[-1])) <= math.sqrt(2.0) * KING_DISTORTION + 1e-6


def test_star_structure():
    k = 3
    sp = generate(RegionSpec("star", eps=1.0, extent=20.0, k=k))
    assert sp.n_points == 1 + k * 20
    # removing the hub disconnects the graph into exactly k parts
    arms = defaultdict(set)
    for a, b, w in sp.edges:
        if a != 0 and b != 0:
            arms[min(a, b)].add(a)
            arms[min(a, b)].add(b)
    hub_degree = sum(1 for a, b, _ in sp.edges if 0 in (a, b))
    assert hub_degree == k
    sp.triangle_spot_check(samples=20)


def test_parabolic_region_membership():
    sp = generate(RegionSpec("parabolic", eps=0.1, extent=2.0))
    for i in sp.ids:
        x, y = sp.coords[int(i)]
        assert y * y <= x + 1e-9
    sp.triangle_spot_check(samples=20)


def test_parabolic_contains_family_points():
    # the one-parameter family x_n(t) = (4^n, 2^n t) lives in y^2 <= x
    for t in (-1.0, -0.5, 0.0, 0.5, 1.0):
        for n in range(1, 13):
            x, y = 4.0 ** n, (2.0 ** n) * t
            assert y * y <= x + 1e-9


def test_quality_gate_bounds():
    sp = generate(RegionSpec("rectangle", eps=0.05, extent=1.0))
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, b = (int(sp.ids[k]) for k in rng.integers(0, sp.n_points, 2))
        chord = math.hypot(sp.coords[a][0] - sp.coords[b][0],
                           sp.coords[a][1] - sp.coords[b][1])
        got = sp.d(a, b)
        assert chord - 1e-9 <= got <= chord + 4 * 0.05 * (1 + chord) + 1e-9


def test_slit_square():
    sp = generate(RegionSpec("slit-square", eps=0.25, extent=3.0))
    assert sp.coords[sp.basepoint] == (0.0, 0.0)
    for i in sp.ids:
        x, y = sp.coords[int(i)]
        assert (x, y) == (0.0, 0.0) or (0.0 < x < 1.0 and y > 0.0)
    # the origin is attached: everything is reachable
    far = max((int(i) for i in sp.ids), key=lambda i: sp.coords[i][1])
    assert sp.d(sp.basepoint, far) < math.inf


def test_chain_region_connectivity():
    sp = generate(RegionSpec("chain", eps=0.25, extent=6.0))
    junctions = [int(i) for i in sp.ids
                 if abs(sp.coords[int(i)][1]) < 1e-12
                 and abs(sp.coords[int(i)][0] - round(sp.coords[int(i)][0])) < 1e-12]
    assert len(junctions) == 7  # (0,0) .. (6,0)
    # consecutive boxes only communicate through their shared junction
    far = max(junctions, key=lambda i: sp.coords[i][0])
    assert sp.d(sp.basepoint, far) >= 6.0
    sp.triangle_spot_check(samples=20)


def test_chain_boxes_never_glued_through_walls():
    # a non-dividing eps is snapped so no edge crosses an integer wall
    for eps in (0.3, 0.25):
        sp = generate(RegionSpec("chain", eps=eps, extent=4.0))
        for a, b, _ in sp.edges:
            xa, ya = sp.coords[a]
            xb, yb = sp.coords[b]
            if abs(ya) < 1e-12 or abs(yb) < 1e-12:
                continue  # junction edges are the allowed crossings
            assert math.floor(xa + 1e-9) == math.floor(xb + 1e-9)


def test_strips_gluing_is_restricted():
    sp = generate(RegionSpec("strips", eps=0.5, extent=8.0))
    bycoord = defaultdict(list)
    for i in sp.ids:
        bycoord[sp.coords[int(i)]].append(int(i))
    dupes = {c: v for c, v in bycoord.items() if len(v) > 1}
    # unglued boundary points exist as distinct copies
    assert dupes
    for coord, pair in dupes.items():
        assert sp.d(pair[0], pair[1]) > 0.0
    sp.triangle_spot_check(samples=30)


def test_halfplane_weights():
    sp = generate(RegionSpec("halfplane-hyperbolic", eps=0.5))
    for a, b, w in sp.edges:
        xa, ya = sp.coords[a]
        xb, yb = sp.coords[b]
        assert w == pytest.approx(math.hypot(xb - xa, yb - ya) / (0.5 * (ya + yb)))
    # deeper points are cheaper to move between, as in the upper half-plane
    sp.triangle_spot_check(samples=20)


def test_tree_and_grid_kinds():
    tree = generate(RegionSpec("tree", branching=2, depth=3))
    assert tree.n_points == 1 + 2 + 4 + 8
    grid = generate(RegionSpec("grid", eps=1.0, width=4, height=3))
    assert grid.n_points == 12


def test_random_tree_is_tree():
    tree = random_tree(30, seed=5)
    assert len(tree.edges) == 29
    tree.triangle_spot_check(samples=20)


def test_region_empty_raises():
    with pytest.raises((ResolutionError, ValueError)):
        generate(RegionSpec("rectangle", eps=0.5, extent=0.25))


def test_explicit_example_points_ex51():
    fam = explicit_example_points("ex51", 3)
    xs = fam.sequences["x"]
    ys = fam.sequences["y"]
    assert [fam.space.coords[i] for i in xs] == [(4.0, 2.0), (16.0, 4.0),
                                                 (64.0, 8.0)]
    assert [fam.space.coords[i] for i in ys] == [(4.0, -2.0), (16.0, -4.0),
                                                 (64.0, -8.0)]


def test_explicit_example_points_ex52():
    fam = explicit_example_points("ex52", 4, ts=[0.0, 1.0])
    zeros = fam.sequences["t=0"]
    ones = fam.sequences["t=1"]
    assert all(fam.space.coords[i][1] == 0.0 for i in zeros)
    assert [fam.space.coords[i] for i in ones] == [(4.0, 2.0), (16.0, 4.0),
                                                   (64.0, 8.0), (256.0, 16.0)]
    with pytest.raises(ValueError):
        explicit_example_points("ex52", 4)
    with pytest.raises(ValueError):
        explicit_example_points("ex51", 25)


def test_subdivided_segments_registered():
    fam = explicit_example_points("ex51", 4, subdivide=1.0)
    x2 = fam.sequences["x"][1]
    path = fam.space.geodesic(0, x2)
    assert len(path.vertices) > 2
    assert path.slack == 0.0
    assert path.max_step() <= 1.0 + 1e-9


def test_generated_spaces_pass_triangle_spot_check():
    specs = [RegionSpec("rectangle", eps=0.25, extent=2.0),
             RegionSpec("parabolic", eps=0.2, extent=2.0),
             RegionSpec("star", eps=1.0, extent=10.0, k=4),
             RegionSpec("chain", eps=0.25, extent=4.0)]
    for spec in specs:
        generate(spec).triangle_spot_check(samples=25)
