"""Generators for the concrete spaces used by the verification suites.

Discretized regions are grid-aligned epsilon-nets with king-move (8-neighbor)
adjacency, which bounds the metric distortion of the net by a factor <= 1.083
before the additive allowance.  All generation is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResolutionError
from .metric import EXPLICIT, GRAPH, MetricSpace

KING_DISTORTION = 1.083

_KING_FWD = ((1, -1), (1, 0), (1, 1), (0, 1))


@dataclass(frozen=True)
class RegionSpec:
    """Parameters for a generated space.

    ``kind`` is one of: slit-square, star, chain, parabolic, strips,
    halfplane-hyperbolic, rectangle, tree, grid.  ``eps`` is the net
    resolution and ``extent`` the truncation radius; ``k`` is the star arm
    count, ``branching``/``depth`` parametrize trees, ``width``/``height``
    the grid.
    """

    kind: str
    eps: float = 0.1
    extent: float = 10.0
    k: int = 3
    branching: int = 2
    depth: int = 4
    width: int = 8
    height: int = 8


def _grid_axis(lo, hi, eps):
    n = int(math.floor((hi - lo) / eps + 1e-9))
    return [lo + i * eps for i in range(n + 1)]


def _net_space(xs, ys, inside, eps, weight=None, basepoint_xy=(0.0, 0.0)):
    """King-move net of a planar region; vertex ids follow grid order."""
    index = {}
    coords = {}
    next_id = 0
    for ix, x in enumerate(xs):
        for iy, y in enumerate(ys):
            if inside(x, y):
                index[(ix, iy)] = next_id
                coords[next_id] = (x, y)
                next_id += 1
    if not index:
        raise ResolutionError("region empty at this eps/extent")
    edges = []
    for (ix, iy), a in index.items():
        for dx, dy in _KING_FWD:
            b = index.get((ix + dx, iy + dy))
            if b is None:
                continue
            xa, ya = coords[a]
            xb, yb = coords[b]
            w = math.hypot(xb - xa, yb - ya)
            if weight is not None:
                w = weight(0.5 * (xa + xb), 0.5 * (ya + yb), w)
            edges.append((a, b, w))
    base = min(coords, key=lambda i: (math.hypot(coords[i][0] - basepoint_xy[0],
                                                 coords[i][1] - basepoint_xy[1]), i))
    return MetricSpace(GRAPH, list(coords), coords=coords, edges=edges,
                       eps=eps, basepoint=base)


def _quality_gate(space, eps, pairs=25, seed=7):
    """Convex regions: graph distance within [chord, chord + 4*eps*(1+chord)]."""
    rng = np.random.default_rng(seed)
    ids = space.ids
    n = space.n_points
    if n < 2:
        return
    sources = sorted({int(ids[k]) for k in rng.integers(0, n, pairs)})
    space.warm_rows(sources)
    for _ in range(pairs):
        a = int(ids[rng.integers(0, n)])
        b = int(ids[rng.integers(0, n)])
        chord = math.hypot(space.coords[a][0] - space.coords[b][0],
                           space.coords[a][1] - space.coords[b][1])
        got = space.d(a, b)
        if got < chord - 1e-9 or got > chord + 4.0 * eps * (1.0 + chord) + 1e-9:
            raise ResolutionError(
                f"net quality gate failed: chord {chord:.4g}, graph {got:.4g}")


def _star_space(k, extent, eps):
    if k < 1:
        raise ValueError("star needs at least one arm")
    steps = int(math.floor(extent / eps + 1e-9))
    if steps < 1:
        raise ResolutionError("star arms empty at this eps/extent")
    coords = {0: (0.0, 0.0)}
    edges = []
    next_id = 1
    for j in range(k):
        th = 2.0 * math.pi * j / k
        prev = 0
        for i in range(1, steps + 1):
            coords[next_id] = (i * eps * math.cos(th), i * eps * math.sin(th))
            edges.append((prev, next_id, eps))
            prev = next_id
            next_id += 1
    return MetricSpace(GRAPH, list(coords), coords=coords, edges=edges,
                       eps=eps, basepoint=0)


def _tree_space(branching, depth):
    coords = {0: None}
    edges = []
    frontier = [0]
    next_id = 1
    for _ in range(depth):
        new = []
        for parent in frontier:
            for _ in range(branching):
                edges.append((parent, next_id, 1.0))
                new.append(next_id)
                next_id += 1
        frontier = new
    ids = list(range(next_id))
    return MetricSpace(GRAPH, ids, coords=None, edges=edges, eps=0.0, basepoint=0)


def _grid_space(width, height, eps):
    xs = [i * eps for i in range(width)]
    ys = [j * eps for j in range(height)]
    return _net_space(xs, ys, lambda x, y: True, eps)


def _strips_space(extent, eps):
    """Nested cone sections glued along alternating half-segments.

    Pieces live on |y| <= x; piece i spans 2^(i-1) <= x <= 2^i and is glued to
    its predecessor only along the upper (i odd) or lower (i even) half of the
    shared boundary segment, so the union-as-subset shortcut does not apply.
    """
    q = max(1, round(1.0 / eps))
    eps = 1.0 / q  # snap so the powers of two land on the grid
    n_pieces = max(1, int(math.ceil(math.log2(max(2.0, extent)))))
    index = {}
    coords = {}
    edges = []
    next_id = 0

    def piece_range(i):
        if i == 0:
            return 0.0, 1.0
        return 2.0 ** (i - 1), 2.0 ** i

    def _on_glue(boundary, y):
        # boundary b sits at x = 2^(b-1); odd b glue the upper half-segment
        x_b = 2.0 ** (boundary - 1)
        lo, hi = (0.0, x_b) if boundary % 2 == 1 else (-x_b, 0.0)
        return lo - 1e-12 <= y <= hi + 1e-12

    def key_for(i, jx, jy):
        x = jx * eps
        y = jy * eps
        lo, hi = piece_range(i)
        if i > 0 and abs(x - lo) < 1e-12 and _on_glue(i, y):
            return ("glue", i, jy)
        if i < n_pieces and abs(x - hi) < 1e-12 and _on_glue(i + 1, y):
            return ("glue", i + 1, jy)
        return (i, jx, jy)

    for i in range(n_pieces + 1):
        lo, hi = piece_range(i)
        jxs = range(round(lo / eps), round(hi / eps) + 1)
        pts = []
        for jx in jxs:
            x = jx * eps
            jy_max = int(math.floor(x / eps + 1e-9))
            for jy in range(-jy_max, jy_max + 1):
                pts.append((jx, jy))
        local = {}
        for jx, jy in pts:
            key = key_for(i, jx, jy)
            if key not in index:
                index[key] = next_id
                coords[next_id] = (jx * eps, jy * eps)
                next_id += 1
            local[(jx, jy)] = index[key]
        for (jx, jy), a in local.items():
            for dx, dy in _KING_FWD:
                b = local.get((jx + dx, jy + dy))
                if b is None:
                    continue
                xa, ya = coords[a]
                xb, yb = coords[b]
                edges.append((a, b, math.hypot(xb - xa, yb - ya)))
    seen = set()
    uniq = []
    for e in edges:
        k = (min(e[0], e[1]), max(e[0], e[1]))
        if k not in seen:
            seen.add(k)
            uniq.append(e)
    base = index[key_for(0, 0, 0)]
    return MetricSpace(GRAPH, list(coords), coords=coords, edges=uniq,
                       eps=eps, basepoint=base)


def generate(spec):
    """Build the MetricSpace described by ``spec`` (deterministic)."""
    kind, eps, extent = spec.kind, spec.eps, spec.extent
    if kind not in ("tree",) and eps <= 0:
        raise ValueError("eps must be positive")
    if kind in ("rectangle", "parabolic", "slit-square", "chain") and extent < 2 * eps:
        raise ResolutionError("extent below 2*eps")

    if kind == "rectangle":
        xs = _grid_axis(0.0, extent, eps)
        space = _net_space(xs, xs, lambda x, y: True, eps)
        _quality_gate(space, eps)
        return space

    if kind == "parabolic":
        half = math.sqrt(extent)
        xs = _grid_axis(0.0, extent, eps)
        ys = [-v for v in reversed(_grid_axis(0.0, half, eps)[1:])] + _grid_axis(0.0, half, eps)
        space = _net_space(xs, ys, lambda x, y: y * y <= x + 1e-12, eps)
        _quality_gate(space, eps)
        return space

    if kind == "slit-square":
        xs = _grid_axis(0.0, 1.0, eps)
        ys = _grid_axis(0.0, extent, eps)

        def inside(x, y):
            if abs(x) < 1e-12 and abs(y) < 1e-12:
                return True
            return 1e-12 < x < 1.0 - 1e-12 and y > 1e-12

        return _net_space(xs, ys, inside, eps)

    if kind == "star":
        return _star_space(spec.k, extent, eps)

    if kind == "chain":
        # eps must divide the unit box width, else king moves could jump the
        # walls between boxes instead of passing through the junctions
        eps = 1.0 / max(2, round(1.0 / eps))
        n_boxes = max(1, int(round(extent)))
        xs = _grid_axis(0.0, float(n_boxes), eps)
        ys = _grid_axis(0.0, 1.0, eps)

        def inside(x, y):
            if abs(y) < 1e-12 and abs(x - round(x)) < 1e-12 and -1e-12 <= x <= n_boxes + 1e-12:
                return True  # junction points (i, 0)
            return y > 1e-12 and y < 1.0 - 1e-12 and abs(x - round(x)) > 1e-12

        return _net_space(xs, ys, inside, eps)

    if kind == "strips":
        return _strips_space(extent, eps)

    if kind == "halfplane-hyperbolic":
        # fixed patch [-5,5] x [0.2,10]; the lower cutoff avoids degenerate weights
        xs = _grid_axis(-5.0, 5.0, eps)
        ys = _grid_axis(0.2, 10.0, eps)
        return _net_space(xs, ys, lambda x, y: True, eps,
                          weight=lambda xm, ym, w: w / ym,
                          basepoint_xy=(0.0, 1.0))

    if kind == "tree":
        return _tree_space(spec.branching, spec.depth)

    if kind == "grid":
        return _grid_space(spec.width, spec.height, eps)

    raise ValueError(f"unknown region kind {kind!r}")


def random_tree(n_vertices, seed, weight_range=(0.5, 2.0)):
    """Random tree: vertex i attaches to a uniform parent among 0..i-1."""
    if n_vertices < 1:
        raise ValueError("need at least one vertex")
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(1, n_vertices):
        parent = int(rng.integers(0, i))
        w = float(rng.uniform(*weight_range))
        edges.append((parent, i, w))
    return MetricSpace(GRAPH, list(range(n_vertices)), coords=None,
                       edges=edges, eps=0.0, basepoint=0)


def path_graph(n_vertices, weight=1.0):
    """Path graph 0-1-...-(n-1) with constant edge weights."""
    edges = [(i, i + 1, weight) for i in range(n_vertices - 1)]
    return MetricSpace(GRAPH, list(range(n_vertices)), coords=None,
                       edges=edges, eps=0.0, basepoint=0)


# ---------------------------------------------------------------------------
# Explicit example families (exact coordinates, no net)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExampleFamily:
    """An explicit space plus named point sequences (ids into the space)."""

    space: MetricSpace
    sequences: dict


def explicit_example_points(name, n_max, ts=None, subdivide=None):
    """Exact coordinate sequences from the worked examples.

    ``"ex51"`` yields the conjugate pair x_n = (4^n, 2^n), y_n = (4^n, -2^n);
    ``"ex52"`` yields x_n(t) = (4^n, 2^n * t) for each t in ``ts``.  With
    ``subdivide`` set, straight chains from the origin to every sequence point
    are added at roughly that spacing and registered so geodesics have
    interior vertices.  n_max <= 20 keeps all coordinates exact in doubles.
    """
    if not 1 <= n_max <= 20:
        raise ValueError("n_max out of range (doubles stay exact up to 20)")
    coords = {0: (0.0, 0.0)}
    seq_ids = {}
    next_id = 1

    def add_sequence(label, pts):
        nonlocal next_id
        ids = []
        for xy in pts:
            coords[next_id] = xy
            ids.append(next_id)
            next_id += 1
        seq_ids[label] = tuple(ids)

    if name == "ex51":
        add_sequence("x", [(4.0 ** n, 2.0 ** n) for n in range(1, n_max + 1)])
        add_sequence("y", [(4.0 ** n, -(2.0 ** n)) for n in range(1, n_max + 1)])
    elif name == "ex52":
        if ts is None:
            raise ValueError("ex52 needs the list of t values")
        for t in ts:
            if not -1.0 <= t <= 1.0:
                raise ValueError("ex52 requires -1 <= t <= 1")
            add_sequence(f"t={t:g}", [(4.0 ** n, (2.0 ** n) * t)
                                      for n in range(1, n_max + 1)])
    else:
        raise ValueError(f"unknown example family {name!r}")

    chains = {}
    if subdivide:
        for label, ids in seq_ids.items():
            for pid in ids:
                x1, y1 = coords[pid]
                dist = math.hypot(x1, y1)
                steps = max(1, int(math.ceil(dist / subdivide)))
                chain = [0]
                for k in range(1, steps):
                    coords[next_id] = (x1 * k / steps, y1 * k / steps)
                    chain.append(next_id)
                    next_id += 1
                chain.append(pid)
                chains[pid] = chain

    space = MetricSpace(EXPLICIT, list(coords), coords=coords, eps=0.0, basepoint=0)
    for chain in chains.values():
        space.register_segment(chain)
    return ExampleFamily(space, seq_ids)


def explicit_plane(points, basepoint=0, segments=()):
    """Explicit Euclidean space from id -> (x, y), with optional registered
    straight chains (each a list of ids)."""
    space = MetricSpace(EXPLICIT, list(points), coords=points, eps=0.0,
                        basepoint=basepoint)
    for chain in segments:
        space.register_segment(chain)
    return space
