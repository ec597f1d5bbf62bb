"""Finite metric spaces, Gromov products, hyperbolicity, and short paths.

A :class:`MetricSpace` is either a weighted graph carrying its shortest-path
metric (possibly an epsilon-net of a planar region) or an explicit planar
point set carrying the Euclidean metric.  All operations are pure functions
of immutable inputs; the distance cache is a read-through cache whose
observable behaviour is identical to sequential evaluation.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _sp_dijkstra

from .errors import (
    DisconnectedError,
    InadmissibleError,
    ResolutionError,
    SpaceKindError,
    UnknownPointError,
)

TOL_EXACT = 1e-9
TOL_NET = 1e-6

#: hard cap on cached all-pairs matrices (O(n^2) memory guard)
MATRIX_GUARD = 5000

#: guard for exact four-point enumeration: |X|^4 labelings
EXACT_LABELING_GUARD = 10_000_000

GRAPH = "graph"
EXPLICIT = "explicit-euclidean"


class MetricSpace:
    """Finite point set with a total distance function.

    ``metric_kind`` is ``"graph"`` (weighted edges, Dijkstra path metric) or
    ``"explicit-euclidean"`` (planar coordinates, closed-form distances).
    ``eps`` records the net resolution for discretized regions and is 0 for
    exact metrics.  ``basepoint`` is the origin used by bouquet, sequence,
    and end constructions.
    """

    def __init__(self, metric_kind, ids, coords=None, edges=None, eps=0.0,
                 basepoint=None):
        if metric_kind not in (GRAPH, EXPLICIT):
            raise ValueError(f"unknown metric_kind {metric_kind!r}")
        ids = [int(i) for i in ids]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate point ids")
        self.metric_kind = metric_kind
        self._ids = np.array(sorted(ids), dtype=np.int64)
        self._index = {int(i): k for k, i in enumerate(self._ids)}
        self.coords = dict(coords) if coords else {}
        self.edges = [(int(a), int(b), float(w)) for a, b, w in (edges or [])]
        self.eps = float(eps)
        if metric_kind == EXPLICIT:
            missing = [i for i in ids if i not in self.coords]
            if missing:
                raise ValueError(f"explicit metric needs coords for {missing[:5]}")
            if self.edges:
                raise ValueError("explicit metric takes no edges")
        for a, b, w in self.edges:
            if a not in self._index or b not in self._index:
                raise UnknownPointError(f"edge endpoint {a if a not in self._index else b}")
            if w < 0:
                raise ValueError("negative edge weight")
        if basepoint is None and len(self._ids):
            basepoint = int(self._ids[0])
        if basepoint is not None and basepoint not in self._index:
            raise UnknownPointError(basepoint)
        self.basepoint = basepoint

        self._adj = None
        self._csr = None
        self._row_cache = {}
        self._matrix = None
        self._max_edge = max((w for _, _, w in self.edges), default=0.0)
        self._segments = {}
        self._xy = None
        if metric_kind == EXPLICIT:
            self._xy = np.array([self.coords[int(i)] for i in self._ids], dtype=float)

    # -- basic introspection -------------------------------------------------

    @property
    def ids(self):
        return self._ids

    @property
    def n_points(self):
        return len(self._ids)

    @property
    def max_edge_weight(self):
        return self._max_edge

    def has_point(self, a):
        return int(a) in self._index

    def require_point(self, a):
        if int(a) not in self._index:
            raise UnknownPointError(a)
        return int(a)

    def index_of(self, a):
        return self._index[self.require_point(a)]

    def neighbors(self, a):
        """Sorted adjacency list [(neighbor_id, weight), ...]."""
        if self._adj is None:
            adj = {int(i): [] for i in self._ids}
            for u, v, w in self.edges:
                adj[u].append((v, w))
                adj[v].append((u, w))
            for lst in adj.values():
                lst.sort()
            self._adj = adj
        return self._adj[self.require_point(a)]

    # -- distances -----------------------------------------------------------

    def _graph_csr(self):
        if self._csr is None:
            n = self.n_points
            rows, cols, data = [], [], []
            for u, v, w in self.edges:
                iu, iv = self._index[u], self._index[v]
                rows += [iu, iv]
                cols += [iv, iu]
                data += [w, w]
            self._csr = csr_matrix((data, (rows, cols)), shape=(n, n))
        return self._csr

    def distances_from(self, a):
        """Distance row from ``a``, aligned with ``self.ids``."""
        a = self.require_point(a)
        if self.metric_kind == EXPLICIT:
            row = self._row_cache.get(a)
            if row is None:
                p = self.coords[a]
                row = np.hypot(self._xy[:, 0] - p[0], self._xy[:, 1] - p[1])
                self._row_cache[a] = row
            return row
        if self._matrix is not None:
            return self._matrix[self._index[a]]
        row = self._row_cache.get(a)
        if row is None:
            row = _sp_dijkstra(self._graph_csr(), indices=self._index[a])
            self._row_cache[a] = row
        return row

    def warm_rows(self, sources):
        """Batch-compute distance rows for many sources in one pass."""
        if self.metric_kind == EXPLICIT or self._matrix is not None:
            return
        todo = sorted({self.require_point(a) for a in sources}
                      - self._row_cache.keys())
        if not todo:
            return
        idx = [self._index[a] for a in todo]
        rows = _sp_dijkstra(self._graph_csr(), indices=idx)
        if rows.ndim == 1:
            rows = rows[None, :]
        for a, row in zip(todo, rows):
            self._row_cache[a] = row

    def distance_matrix(self):
        """Full all-pairs matrix; guarded to spaces below 5,000 points."""
        if self._matrix is None:
            n = self.n_points
            if n > MATRIX_GUARD:
                raise ResolutionError(
                    f"distance matrix refused for {n} > {MATRIX_GUARD} points")
            if self.metric_kind == EXPLICIT:
                dx = self._xy[:, 0][:, None] - self._xy[:, 0][None, :]
                dy = self._xy[:, 1][:, None] - self._xy[:, 1][None, :]
                self._matrix = np.hypot(dx, dy)
            else:
                self._matrix = _sp_dijkstra(self._graph_csr())
            self._row_cache.clear()
        return self._matrix

    def d(self, a, b):
        """Metric distance; raises on disconnected graph pairs."""
        a, b = self.require_point(a), self.require_point(b)
        if a == b:
            return 0.0
        if self.metric_kind == EXPLICIT:
            pa, pb = self.coords[a], self.coords[b]
            return math.hypot(pb[0] - pa[0], pb[1] - pa[1])
        if b in self._row_cache and a not in self._row_cache and self._matrix is None:
            a, b = b, a
        val = float(self.distances_from(a)[self._index[b]])
        if math.isinf(val):
            raise DisconnectedError(f"points {a} and {b} are not connected")
        return val

    # -- paths ---------------------------------------------------------------

    def register_segment(self, vertices):
        """Record a straight-chain realization of a segment (explicit spaces)."""
        vs = tuple(self.require_point(v) for v in vertices)
        self._segments[(vs[0], vs[-1])] = vs
        self._segments[(vs[-1], vs[0])] = tuple(reversed(vs))

    def geodesic(self, x, y):
        """Shortest path from x to y as a :class:`PathRec` (slack 0).

        Graph spaces reconstruct a Dijkstra path; when several predecessors
        realize the distance the smallest point id is taken, so results are
        reproducible.  Explicit spaces return a registered straight chain if
        one exists, else the two-point segment.
        """
        x, y = self.require_point(x), self.require_point(y)
        if self.metric_kind == EXPLICIT:
            chain = self._segments.get((x, y))
            if chain is None:
                chain = (x,) if x == y else (x, y)
            return make_path(self, chain, slack=0.0)
        if x == y:
            return PathRec((x,), (0.0,), 0.0)
        row = self.distances_from(x)
        dy = row[self._index[y]]
        if math.isinf(dy):
            raise DisconnectedError(f"points {x} and {y} are not connected")
        rev = [y]
        weights = []
        cur = y
        for _ in range(self.n_points + 1):
            if cur == x:
                break
            dcur = row[self._index[cur]]
            best = None
            best_w = None
            for u, w in self.neighbors(cur):
                if abs(row[self._index[u]] + w - dcur) <= 1e-9 * (1.0 + dcur):
                    best, best_w = u, w
                    break  # neighbors sorted by id: first hit is minimal
            if best is None:
                raise DisconnectedError(f"path reconstruction stalled at {cur}")
            rev.append(best)
            weights.append(best_w)
            cur = best
        rev.reverse()
        weights.reverse()
        cum = [0.0]
        for w in weights:
            cum.append(cum[-1] + w)
        return PathRec(tuple(rev), tuple(cum), 0.0)

    # -- invariant spot checks -----------------------------------------------

    def triangle_spot_check(self, samples=50, seed=0, tol=TOL_EXACT):
        """Spot-check symmetry/positivity/triangle inequality on random triples."""
        if self.n_points < 3:
            return True
        rng = np.random.default_rng(seed)
        ids = self._ids
        for _ in range(samples):
            a, b, c = (int(ids[k]) for k in rng.choice(self.n_points, 3, replace=False))
            dab, dba = self.d(a, b), self.d(b, a)
            if abs(dab - dba) > tol or dab < -tol:
                raise AssertionError(f"symmetry violated at ({a},{b})")
            if self.d(a, c) > dab + self.d(b, c) + tol:
                raise AssertionError(f"triangle inequality violated at ({a},{b},{c})")
        return True

    # -- serialization -------------------------------------------------------

    def to_json(self):
        pts = []
        for i in self._ids:
            entry = {"id": int(i)}
            if int(i) in self.coords:
                xy = self.coords[int(i)]
                entry["xy"] = [float(xy[0]), float(xy[1])]
            pts.append(entry)
        out = {
            "schema_version": 1,
            "metric_kind": self.metric_kind,
            "points": pts,
            "eps": self.eps,
            "basepoint": self.basepoint,
        }
        if self.metric_kind == GRAPH:
            out["edges"] = [[a, b, w] for a, b, w in self.edges]
        return out

    @classmethod
    def from_json(cls, obj):
        ids = [p["id"] for p in obj["points"]]
        coords = {p["id"]: tuple(p["xy"]) for p in obj["points"] if "xy" in p}
        return cls(obj["metric_kind"], ids, coords=coords,
                   edges=obj.get("edges"), eps=obj.get("eps", 0.0),
                   basepoint=obj.get("basepoint"))


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathRec:
    """A discrete path with arclength parametrization and a shortness slack.

    ``cum_len`` holds nondecreasing arclength values starting at 0, one per
    vertex; increments equal the distances of consecutive vertices.  The
    path is certified ``slack``-short: total length <= d(first, last) + slack.
    """

    vertices: tuple
    cum_len: tuple
    slack: float = 0.0

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("empty path")
        if len(self.vertices) != len(self.cum_len):
            raise ValueError("vertices/cum_len length mismatch")
        if abs(self.cum_len[0]) > TOL_EXACT:
            raise ValueError("cum_len must start at 0")
        if self.slack < -TOL_EXACT:
            raise ValueError("negative slack")

    @property
    def length(self):
        return self.cum_len[-1]

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def index_at(self, t):
        """Index of the vertex whose cum_len is nearest t; ties go earlier."""
        if t < -TOL_EXACT or t > self.length + TOL_EXACT:
            raise InadmissibleError(f"t={t} outside [0, {self.length}]")
        t = min(max(t, 0.0), self.length)
        i = bisect_left(self.cum_len, t)
        if i == 0:
            return 0
        if i >= len(self.cum_len):
            return len(self.cum_len) - 1
        before, after = self.cum_len[i - 1], self.cum_len[i]
        return i - 1 if t - before <= after - t else i

    def point_at(self, t):
        return self.vertices[self.index_at(t)]

    def reversed_(self):
        total = self.length
        cum = tuple(total - c for c in reversed(self.cum_len))
        return PathRec(tuple(reversed(self.vertices)), cum, self.slack)

    def validate_in(self, space, tol=TOL_EXACT):
        """Check increments against the metric and the defining inequality."""
        for k in range(len(self.vertices) - 1):
            step = self.cum_len[k + 1] - self.cum_len[k]
            if abs(step - space.d(self.vertices[k], self.vertices[k + 1])) > tol:
                return False
        return self.length <= space.d(self.start, self.end) + self.slack + tol

    def max_step(self):
        if len(self.cum_len) < 2:
            return 0.0
        return max(b - a for a, b in zip(self.cum_len, self.cum_len[1:]))


def make_path(space, vertices, slack=None):
    """Build a PathRec through the given vertices; slack defaults to measured."""
    vs = tuple(space.require_point(v) for v in vertices)
    cum = [0.0]
    for a, b in zip(vs, vs[1:]):
        cum.append(cum[-1] + space.d(a, b))
    measured = max(0.0, cum[-1] - space.d(vs[0], vs[-1]))
    if slack is None:
        slack = measured
    elif measured > slack + TOL_EXACT:
        raise InadmissibleError(
            f"path of length {cum[-1]:.6g} is not {slack:.6g}-short")
    return PathRec(vs, tuple(cum), slack)


def truncate_path(space, path, t):
    """Initial subpath up to the vertex nearest arclength t.

    The slack is re-measured; subpaths of h-short paths are h-short, so it
    never exceeds the parent's certificate.
    """
    i = path.index_at(t)
    vs = path.vertices[: i + 1]
    cum = path.cum_len[: i + 1]
    return PathRec(vs, cum, max(0.0, cum[-1] - space.d(vs[0], vs[-1])))


def point_at(path, t):
    """Vertex of ``path`` nearest arclength ``t`` (ties to the earlier vertex)."""
    return path.point_at(t)


# ---------------------------------------------------------------------------
# Gromov products and hyperbolicity
# ---------------------------------------------------------------------------

def gromov_product(space, x, y, w):
    """(d(x,w) + d(y,w) - d(x,y)) / 2; nonnegative by the triangle inequality."""
    return 0.5 * (space.d(x, w) + space.d(y, w) - space.d(x, y))


def h_bound(space, x, y, z):
    """Shortness budget 1 / (1 v max pairwise distance) for a triple."""
    m = max(1.0, space.d(x, y), space.d(x, z), space.d(y, z))
    return 1.0 / m


@dataclass(frozen=True)
class HyperbolicityReport:
    delta: float
    witness_quadruple: tuple | None
    samples: int
    exact: bool
    seed: int | None = None


def _quad_deltas(D, quads):
    """Four-point defect per quadruple: half the gap of the two largest
    pairwise sums, which equals the worst labeling of the product condition."""
    a, b, c, d = quads[:, 0], quads[:, 1], quads[:, 2], quads[:, 3]
    s1 = D[a, b] + D[c, d]
    s2 = D[a, c] + D[b, d]
    s3 = D[a, d] + D[b, c]
    s = np.sort(np.stack([s1, s2, s3], axis=1), axis=1)
    return np.maximum(0.0, 0.5 * (s[:, 2] - s[:, 1]))


def four_point_delta(space, budget="exact", seed=0):
    """Least delta making the four-point condition hold over examined quadruples.

    ``budget="exact"`` enumerates all quadruples of distinct points (guarded at
    10^7 labelings); an integer budget samples quadruples from a seeded stream,
    so enlarging the budget never decreases the reported delta.
    """
    n = space.n_points
    if n == 0:
        raise InadmissibleError("empty space has no quadruples")
    if n <= 3:
        return HyperbolicityReport(0.0, None, 0, True, seed)
    ids = space.ids
    if budget == "exact":
        if n ** 4 > EXACT_LABELING_GUARD:
            raise InadmissibleError(
                f"exact enumeration refused: {n}^4 labelings exceed guard")
        D = space.distance_matrix()
        if np.isinf(D).any():
            raise DisconnectedError("space is not connected")
        quads = np.array(list(itertools.combinations(range(n), 4)), dtype=np.int64)
        deltas = _quad_deltas(D, quads)
        k = int(np.argmax(deltas))
        witness = tuple(int(ids[j]) for j in quads[k])
        return HyperbolicityReport(float(deltas[k]), witness, len(quads), True, seed)

    budget = int(budget)
    if budget < 1:
        raise InadmissibleError("sample budget must be >= 1")
    rng = np.random.default_rng(seed)
    # argpartition of a seeded random matrix picks uniform 4-subsets with a
    # prefix-stable stream: the first B' rows match a budget-B' run.
    keys = rng.random((budget, n))
    quads = np.argpartition(keys, 3, axis=1)[:, :4].astype(np.int64)
    if n <= MATRIX_GUARD:
        D = space.distance_matrix()
        deltas = _quad_deltas(D, quads)
    else:
        sources = sorted({int(ids[j]) for j in quads[:, :3].ravel()})
        space.warm_rows(sources)
        deltas = np.empty(budget)
        for k in range(budget):
            qa, qb, qc, qd = (int(ids[j]) for j in quads[k])
            s1 = space.d(qa, qb) + space.d(qc, qd)
            s2 = space.d(qa, qc) + space.d(qb, qd)
            s3 = space.d(qa, qd) + space.d(qb, qc)
            lo, mid, hi = sorted((s1, s2, s3))
            deltas[k] = max(0.0, 0.5 * (hi - mid))
    if np.isinf(deltas).any():
        raise DisconnectedError("sampled a disconnected pair")
    k = int(np.argmax(deltas))
    witness = tuple(int(ids[j]) for j in quads[k])
    return HyperbolicityReport(float(deltas[k]), witness, budget, False, seed)


# ---------------------------------------------------------------------------
# Short paths and path-based gaps
# ---------------------------------------------------------------------------

def h_short_path(space, x, y, h):
    """An h-short path from x to y in the graph metric.

    Returns a geodesic (slack 0), which certifies h-shortness for every h.
    On epsilon-nets, h below 4*eps is refused: a graph geodesic can only
    stand in for an ambient segment down to the resolution floor.
    """
    if space.metric_kind != GRAPH:
        raise SpaceKindError("h_short_path needs a graph metric")
    if h <= 0:
        raise InadmissibleError("h must be positive")
    if space.eps > 0 and h < 4.0 * space.eps - TOL_EXACT:
        raise ResolutionError(
            f"h={h} below the discretization floor 4*eps={4.0 * space.eps}")
    x, y = space.require_point(x), space.require_point(y)
    if x == y:
        return PathRec((x,), (0.0,), 0.0)
    return space.geodesic(x, y)


class VaisGap(NamedTuple):
    dist_to_path: float
    product: float


def vais_gap(space, path, z):
    """(dist(z, path vertices), <x,y;z>) for the short-path product inequalities.

    The product is at most dist + slack/2; in a delta-hyperbolic space dist is
    at most product + slack + 2*delta.
    """
    z = space.require_point(z)
    row = space.distances_from(z)
    dist = min(float(row[space.index_of(v)]) for v in path.vertices)
    prod = gromov_product(space, path.start, path.end, z)
    return VaisGap(dist, prod)


def tripod_gap(space, p1, p2, t):
    """d(p1(t), p2(t)) for two short paths sharing an origin.

    Admissible for t up to the Gromov product of the two endpoints at the
    shared origin; the caller compares against 4*delta + 2h (+ net allowance).
    """
    if p1.start != p2.start:
        raise InadmissibleError("paths must share their first vertex")
    if t < -TOL_EXACT or t > min(p1.length, p2.length) + TOL_EXACT:
        raise InadmissibleError(f"t={t} outside both arclength ranges")
    ip = gromov_product(space, p1.end, p2.end, p1.start)
    if t > ip + TOL_EXACT:
        raise InadmissibleError(f"t={t} exceeds the product bound {ip}")
    return space.d(p1.point_at(t), p2.point_at(t))


# ---------------------------------------------------------------------------
# Net allowances
# ---------------------------------------------------------------------------

def net_allowance(space):
    """Additive allowance when graph-net quantities stand in for ambient ones.

    4*eps plus twice the max edge weight for epsilon-nets; exact metrics
    (explicit coordinates, or graphs with eps = 0) get 0.
    """
    if space.metric_kind == GRAPH and space.eps > 0:
        return 4.0 * space.eps + 2.0 * space.max_edge_weight
    return 0.0


def snap_allowance(space, paths=()):
    """Allowance for values read off paths by nearest-vertex snapping.

    Adds twice the largest arclength step of the paths involved on top of the
    net allowance; vertex-aligned evaluation needs only ``net_allowance``.
    """
    step = max((p.max_step() for p in paths), default=0.0)
    if space.metric_kind == GRAPH and not paths:
        step = space.max_edge_weight
    return net_allowance(space) + 2.0 * step
