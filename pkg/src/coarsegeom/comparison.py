"""Euclidean comparison triangles and the rough comparison inequalities.

Comparison triangles are placed canonically in the plane; a short triangle in
the space is compared side-by-side against it, and the observed additive
defect d(u,v) - |u_bar - v_bar| is reported.  Triangles failing the shortness
gate are rejected as inadmissible, never reported as failed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleError, TriangleError
from .metric import TOL_EXACT, h_bound, net_allowance

# Kronecker (R2) low-discrepancy sequence generators
_ALPHA1 = 0.7548776662466927
_ALPHA2 = 0.5698402909980532


@dataclass(frozen=True)
class PlanarTriangle:
    """Canonical planar triangle: x at the origin, y on the nonnegative
    x-axis, z in the closed upper half-plane; side lengths (|xy|, |xz|, |yz|).
    """

    coords: tuple
    sides: tuple

    def vertex(self, i):
        return self.coords[i]

    def side_endpoints(self, side):
        """Side i runs from vertex i to vertex (i+1) mod 3."""
        return self.coords[side], self.coords[(side + 1) % 3]

    def side_length(self, side):
        p, q = self.side_endpoints(side)
        return math.hypot(q[0] - p[0], q[1] - p[1])

    def point_on_side(self, side, dist_from_start):
        p, q = self.side_endpoints(side)
        ell = self.side_length(side)
        if ell <= TOL_EXACT:
            return p
        lam = min(max(dist_from_start / ell, 0.0), 1.0)
        return (p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1]))


def build_comparison_triangle(a, b, c):
    """Place a triangle with side lengths (a, b, c) = (|xy|, |xz|, |yz|).

    The cosine at x is clamped to [-1, 1], so near-degenerate inputs produce
    collinear placements rather than errors (net distances carry noise).
    """
    if min(a, b, c) < -TOL_EXACT:
        raise InadmissibleError("side lengths must be nonnegative")
    a, b, c = max(a, 0.0), max(b, 0.0), max(c, 0.0)
    if max(a, b, c) > (a + b + c) - max(a, b, c) + TOL_EXACT:
        raise InadmissibleError(f"triangle inequality violated for {(a, b, c)}")
    if a <= TOL_EXACT or b <= TOL_EXACT:
        z = (b, 0.0)
    else:
        cos_x = (a * a + b * b - c * c) / (2.0 * a * b)
        cos_x = min(1.0, max(-1.0, cos_x))
        zx = b * cos_x
        z = (zx, math.sqrt(max(0.0, b * b - zx * zx)))
    return PlanarTriangle(((0.0, 0.0), (a, 0.0), z), (a, b, c))


@dataclass(frozen=True)
class ComparisonPoint:
    """A point on a planar side whose distances to the side's endpoints are
    bounded by the corresponding subpath lengths of the source point."""

    planar: tuple
    side_index: int
    along: float


def comparison_point(tri, side, subpath_len_from_start, subpath_len_to_end):
    """Deterministic comparison point for a point on an h-short side.

    Among all admissible positions the one at distance
    min(subpath_len_from_start, side length) from the side's start is chosen.
    """
    s1, s2 = subpath_len_from_start, subpath_len_to_end
    if s1 < -TOL_EXACT or s2 < -TOL_EXACT:
        raise InadmissibleError("subpath lengths must be nonnegative")
    ell = tri.side_length(side)
    if s1 + s2 < ell - 1e-6:
        raise InadmissibleError(
            f"subpath lengths {s1}+{s2} below the planar side length {ell}")
    along = min(max(s1, 0.0), ell)
    pt = tri.point_on_side(side, along)
    start, end = tri.side_endpoints(side)
    d_start = math.hypot(pt[0] - start[0], pt[1] - start[1])
    d_end = math.hypot(pt[0] - end[0], pt[1] - end[1])
    if d_start > s1 + 1e-6 or d_end > s2 + 1e-6:
        raise InadmissibleError("no comparison point satisfies both inequalities")
    return ComparisonPoint(pt, side, along)


# ---------------------------------------------------------------------------
# Triangles in the space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _OrientedSide:
    path: object
    forward: bool

    @property
    def length(self):
        return self.path.length

    def lens_at_index(self, k):
        """(len from side start, len to side end) of vertex k of the path."""
        cum = self.path.cum_len[k]
        rest = self.path.length - cum
        return (cum, rest) if self.forward else (rest, cum)

    def index_nearest(self, s):
        t = s if self.forward else self.path.length - s
        return self.path.index_at(min(max(t, 0.0), self.path.length))

    def vertex(self, k):
        return self.path.vertices[k]


def orient_triangle(paths):
    """Match three paths to vertices (x1, x2, x3) with pairwise shared endpoints.

    Returns (vertices, sides) where sides[i] joins vertices[i] to
    vertices[(i+1) % 3] in forward orientation.
    """
    if len(paths) != 3:
        raise TriangleError("a triangle needs exactly three paths")
    ends = [frozenset((p.start, p.end)) for p in paths]
    verts = sorted(set().union(*ends))
    if len(verts) == 3:
        x1, x2, x3 = verts
    elif len(verts) == 1 and all(len(e) == 1 for e in ends):
        x1 = x2 = x3 = verts[0]  # fully degenerate triangle
    else:
        raise TriangleError(f"paths do not span three vertices: {verts}")
    wanted = [frozenset((x1, x2)), frozenset((x2, x3)), frozenset((x3, x1))]
    sides = []
    used = set()
    for w, (u, v) in zip(wanted, ((x1, x2), (x2, x3), (x3, x1))):
        k = next((i for i, e in enumerate(ends) if e == w and i not in used), None)
        if k is None:
            raise TriangleError("paths do not pair up into a triangle")
        used.add(k)
        sides.append(_OrientedSide(paths[k], forward=paths[k].start == u))
    return (x1, x2, x3), sides


@dataclass(frozen=True)
class RcatReport:
    """Outcome of sampling the rough comparison inequality on one triangle."""

    c_required: float
    pairs_checked: int
    worst_pair: dict
    allowance: float
    passed: bool
    C: float
    seed: int


def _r2_params(seed, count):
    rng = np.random.default_rng(seed)
    u0, v0 = rng.random(2)
    k = np.arange(count)
    return (u0 + k * _ALPHA1) % 1.0, (v0 + k * _ALPHA2) % 1.0


def rcat0_triangle_check(space, paths, C, pair_samples=40, seed=0):
    """Sample pairs on distinct sides of an h-short triangle and report the
    additive constant needed on top of planar comparison distances.

    The triangle must pass the shortness gate: each side's slack at most the
    budget of its vertex triple.  Pair parameters come from a fixed
    low-discrepancy sequence per seed, so worst pairs are stable across runs.
    """
    (x1, x2, x3), sides = orient_triangle(paths)
    if x1 == x2 == x3:
        return RcatReport(0.0, 0, {}, net_allowance(space), True, C, seed)
    gate = h_bound(space, x1, x2, x3)
    for s in sides:
        if s.path.slack > gate + TOL_EXACT:
            raise InadmissibleError(
                f"slack {s.path.slack:.4g} exceeds the budget {gate:.4g}")

    d12, d13, d23 = space.d(x1, x2), space.d(x1, x3), space.d(x2, x3)
    tri = build_comparison_triangle(d12, d13, d23)
    # planar side i joins vertex i to vertex i+1: lengths (d12, d23, d13)

    us, vs = _r2_params(seed, pair_samples)
    side_pairs = ((0, 1), (0, 2), (1, 2))
    samples = []
    for k in range(pair_samples):
        ia, ib = side_pairs[k % 3]
        sa, sb = sides[ia], sides[ib]
        ka = sa.index_nearest(float(us[k]) * sa.length)
        kb = sb.index_nearest(float(vs[k]) * sb.length)
        samples.append((ia, ka, ib, kb))

    space.warm_rows([sides[ia].vertex(ka) for ia, ka, _, _ in samples])

    c_required = 0.0
    worst = {}
    for ia, ka, ib, kb in samples:
        sa, sb = sides[ia], sides[ib]
        u, v = sa.vertex(ka), sb.vertex(kb)
        ua = comparison_point(tri, ia, *sa.lens_at_index(ka))
        va = comparison_point(tri, ib, *sb.lens_at_index(kb))
        planar = math.hypot(ua.planar[0] - va.planar[0],
                            ua.planar[1] - va.planar[1])
        defect = max(0.0, space.d(u, v) - planar)
        if defect >= c_required:
            c_required = defect
            worst = {"u": u, "v": v, "sides": (ia, ib),
                     "along": (ua.along, va.along), "defect": defect}
    allowance = net_allowance(space)
    return RcatReport(c_required, len(samples), worst, allowance,
                      c_required <= C + allowance, C, seed)


def weak_rcat0_check(space, x, path, s, t, C):
    """lhs - rhs of the explicit weak comparison inequality at u = path(s).

    lhs is the squared positive part of d(x,u) - C; rhs is the Euclidean
    median combination of the squared distances to the path's endpoints.
    The caller asserts the result <= 0 (+ allowance).
    """
    y, z = path.start, path.end
    dyz = space.d(y, z)
    if not 0.0 <= t <= 1.0:
        raise InadmissibleError("t must lie in [0, 1]")
    if t * dyz > s + TOL_EXACT or (1.0 - t) * dyz > (path.length - s) + TOL_EXACT:
        raise InadmissibleError(f"(s, t)=({s}, {t}) inadmissible for this path")
    if path.slack > h_bound(space, x, y, z) + TOL_EXACT:
        raise InadmissibleError("path slack exceeds the shortness budget")
    u = path.point_at(s)
    lhs = max(0.0, space.d(x, u) - C) ** 2
    rhs = ((1.0 - t) * space.d(x, y) ** 2 + t * space.d(x, z) ** 2
           - t * (1.0 - t) * dyz ** 2)
    return lhs - rhs


def rough_convexity_gap(space, g1, g2, t):
    """d(g1(t), g2(t)) minus the convex combination of endpoint distances.

    Both paths are read at constant speed on [0,1].  The caller asserts the
    gap <= 2C (or <= C when origins or tips coincide) plus allowance.
    """
    if not 0.0 <= t <= 1.0:
        raise InadmissibleError("t must lie in [0, 1]")
    for g in (g1, g2):
        budget = 1.0 / max(1.0, space.d(g.start, g.end))
        if g.slack > budget + TOL_EXACT:
            raise InadmissibleError(
                f"slack {g.slack:.4g} exceeds the budget {budget:.4g}")
    u1 = g1.point_at(t * g1.length)
    u2 = g2.point_at(t * g2.length)
    base = ((1.0 - t) * space.d(g1.start, g2.start)
            + t * space.d(g1.end, g2.end))
    return space.d(u1, u2) - base


def fellow_traveler_gap(space, mode, p1, p2, s):
    """Fellow-traveling defect of two short paths at common arclength s.

    ``two-tips``: common origin, gap measured against the tip separation.
    ``two-origins``: common tip, equal subpath lengths from each origin, gap
    measured against the origin separation.  Caller asserts <= C + allowance.
    """
    if mode == "two-tips":
        if p1.start != p2.start:
            raise InadmissibleError("two-tips mode needs a common origin")
        o = p1.start
        gate = h_bound(space, o, p1.end, p2.end)
        for p in (p1, p2):
            if p.slack > gate + TOL_EXACT:
                raise InadmissibleError("slack exceeds the shortness budget")
        if s < -TOL_EXACT or s > min(p1.length, p2.length) + TOL_EXACT:
            raise InadmissibleError("s outside both arclength ranges")
        u1, u2 = p1.point_at(s), p2.point_at(s)
        return space.d(u1, u2) - space.d(p1.end, p2.end)

    if mode == "two-origins":
        if p1.end != p2.end:
            raise InadmissibleError("two-origins mode needs a common tip")
        x = p1.end
        o1, o2 = p1.start, p2.start
        gate = h_bound(space, o1, o2, x)
        for p in (p1, p2):
            if p.slack > gate + TOL_EXACT:
                raise InadmissibleError("slack exceeds the shortness budget")
        if s < -TOL_EXACT or s > min(p1.length, p2.length) + TOL_EXACT:
            raise InadmissibleError("s outside both arclength ranges")
        u1, u2 = p1.point_at(s), p2.point_at(s)
        for o, u, p in ((o1, u1, p1), (o2, u2, p2)):
            if space.d(o, u) > space.d(o, x) + p.slack + TOL_EXACT:
                raise InadmissibleError("sample point beyond the tip distance")
        return space.d(u1, u2) - space.d(o1, o2)

    raise ValueError(f"unknown mode {mode!r}")


def rcat0_constant_cat0():
    """Additive constant valid in every CAT(0) space."""
    return 2.0 + math.sqrt(3.0)


def rcat0_constant_hyperbolic(delta):
    """Additive constant valid in every delta-hyperbolic length space."""
    return 2.0 + 4.0 * delta
