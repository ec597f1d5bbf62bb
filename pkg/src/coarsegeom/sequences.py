"""Bouquet sequences, Gromov sequences, and the constructive bridges between
sequences and path bouquets.

All "tends to infinity" statements are replaced by recorded finite-scale
proxies: the growth of a Gromov sequence is certified by a nondecreasing
running minimum with a fitted intercept, and sublinear gap behaviour by the
same dyadic-ratio test the bouquet certificates use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bouquet import (
    LOOSE_RATIO_DROP,
    Bouquet,
    LittleOWitness,
    STANDARD_D,
    _dyadic_maxima,
    _fit_loose_witness,
    _verdict_from_scales,
)
from .errors import HorizonError, InadmissibleError
from .metric import TOL_EXACT, TOL_NET, gromov_product, net_allowance, snap_allowance

#: minimal growth of the running minimum for the Gromov "to infinity" proxy
GROMOV_GROWTH_MARGIN = 1.0


@dataclass(frozen=True)
class SeqClaim:
    kind: str  # bouquet-seq | loose-bouquet-seq | gromov-seq | unclassified
    c: float | None = None
    witness: LittleOWitness | None = None

    def __post_init__(self):
        kinds = ("bouquet-seq", "loose-bouquet-seq", "gromov-seq", "unclassified")
        if self.kind not in kinds:
            raise ValueError(f"unknown sequence claim {self.kind!r}")
        if self.kind == "bouquet-seq" and self.c is None:
            raise ValueError("bouquet-seq claim needs its constant")
        if self.kind == "loose-bouquet-seq" and self.witness is None:
            raise ValueError("loose claim needs its witness")


@dataclass(frozen=True)
class SeqRec:
    """Indexed point sequence with cached radial distances from the basepoint."""

    points: tuple
    radii: tuple
    claim: SeqClaim

    @classmethod
    def from_points(cls, space, points, claim=SeqClaim("unclassified")):
        pts = tuple(space.require_point(p) for p in points)
        o = space.basepoint
        space.warm_rows([o])
        radii = tuple(space.d(o, p) for p in pts)
        return cls(pts, radii, claim)

    @property
    def horizon(self):
        return len(self.points)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceValidation:
    ok: bool
    checks: dict
    worst: dict | None
    allowance: float


def _products_to_earlier(space, s):
    """<o, x_n; x_m> for all m < n (base point at the earlier element)."""
    o = space.basepoint
    space.warm_rows(s.points)
    out = []
    for m in range(s.horizon):
        for n in range(m + 1, s.horizon):
            p = gromov_product(space, o, s.points[n], s.points[m])
            out.append((m, n, p))
    return out


def _gromov_runmin(pairs, horizon):
    """Running minimum of products over indices >= k, k = 1..horizon."""
    runmin = []
    for k in range(horizon):
        vals = [p for m, n, p in pairs if min(m, n) >= k]
        if not vals:
            break
        runmin.append(min(vals))
    return runmin


def _gromov_proxy(pairs, horizon):
    """(passes, intercept, runmin): the running minimum must be nondecreasing
    and grow by at least the margin over the horizon; the fitted intercept
    c0 = max(k - runmin(k)) is recorded."""
    runmin = _gromov_runmin(pairs, horizon)
    if len(runmin) < 2:
        return False, None, runmin
    nondecreasing = all(b >= a - TOL_EXACT for a, b in zip(runmin, runmin[1:]))
    grows = runmin[-1] >= runmin[0] + GROMOV_GROWTH_MARGIN
    c0 = max((k + 1) - v for k, v in enumerate(runmin))
    return nondecreasing and grows, c0, runmin


def validate_sequence(space, s, tol=TOL_NET):
    """Check monotone radii and the claimed product bound for all m <= n."""
    checks = {"radii": True, "bound": True}
    worst = None
    allowance = net_allowance(space)
    if s.horizon < 2:
        raise InadmissibleError("sequence needs at least two points")
    for a, b in zip(s.radii, s.radii[1:]):
        if b <= a + TOL_EXACT:
            checks["radii"] = False
            worst = {"check": "radii", "detail": f"radii stall at {a:.6g} -> {b:.6g}"}
            break
    kind = s.claim.kind
    if kind in ("bouquet-seq", "loose-bouquet-seq"):
        bound = ((lambda r: s.claim.c) if kind == "bouquet-seq"
                 else (lambda r: s.claim.witness(r)))
        worst_gap = -math.inf
        for m, n, p in _products_to_earlier(space, s):
            gap = p - bound(s.radii[m])
            if gap > worst_gap:
                worst_gap = gap
                if gap > allowance + tol:
                    checks["bound"] = False
                    worst = worst or {"check": "bound", "m": m + 1, "n": n + 1,
                                      "product": p, "bound": bound(s.radii[m])}
    elif kind == "gromov-seq":
        o = space.basepoint
        space.warm_rows(s.points)
        pairs = [(m, n, gromov_product(space, s.points[m], s.points[n], o))
                 for m in range(s.horizon) for n in range(m, s.horizon)]
        passes, c0, runmin = _gromov_proxy(pairs, s.horizon)
        checks["bound"] = passes
        if not passes:
            worst = {"check": "gromov-proxy", "runmin": runmin, "intercept": c0}
    return SequenceValidation(all(checks.values()), checks, worst, allowance)


def gp_identity_residual(space, o, x, y):
    """|d(o,x) - <x,y;o> - <o,y;x>|; an algebraic identity, so <= 1e-9."""
    return abs(space.d(o, x) - gromov_product(space, x, y, o)
               - gromov_product(space, o, y, x))


# ---------------------------------------------------------------------------
# Equivalence certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeqEquivalenceCertificate:
    """Pairwise sequence verdict with the profiles it was computed from.

    ``pair_profile`` holds (m, n, gating radius, min of the two one-sided
    products); ``gromov_profile`` holds (m, n, <x_m, y_n; o>).
    """

    verdict: str
    K: float | None
    witness: LittleOWitness | None
    intercept: float | None
    pair_profile: tuple
    gromov_profile: tuple
    proxy: str
    allowance: float


def _pair_profile(space, s1, s2):
    o = space.basepoint
    space.warm_rows(set(s1.points) | set(s2.points) | {o})
    rows = []
    for m in range(s1.horizon):
        for n in range(s2.horizon):
            x, y = s1.points[m], s2.points[n]
            p = min(gromov_product(space, o, x, y), gromov_product(space, o, y, x))
            rows.append((m, n, min(s1.radii[m], s2.radii[n]), p))
    return tuple(rows)


def sequences_equivalent(space, s1, s2, mode, tol=TOL_NET):
    """Decide asymptotic / loose / Gromov equivalence of two sequences.

    asymptotic and loose use the min-product profile gated by the smaller
    radius, classified by the shared dyadic-scale proxy; gromov uses the
    running-minimum growth proxy on the cross products.
    """
    if s1.horizon < 4 or s2.horizon < 4:
        raise HorizonError("equivalence proxies need at least 4 indices")
    if mode not in ("asymptotic", "loose", "gromov"):
        raise ValueError(f"unknown mode {mode!r}")
    allowance = net_allowance(space)
    pair_profile = _pair_profile(space, s1, s2)
    o = space.basepoint
    gromov_profile = tuple(
        (m, n, gromov_product(space, s1.points[m], s2.points[n], o))
        for m in range(s1.horizon) for n in range(s2.horizon))

    if mode == "gromov":
        passes, c0, runmin = _gromov_proxy(
            [(m, n, p) for m, n, p in gromov_profile],
            min(s1.horizon, s2.horizon))
        verdict = "gromov-equivalent" if passes else "inequivalent"
        proxy = ("running minimum of cross products nondecreasing and growing "
                 f"by >= {GROMOV_GROWTH_MARGIN}; intercept fitted as max(k - runmin)")
        return SeqEquivalenceCertificate(verdict, None, None, c0,
                                         pair_profile, gromov_profile, proxy,
                                         allowance)

    profile = tuple((r, p) for _, _, r, p in pair_profile)
    scales = _dyadic_maxima(profile)
    verdict, fail = _verdict_from_scales(scales, allowance)
    proxy = ("min-product profile gated by the smaller radius; flat tail => "
             f"asymptotic, gap/scale dropping by {LOOSE_RATIO_DROP} => loose")
    if verdict == "asymptotic":
        K = max((p for _, p in profile), default=0.0)
        return SeqEquivalenceCertificate("asymptotic", K, None, None,
                                         pair_profile, gromov_profile, proxy,
                                         allowance)
    if mode == "loose" and verdict == "loosely-asymptotic":
        return SeqEquivalenceCertificate("loosely-asymptotic", None,
                                         _fit_loose_witness(profile), None,
                                         pair_profile, gromov_profile, proxy,
                                         allowance)
    return SeqEquivalenceCertificate("inequivalent", None, None, None,
                                     pair_profile, gromov_profile, proxy,
                                     allowance)


def gromov_classes(space, seqs):
    """Partition sequences by the transitive closure of pairwise Gromov
    equivalence (union-find over the E-relation verdicts)."""
    parent = list(range(len(seqs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(seqs)):
        for j in range(i + 1, len(seqs)):
            cert = sequences_equivalent(space, seqs[i], seqs[j], "gromov")
            if cert.verdict == "gromov-equivalent":
                parent[find(i)] = find(j)
    groups = {}
    for i in range(len(seqs)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


# ---------------------------------------------------------------------------
# Constructive bridges
# ---------------------------------------------------------------------------

def gromov_to_bouquet_sequence(space, g, delta_est):
    """Replace a Gromov sequence by radius-n points on short paths toward it.

    Thins the input so cross products dominate the smaller index, walks a
    1-short (here geodesic) path to each survivor, and reads the point at
    arclength n.  The output claims the bouquet-sequence constant
    (4*delta_est + 3)/2 plus the net and snapping allowances.
    """
    val = validate_sequence(space, g)
    if g.claim.kind != "gromov-seq" or not val.ok:
        raise InadmissibleError("input must validate as a Gromov sequence")
    o = space.basepoint
    space.warm_rows(list(g.points) + [o])

    chosen = []
    for idx, x in enumerate(g.points):
        k = len(chosen) + 1
        if space.d(o, x) < k - TOL_EXACT:
            continue
        if chosen and space.d(o, x) <= space.d(o, chosen[-1]) + TOL_EXACT:
            continue
        if all(gromov_product(space, x, xj, o) >= (j + 1) - TOL_EXACT
               for j, xj in enumerate(chosen)):
            chosen.append(x)
    if len(chosen) < 3:
        raise HorizonError("thinning exhausted the horizon")

    paths = [space.geodesic(o, x) for x in chosen]
    ys = []
    radii = []
    for k, path in enumerate(paths, start=1):
        y = path.point_at(min(float(k), path.length))
        r = space.d(o, y)
        if radii and r <= radii[-1] + TOL_EXACT:
            continue  # snapped onto the previous shell; drop
        ys.append(y)
        radii.append(r)
    if len(ys) < 3:
        raise HorizonError("net resolution collapsed the radius-n points")
    c_claim = (4.0 * delta_est + 3.0) / 2.0 + snap_allowance(space, paths)
    return SeqRec(tuple(ys), tuple(radii), SeqClaim("bouquet-seq", c=c_claim))


def sequence_to_bouquet(space, s, C, D=STANDARD_D):
    """Short paths from the basepoint to a bouquet sequence's points.

    The output is a loose bouquet: the gap of two paths at arclength t obeys
    a sqrt-growth witness derived from the sequence constant (via the squared
    comparison inequality with a concatenated K-short path).
    """
    val = validate_sequence(space, s)
    if s.claim.kind != "bouquet-seq" or not val.ok:
        raise InadmissibleError("input must validate as a bouquet sequence")
    o = space.basepoint

    keep = []
    for p, r in zip(s.points, s.radii):
        if not keep or r >= keep[-1][1] + 1.0 - TOL_EXACT:
            keep.append((p, r))
    if len(keep) < 2:
        raise HorizonError("radius thinning left fewer than two points")

    paths = [space.geodesic(o, p) for p, _ in keep]
    for p in paths:
        if p.slack > D(space.d(o, p.end)) + TOL_NET:
            raise InadmissibleError("cannot realize D-short paths at this resolution")
    K = 2.0 * (s.claim.c + net_allowance(space)) + 2.0
    a = math.sqrt(2.0 * K)
    witness = LittleOWitness(C + math.sqrt(2.0) + K + snap_allowance(space, paths),
                             a, 0.5, t_min=max(1.0, (a / 2.0) ** 2))
    return Bouquet(o, tuple(paths), tuple(p.length for p in paths),
                   D=D, witness=witness, base=2.0)
