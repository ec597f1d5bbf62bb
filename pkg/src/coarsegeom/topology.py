"""Finite-scale evaluation of the basic boundary neighborhoods.

Membership in the projection neighborhoods S / S0 / S' quantifies over
representatives of an equivalence class.  Only finitely many representatives
are ever available here, so the exists-exists variant S certifies true or
unknown, the forall-forall variant S' certifies false or unknown, and every
verdict carries the witnessing representatives.  Separation of two classes
additionally uses the representative-spread bound 5C + 4 to rule out unseen
representatives.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .bouquet import Bouquet, certify_asymptotic, separation_threshold, spread_bound
from .errors import EquivalenceError, HorizonError, InadmissibleError
from .metric import TOL_EXACT, truncate_path


@dataclass(frozen=True)
class ChildBouquet:
    """Finite-length representative of an interior point: a short path from
    the origin, extended constantly at its destination."""

    path: object

    @property
    def destination(self):
        return self.path.end

    def project(self, n, t):
        return self.path.point_at(min(t, self.path.length))

    def max_step(self):
        return self.path.max_step()


def child_of_point(space, y):
    """Wrap a point of the space as a finite-length bouquet from the basepoint."""
    return ChildBouquet(space.geodesic(space.basepoint, y))


def project(rep, n, t):
    """p_nt: the n-th member read at parameter t (clamped for children)."""
    if isinstance(rep, ChildBouquet):
        return rep.project(n, t)
    if not 1 <= n <= rep.horizon:
        raise InadmissibleError(f"representative has no path {n}")
    path = rep.paths[n - 1]
    return path.point_at(min(t, path.length))


def shift_truncate(space, b, k):
    """Equivalent representative: drop the first k paths and prune each
    survivor back to the original schedule (a pruned sub-bouquet)."""
    if k < 1 or b.horizon - k < 1:
        raise InadmissibleError("shift exceeds the horizon")
    paths = tuple(truncate_path(space, b.paths[j + k], b.lengths[j])
                  for j in range(b.horizon - k))
    return Bouquet(b.origin, paths, tuple(p.length for p in paths),
                   D=b.D, c=b.c, witness=b.witness, base=b.base)


def representative_family(space, b, n, variants=2):
    """The bouquet itself plus shift-truncated equivalents with path n intact."""
    reps = [b]
    for k in range(1, variants + 1):
        if b.horizon - k >= n:
            reps.append(shift_truncate(space, b, k))
    return reps


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Which projection neighborhood of a boundary representative to test."""

    center: Bouquet
    r: float
    n: int
    t: float
    variant: str  # "S" | "S0" | "Sprime"

    def __post_init__(self):
        if self.variant not in ("S", "S0", "Sprime"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.r <= 0:
            raise ValueError("radius must be positive")
        if not 1 <= self.n <= self.center.horizon:
            raise InadmissibleError(f"center has no path {self.n}")
        if self.t > self.center.lengths[self.n - 1] + TOL_EXACT:
            raise InadmissibleError("t exceeds the n-th truncation length")


@dataclass(frozen=True)
class MemberVerdict:
    value: str  # "true" | "false" | "unknown"
    witness: dict


def _rep_distances(space, x_reps, y_reps, n, t):
    pts = [(project(xr, n, t), project(yr, n, t), i, j)
           for i, xr in enumerate(x_reps) for j, yr in enumerate(y_reps)]
    space.warm_rows({u for u, _, _, _ in pts})
    return [(space.d(u, v), i, j) for u, v, i, j in pts]


def neighborhood_member(space, spec, y, x_reps=None, y_reps=None):
    """Three-valued membership of ``y`` in the neighborhood described by spec.

    ``y`` is a bouquet or a point id (wrapped as a finite-length child).
    Snapping tolerance of the parameter read-off is folded into the radius.
    """
    x_reps = list(x_reps or representative_family(space, spec.center, spec.n))
    if y_reps is None:
        if isinstance(y, Bouquet):
            y_reps = representative_family(space, y, spec.n)
        else:
            y_reps = [child_of_point(space, y)]
    n, t, r = spec.n, spec.t, spec.r
    pad = max(rep.max_step() for rep in list(x_reps) + list(y_reps))
    dists = _rep_distances(space, x_reps, y_reps, n, t)
    best = min(dists)
    worst = max(dists)

    if spec.variant == "S0":
        tol = 2.0 * space.eps + TOL_EXACT
        if best[0] <= tol:
            return MemberVerdict("true", {"pair": best[1:], "d": best[0], "tol": tol})
        return MemberVerdict("unknown", {"closest": best[0], "tol": tol})
    if spec.variant == "S":
        if best[0] < r + pad:
            return MemberVerdict("true", {"pair": best[1:], "d": best[0], "pad": pad})
        return MemberVerdict("unknown", {"closest": best[0], "pad": pad})
    # Sprime: a single far pair refutes the forall-forall condition
    if worst[0] >= r + pad:
        return MemberVerdict("false", {"pair": worst[1:], "d": worst[0], "pad": pad})
    return MemberVerdict("unknown", {"farthest": worst[0], "pad": pad})


# ---------------------------------------------------------------------------
# Separation of two boundary classes
# ---------------------------------------------------------------------------

def sprime_containment_bound(C):
    """Radius at which exact-coincidence membership forces the forall-forall
    variant: S0(x;n,t) sits inside S'(x, 10C+8; n,t).

    Assertable on supplied representative families only; no completeness
    claim is made about unseen representatives.
    """
    return 10.0 * C + 8.0


def check_s0_inside_sprime(space, spec, y, C, x_reps=None, y_reps=None):
    """Verify the containment on the supplied families: when y is certified
    an exact-coincidence member, no representative pair may sit 10C+8 apart."""
    s0 = neighborhood_member(space, replace(spec, variant="S0"), y,
                             x_reps=x_reps, y_reps=y_reps)
    if s0.value != "true":
        return True  # nothing to check: y is not a certified S0 member
    wide = replace(spec, variant="Sprime", r=sprime_containment_bound(C))
    return neighborhood_member(space, wide, y,
                               x_reps=x_reps, y_reps=y_reps).value != "false"


@dataclass(frozen=True)
class SeparationReport:
    level: int            # n of the neighborhoods S(.,1;n,t)
    t: float              # evaluation parameter L_{n-1}
    threshold: float      # 15C + 14
    gap_at_t: float
    disjoint: bool
    candidates: tuple
    pad: float
    C: float


def separation_check(space, b1, b2, C, extra_candidates=()):
    """Exhibit disjoint unit-radius neighborhoods of two inequivalent classes.

    Scans for the first level whose tips separate by 15C + 14 (plus snapping
    pad), then verifies over representative families that no candidate can
    lie in both neighborhoods, granting unseen representatives the spread
    bound 5C + 4.
    """
    cert = certify_asymptotic(space, b1, b2)
    if cert.verdict != "inequivalent":
        raise EquivalenceError(
            f"separation needs inequivalent classes, certificate says {cert.verdict!r}")
    thr = separation_threshold(C)
    pad = 2.0 * max(b1.max_step(), b2.max_step())
    horizon = min(b1.horizon, b2.horizon)

    level = None
    for m in range(1, horizon):  # need level m tips plus paths at n = m + 1
        gap = space.d(b1.paths[m - 1].end, b2.paths[m - 1].end)
        if gap >= thr + pad:
            level = m
            break
    if level is None:
        raise HorizonError(
            "tip gap below the separation threshold at every scale in horizon")
    n = level + 1
    t = min(b1.lengths[level - 1], b2.lengths[level - 1])
    gap_at_t = space.d(project(b1, n, t), project(b2, n, t))

    x_reps = representative_family(space, b1, n)
    y_reps = representative_family(space, b2, n)
    cover = 2.0 * spread_bound(C)  # both reps may drift 5C+4 from canonical
    rows = []
    disjoint = True
    candidates = ([("class-1", rep) for rep in x_reps]
                  + [("class-2", rep) for rep in y_reps]
                  + [("extra", c if isinstance(c, (Bouquet, ChildBouquet))
                      else child_of_point(space, c)) for c in extra_candidates])
    for label, z in candidates:
        z_reps = [z]
        dU = min(d for d, _, _ in _rep_distances(space, x_reps, z_reps, n, t))
        dV = min(d for d, _, _ in _rep_distances(space, y_reps, z_reps, n, t))
        in_u = dU < 1.0 + cover + pad
        in_v = dV < 1.0 + cover + pad
        if in_u and in_v:
            disjoint = False
        rows.append({"candidate": label, "d_to_U": dU, "d_to_V": dV,
                     "possibly_in_U": in_u, "possibly_in_V": in_v})
    return SeparationReport(n, t, thr, gap_at_t, disjoint, tuple(rows), pad, C)
