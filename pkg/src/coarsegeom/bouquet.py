"""Truncated bouquets: validation, pruning, rebasing, tightening, spreads.

A bouquet is a finite family of short paths from a common origin whose
truncation lengths increase and whose members fellow-travel within a constant
``c`` or a sublinear witness.  Everything here is a finite-scale certificate:
"asymptotic" verdicts are statements about the truncation horizon, never
about infinite objects, and every report records the horizon, grid, and
allowance used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    EquivalenceError,
    HorizonError,
    InadmissibleError,
    InvalidBouquetError,
)
from .metric import TOL_EXACT, TOL_NET, snap_allowance, truncate_path

#: multiplicative drop required of gap/t across dyadic scales for a "loose" verdict
LOOSE_RATIO_DROP = 0.75


# ---------------------------------------------------------------------------
# Short functions and little-o witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShortFunction:
    """Decreasing slack budget D with range (0,1], D(t) <= 1/t past 1, 1-Lipschitz.

    Kinds: ``standard`` D(t) = 1/(1 v 2t), ``reciprocal`` D(t) = 1/(1 v t),
    ``custom-table`` linear interpolation of sampled (t, D) pairs.
    """

    kind: str = "standard"
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("standard", "reciprocal", "custom-table"):
            raise ValueError(f"unknown short function kind {self.kind!r}")
        if self.kind == "custom-table":
            if len(self.values) < 2:
                raise ValueError("custom table needs at least two samples")
            ts = [t for t, _ in self.values]
            ds = [d for _, d in self.values]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("table abscissae must increase")
            for (t1, d1), (t2, d2) in zip(self.values, self.values[1:]):
                if d2 > d1 + TOL_EXACT:
                    raise ValueError("short function must be decreasing")
                if abs(d1 - d2) > abs(t1 - t2) + TOL_EXACT:
                    raise ValueError("short function must be 1-Lipschitz")
            for t, d in self.values:
                if not 0.0 < d <= 1.0:
                    raise ValueError("short function range is (0, 1]")
                if t > 1.0 and d > 1.0 / t + TOL_EXACT:
                    raise ValueError("short function must satisfy D(t) <= 1/t")

    def __call__(self, t):
        t = max(0.0, float(t))
        if self.kind == "standard":
            return 1.0 / max(1.0, 2.0 * t)
        if self.kind == "reciprocal":
            return 1.0 / max(1.0, t)
        ts = [v[0] for v in self.values]
        ds = [v[1] for v in self.values]
        return float(np.interp(t, ts, ds))

    def dominates_standard(self, t_grid=(0.5, 1.0, 2.0, 8.0, 64.0, 1024.0)):
        """True when D(t) <= 1/(1 v 2t) on the probe grid."""
        return all(self(t) <= 1.0 / max(1.0, 2.0 * t) + TOL_EXACT for t in t_grid)


STANDARD_D = ShortFunction("standard")


@dataclass(frozen=True)
class LittleOWitness:
    """Sublinear gap budget delta(t) = K + a*t^p with 0 <= p < 1.

    Sublinearity is certified symbolically by p < 1; the 1-Lipschitz
    requirement is enforced at t_min (the derivative decreases beyond it).
    """

    K: float
    a: float = 0.0
    p: float = 0.0
    t_min: float = 1.0

    def __post_init__(self):
        if self.K < 0 or self.a < 0:
            raise ValueError("witness coefficients must be nonnegative")
        if not 0.0 <= self.p < 1.0:
            raise ValueError("witness exponent must satisfy 0 <= p < 1")
        if self.a > 0 and self.p > 0:
            slope = self.a * self.p * self.t_min ** (self.p - 1.0)
            if slope > 1.0 + TOL_EXACT:
                raise ValueError(
                    f"witness not 1-Lipschitz at t_min={self.t_min}: slope {slope:.3g}")

    def __call__(self, t):
        return self.K + self.a * max(0.0, float(t)) ** self.p

    def shifted(self, delta_k):
        return replace(self, K=self.K + delta_k)


# ---------------------------------------------------------------------------
# Bouquets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bouquet:
    """Origin plus short paths truncated at increasing lengths.

    Exactly one of ``c`` (uniform gap bound) or ``witness`` (sublinear gap
    bound, a loose bouquet) should be set.  ``base`` records the nominal
    growth base of the length schedule.
    """

    origin: int
    paths: tuple
    lengths: tuple
    D: ShortFunction = STANDARD_D
    c: float | None = None
    witness: LittleOWitness | None = None
    base: float = 2.0

    def __post_init__(self):
        if not self.paths:
            raise ValueError("bouquet needs at least one path")
        if len(self.paths) != len(self.lengths):
            raise ValueError("paths/lengths mismatch")
        if self.c is None and self.witness is None:
            raise ValueError("either c or a loose witness is required")

    @property
    def horizon(self):
        return len(self.paths)

    @property
    def tips(self):
        return tuple(p.end for p in self.paths)

    def bound(self, t):
        return self.c if self.c is not None else self.witness(t)

    def max_step(self):
        return max(p.max_step() for p in self.paths)

    def default_grid(self):
        return max(self.lengths[0] / 8.0, 1e-6)


def bouquet_from_paths(space, origin, paths, c=None, witness=None,
                       D=STANDARD_D, base=2.0):
    origin = space.require_point(origin)
    return Bouquet(origin, tuple(paths), tuple(p.length for p in paths),
                   D=D, c=c, witness=witness, base=base)


def ray_bouquet(space, ray, lengths, c=0.0, D=STANDARD_D, base=2.0):
    """Truncations of a single path at the given lengths."""
    lengths = [l for l in lengths if l <= ray.length + TOL_EXACT]
    if len(lengths) < 2:
        raise HorizonError("ray too short for the requested truncations")
    paths = [truncate_path(space, ray, l) for l in lengths]
    return bouquet_from_paths(space, ray.start, paths, c=c, D=D, base=base)


def standard_lengths(base, horizon, cap=None):
    out = []
    for n in range(1, horizon + 1):
        val = float(base) ** n
        if cap is not None and val > cap + TOL_EXACT:
            break
        out.append(val)
    return out


def _pair_grid(limit, spacing, extra=()):
    ts = list(np.arange(0.0, limit, spacing))
    ts.extend(e for e in extra if e <= limit + TOL_EXACT)
    ts.append(limit)
    return sorted(set(round(t, 12) for t in ts if 0.0 <= t <= limit + TOL_EXACT))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BouquetValidation:
    ok: bool
    checks: dict
    first_violation: dict | None
    max_gap: float
    allowance: float
    grid: float


def validate_bouquet(space, b, grid=None):
    """Check the defining bouquet properties on a t-grid.

    Violations are verdicts, not errors: the report carries the first failing
    (m, n, t) and which of the four checks broke.  Pairwise gaps are granted
    the snapping allowance of the paths involved.
    """
    grid = grid or b.default_grid()
    checks = {"origin": True, "lengths": True, "shortness": True, "pairwise": True}
    first = None
    allowance = snap_allowance(space, b.paths)

    for k, p in enumerate(b.paths):
        if p.start != b.origin:
            checks["origin"] = False
            first = first or {"check": "origin", "n": k + 1}
        if abs(p.length - b.lengths[k]) > TOL_NET:
            checks["lengths"] = False
            first = first or {"check": "lengths", "n": k + 1,
                              "detail": "recorded length mismatch"}
    for a, bb in zip(b.lengths, b.lengths[1:]):
        if bb <= a + TOL_EXACT:
            checks["lengths"] = False
            first = first or {"check": "lengths",
                              "detail": f"not strictly increasing at {a} -> {bb}"}
            break
    for k, p in enumerate(b.paths):
        budget = b.D(space.d(b.origin, p.end))
        if p.slack > budget + TOL_NET:
            checks["shortness"] = False
            first = first or {"check": "shortness", "n": k + 1,
                              "slack": p.slack, "budget": budget}

    max_gap = 0.0
    if checks["origin"]:
        sources = set()
        pair_pts = []
        for m in range(b.horizon):
            for n in range(m + 1, b.horizon):
                ts = _pair_grid(min(b.lengths[m], b.paths[n].length), grid)
                for t in ts:
                    u = b.paths[m].point_at(t)
                    v = b.paths[n].point_at(t)
                    sources.add(u)
                    pair_pts.append((m, n, t, u, v))
        space.warm_rows(sources)
        for m, n, t, u, v in pair_pts:
            gap = space.d(u, v)
            max_gap = max(max_gap, gap)
            if gap > b.bound(t) + allowance + TOL_NET and checks["pairwise"]:
                checks["pairwise"] = False
                first = first or {"check": "pairwise", "m": m + 1, "n": n + 1,
                                  "t": t, "gap": gap, "bound": b.bound(t)}
    return BouquetValidation(all(checks.values()), checks, first, max_gap,
                             allowance, grid)


def require_valid(space, b, grid=None):
    rep = validate_bouquet(space, b, grid=grid)
    if not rep.ok:
        raise InvalidBouquetError(f"bouquet failed validation: {rep.first_violation}")
    return rep


# ---------------------------------------------------------------------------
# Pruning, tips, tightening
# ---------------------------------------------------------------------------

def prune(space, b, alphas):
    """Truncate the n-th path at alpha_n * L_n.

    With increasing pruned lengths the result is a bouquet equivalent to the
    input (constant prunings always are); otherwise validate_bouquet on the
    output reports the broken length check.
    """
    if isinstance(alphas, (int, float)):
        alphas = [float(alphas)] * b.horizon
    alphas = list(alphas)
    if not alphas:
        raise ValueError("empty pruning sequence")
    if len(alphas) < b.horizon:
        raise ValueError("need one alpha per path")
    for a in alphas:
        if not 0.0 < a <= 1.0 + TOL_EXACT:
            raise ValueError("pruning factors lie in (0, 1]")
    paths = [truncate_path(space, p, a * l)
             for p, l, a in zip(b.paths, b.lengths, alphas)]
    return replace(b, paths=tuple(paths), lengths=tuple(p.length for p in paths))


def tip_sequence(space, b, grid=None):
    """Sequence of far endpoints, claimed as a (loose) bouquet sequence.

    The claimed constant is the bouquet's own plus 3/2 (one unit for reading
    the gap bound at the tip's radius, a half for the shortness slack).
    """
    from .sequences import SeqClaim, SeqRec  # local import: module cycle

    require_valid(space, b, grid=grid)
    if b.c is not None:
        claim = SeqClaim("bouquet-seq", c=b.c + 1.5)
    else:
        claim = SeqClaim("loose-bouquet-seq", witness=b.witness.shifted(1.5))
    return SeqRec.from_points(space, b.tips, claim)


def tighten_loose_bouquet(space, b, C, grid=None):
    """Prune a loose bouquet to a uniform one with constant 1 + C.

    Selects indices n_k with L_{n_k} >= k and k * delta(L_{n_k}) <= L_{n_k},
    then prunes the k-th survivor to length k.  Earliest admissible indices
    are kept, so the construction is deterministic.
    """
    delta = b.witness if b.witness is not None else LittleOWitness(b.c)
    chosen = []
    prev = -1
    k = 1
    while True:
        nxt = None
        for n in range(prev + 1, b.horizon):
            L = b.lengths[n]
            if L >= k - TOL_EXACT and k * delta(L) <= L + TOL_EXACT:
                nxt = n
                break
        if nxt is None:
            break
        chosen.append((k, nxt))
        prev = nxt
        k += 1
    if len(chosen) < 2:
        raise HorizonError("no admissible pruning index within the horizon")
    paths = [truncate_path(space, b.paths[n], float(k)) for k, n in chosen]
    out = Bouquet(b.origin, tuple(paths), tuple(p.length for p in paths),
                  D=b.D, c=1.0 + C, base=b.base)
    return out


# ---------------------------------------------------------------------------
# Rebasing to a new origin
# ---------------------------------------------------------------------------

def _midpoint_vertex(space, path, origin, half):
    row = space.distances_from(origin)
    best, best_err = path.vertices[0], float("inf")
    for v in path.vertices:
        err = abs(float(row[space.index_of(v)]) - half)
        if err < best_err - TOL_EXACT:
            best, best_err = v, err
    return best


def rebase(space, b, o2, c2, D2, C):
    """Rebuild a uniform bouquet from a new origin, asymptotic to the input.

    Thins the input so consecutive lengths grow by at least 4*d(o,o') + 3,
    aims short paths from the new origin at the tips (when D keeps paths
    tight enough) or at radial midpoints, and prunes by
    (c2 - C)/(1 + c + C + d(o,o')) when the raw constant 1 + c + 2C + d(o,o')
    exceeds the requested c2.
    """
    if b.c is None:
        raise InadmissibleError("rebase needs a uniform (c, D)-bouquet")
    if c2 <= C:
        raise InadmissibleError("c2 must exceed the comparison constant C")
    o2 = space.require_point(o2)
    d_oo = space.d(b.origin, o2)

    chosen = []
    need = 1.0 + 4.0 * d_oo
    for k, L in enumerate(b.lengths):
        if L >= need - TOL_EXACT:
            chosen.append(k)
            need = L + 4.0 * d_oo + 3.0
    if len(chosen) < 2:
        raise HorizonError("horizon too shallow for the rebase thinning rules")

    use_tips = b.D.dominates_standard()
    targets = []
    for k in chosen:
        path = b.paths[k]
        if use_tips:
            targets.append(path.end)
        else:
            half = 0.5 * space.d(b.origin, path.end)
            targets.append(_midpoint_vertex(space, path, b.origin, half))

    space.warm_rows([o2])
    new_paths = []
    last_len = -math.inf
    for y in targets:
        lam = space.geodesic(o2, y)
        if lam.length <= last_len + TOL_EXACT:
            continue  # discrete near-tie; keep the earlier path
        new_paths.append(lam)
        last_len = lam.length
    if len(new_paths) < 2:
        raise HorizonError("rebase targets collapsed at net resolution")

    c_raw = 1.0 + b.c + 2.0 * C + d_oo
    out = Bouquet(o2, tuple(new_paths), tuple(p.length for p in new_paths),
                  D=D2, c=min(c2, c_raw), base=b.base)
    if c_raw > c2:
        a = (c2 - C) / (1.0 + b.c + C + d_oo)
        out = replace(prune(space, out, a), c=c2)
    return out


# ---------------------------------------------------------------------------
# Asymptoticity certificates and spreads
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticityCertificate:
    """Finite-scale equivalence verdict for a pair of bouquets.

    ``asymptotic``: gap profile flat across dyadic scales, bounded by K.
    ``loosely-asymptotic``: profile grows but gap/t drops across the last
    three dyadic scales and stays under the fitted witness.
    ``inequivalent``: both proxies fail at the recorded scale.
    """

    verdict: str
    K: float | None
    witness: LittleOWitness | None
    scale: float | None
    gap: float | None
    profile: tuple
    proxy: str
    allowance: float
    horizon: int


def _first_index_with_length(lengths, t):
    for k, L in enumerate(lengths):
        if L >= t - TOL_EXACT:
            return k
    return None


def asymptoticity_profile(space, b1, b2, grid=None):
    """Sampled t -> d(b1(t), b2(t)), reading each bouquet at the first path
    long enough for t (the remaining paths stay within the bouquet bound)."""
    grid = grid or min(b1.default_grid(), b2.default_grid())
    limit = min(b1.lengths[-1], b2.lengths[-1])
    extra = list(b1.lengths) + list(b2.lengths)
    ts = _pair_grid(limit, grid, extra=extra)
    pts = []
    for t in ts:
        m = _first_index_with_length(b1.lengths, t)
        n = _first_index_with_length(b2.lengths, t)
        if m is None or n is None:
            continue
        pts.append((t, b1.paths[m].point_at(t), b2.paths[n].point_at(t)))
    space.warm_rows({u for _, u, _ in pts})
    return tuple((t, space.d(u, v)) for t, u, v in pts)


def _dyadic_maxima(profile):
    """Per dyadic bin (2^j, 2^(j+1)]: (j, max gap, largest t seen).

    The largest t, not the nominal bin edge, normalizes growth ratios so a
    partially filled final bin cannot deflate them.  t = 0 gets a floor bin.
    """
    scales = {}
    for t, gap in profile:
        if t <= 0:
            j = -60
        else:
            j = int(math.floor(math.log2(t) - 1e-12))
        m, t_hi = scales.get(j, (0.0, max(t, 1e-12)))
        scales[j] = (max(m, gap), max(t_hi, t))
    return sorted((j, m, t_hi) for j, (m, t_hi) in scales.items())


def _fit_loose_witness(profile):
    small = [g for t, g in profile if t <= 1.0]
    k0 = max(small, default=0.0)
    a = 0.0
    for t, g in profile:
        if t > 1.0:
            a = max(a, (g - k0) / math.sqrt(t))
    t_min = max(1.0, (a / 2.0) ** 2)
    return LittleOWitness(k0, a, 0.5, t_min)


def _verdict_from_scales(scales, allowance):
    """Shared growth proxy: flat tail => constant; dropping gap/t ratio across
    the last three scales => sublinear; otherwise genuinely spreading.

    Ratio comparisons get a scale-relative tolerance so the net allowance
    cannot swamp them at large t.
    """
    tol_flat = allowance + TOL_NET
    if len(scales) < 2:
        return "asymptotic", None
    _, last_m, last_t = scales[-1]
    earlier = max(m for _, m, _ in scales[:-1])
    if last_m <= earlier + tol_flat:
        return "asymptotic", None
    if len(scales) >= 3:
        (_, m1, t1), (_, m2, t2), (_, m3, t3) = scales[-3:]
        r1, r2, r3 = m1 / t1, m2 / t2, m3 / t3
        if (r2 <= r1 + tol_flat / t2
                and r3 <= LOOSE_RATIO_DROP * r1 + tol_flat / t3):
            return "loosely-asymptotic", None
    return "inequivalent", (last_t, last_m)


def certify_asymptotic(space, b1, b2, grid=None):
    """Classify a bouquet pair as asymptotic / loosely asymptotic / inequivalent.

    The verdict is a dyadic-scale proxy over the shared horizon (recorded in
    the certificate); it is symmetric in the two inputs.
    """
    profile = asymptoticity_profile(space, b1, b2, grid=grid)
    allowance = snap_allowance(space, b1.paths + b2.paths)
    scales = _dyadic_maxima(profile)
    verdict, fail = _verdict_from_scales(scales, allowance)
    proxy = ("flat tail across dyadic scales => asymptotic; gap/t dropping by "
             f"{LOOSE_RATIO_DROP} across the last three scales => loose")
    horizon = min(len(b1.paths), len(b2.paths))
    K = max((g for _, g in profile), default=0.0)
    if verdict == "asymptotic":
        return AsymptoticityCertificate("asymptotic", K, None, None, None,
                                        profile, proxy, allowance, horizon)
    if verdict == "loosely-asymptotic":
        return AsymptoticityCertificate("loosely-asymptotic", None,
                                        _fit_loose_witness(profile), None, None,
                                        profile, proxy, allowance, horizon)
    scale, gap = fail
    return AsymptoticityCertificate("inequivalent", None, None, scale, gap,
                                    profile, proxy, allowance, horizon)


def equivalence_spread(space, b1, b2, C, grid=None, cert=None):
    """Max gap over all (m, n, t) for two representatives of one class.

    Both bouquets must already carry an asymptotic certificate; the caller
    asserts the spread stays within 5C + 4 plus allowance.
    """
    if cert is None:
        cert = certify_asymptotic(space, b1, b2, grid=grid)
    if cert.verdict != "asymptotic":
        raise EquivalenceError(
            f"spread needs an asymptotic pair, got {cert.verdict!r}")
    grid = grid or min(b1.default_grid(), b2.default_grid())
    best = 0.0
    jobs = []
    sources = set()
    for m in range(b1.horizon):
        for n in range(b2.horizon):
            limit = min(b1.lengths[m], b2.lengths[n])
            for t in _pair_grid(limit, grid):
                u = b1.paths[m].point_at(t)
                v = b2.paths[n].point_at(t)
                sources.add(u)
                jobs.append((u, v))
    space.warm_rows(sources)
    for u, v in jobs:
        best = max(best, space.d(u, v))
    return best


def spread_bound(C):
    """Worst-case spread between representatives of one class."""
    return 5.0 * C + 4.0


def separation_threshold(C):
    """Tip gap beyond which disjoint basic neighborhoods exist."""
    return 15.0 * C + 14.0
