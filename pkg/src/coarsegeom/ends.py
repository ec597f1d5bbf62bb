"""Ends of graphs at finite radius and the map from bouquets to ends.

An end chain is a nested sequence of connected components of ball
complements over an explicit radius schedule.  Chains are always
schedule-relative: no claim is made beyond the horizon, and chains whose
component dies before the last radius are kept with a ``finite`` flag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HorizonError, InadmissibleError, SpaceKindError
from .metric import GRAPH, TOL_EXACT


@dataclass(frozen=True)
class Component:
    """Connected piece of a ball complement, labeled by its minimum point id."""

    comp_id: int
    vertices: frozenset


def components_outside_ball(space, o, r):
    """Partition {x : d(o,x) > r} into graph components (sorted by label)."""
    if space.metric_kind != GRAPH:
        raise SpaceKindError("components need graph connectivity")
    o = space.require_point(o)
    row = space.distances_from(o)
    outside = {int(i) for i in space.ids if row[space.index_of(int(i))] > r + TOL_EXACT}
    comps = []
    seen = set()
    for start in sorted(outside):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        comp = {start}
        while stack:
            v = stack.pop()
            for u, _ in space.neighbors(v):
                if u in outside and u not in seen:
                    seen.add(u)
                    comp.add(u)
                    stack.append(u)
        comps.append(Component(min(comp), frozenset(comp)))
    return comps


@dataclass(frozen=True)
class EndChain:
    """One nested component per radius of the schedule it survived."""

    basepoint: int
    radii: tuple
    component_ids: tuple
    sizes: tuple
    finite: bool

    @property
    def key(self):
        return (self.radii, self.component_ids)


def end_chains(space, o, schedule):
    """All maximal nested chains of ball-complement components.

    Chains surviving the whole schedule are the end candidates; chains whose
    component has no successor are reported with ``finite=True``.
    """
    schedule = [float(r) for r in schedule]
    if not schedule:
        raise InadmissibleError("empty radius schedule")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InadmissibleError("schedule must increase")
    o = space.require_point(o)
    levels = [components_outside_ball(space, o, r) for r in schedule]

    parents = []  # per level > 0: comp index -> parent comp index
    for lvl in range(1, len(levels)):
        links = []
        prev = levels[lvl - 1]
        for comp in levels[lvl]:
            probe = next(iter(comp.vertices))
            parent = next(i for i, pc in enumerate(prev) if probe in pc.vertices)
            links.append(parent)
        parents.append(links)

    chains = []

    def trace_back(lvl, idx):
        rev = [idx]
        for back in range(lvl, 0, -1):
            idx = parents[back - 1][rev[-1]]
            rev.append(idx)
        return list(reversed(rev))

    last = len(levels) - 1
    for idx in range(len(levels[last])):
        path = trace_back(last, idx)
        chains.append(EndChain(
            o, tuple(schedule),
            tuple(levels[k][path[k]].comp_id for k in range(len(levels))),
            tuple(len(levels[k][path[k]].vertices) for k in range(len(levels))),
            finite=False))
    for lvl in range(len(levels) - 1):
        children = set(parents[lvl])
        for idx in range(len(levels[lvl])):
            if idx in children:
                continue
            path = trace_back(lvl, idx)
            chains.append(EndChain(
                o, tuple(schedule[: lvl + 1]),
                tuple(levels[k][path[k]].comp_id for k in range(lvl + 1)),
                tuple(len(levels[k][path[k]].vertices) for k in range(lvl + 1)),
                finite=True))
    chains.sort(key=lambda ch: (len(ch.radii), ch.component_ids))
    return chains


def eta_map(space, b, chains, grid=None):
    """Send a bouquet to the unique end chain its deep samples live in.

    For each radius m, points beyond t0 = m + 3/2 + c/2 (plus a snapping pad)
    on every long-enough path must fall in one component of the complement;
    the chain matching these components on every checked radius is returned.
    """
    if b.c is None:
        raise InadmissibleError("eta map needs a uniform (c, D)-bouquet")
    if not chains:
        raise InadmissibleError("no chains supplied")
    o = chains[0].basepoint
    schedule = max((ch.radii for ch in chains), key=len)
    grid = grid or b.default_grid()
    pad = 2.0 * b.max_step()

    observed = []
    for m in schedule:
        t0 = m + 1.5 + b.c / 2.0 + pad
        pts = set()
        for path, L in zip(b.paths, b.lengths):
            if L <= t0 + TOL_EXACT:
                continue
            for t in np.arange(t0 + grid, L, grid):
                pts.add(path.point_at(float(t)))
            pts.add(path.end)
        if not pts:
            break
        comps = components_outside_ball(space, o, m)
        owner = {}
        for comp in comps:
            for v in comp.vertices:
                owner[v] = comp.comp_id
        hit = {owner.get(p) for p in pts}
        if None in hit:
            raise InadmissibleError(
                f"sampled bouquet point inside the radius-{m} ball")
        if len(hit) != 1:
            raise InadmissibleError(
                f"bouquet samples split across components at radius {m}: {hit}")
        observed.append((m, hit.pop()))
    if not observed:
        raise HorizonError("bouquet horizon too short for the schedule")

    matches = []
    for ch in chains:
        lookup = dict(zip(ch.radii, ch.component_ids))
        if all(m in lookup and lookup[m] == cid for m, cid in observed):
            matches.append(ch)
    if not matches:
        raise InadmissibleError("no supplied chain contains the bouquet samples")
    full = [ch for ch in matches if not ch.finite]
    pick = full or matches
    deepest = max(len(ch.radii) for ch in pick)
    pick = [ch for ch in pick if len(ch.radii) == deepest]
    if len(pick) > 1:
        raise InadmissibleError(
            "chains still ambiguous at this horizon; extend the bouquet or "
            "shorten the schedule")
    return pick[0]


def match_chains_across_basepoints(space, chains_a, chains_b, offset):
    """Pair chains from two basepoints by component inclusion.

    A chain U (from o) matches V (from o') when U's component at radius r
    is contained in V's component at radius r - offset; valid whenever the
    schedule gaps exceed d(o, o').
    """
    pairs = []
    for ua in chains_a:
        if ua.finite:
            continue
        comps_a = {
            r: next(c for c in components_outside_ball(space, ua.basepoint, r)
                    if c.comp_id == cid).vertices
            for r, cid in zip(ua.radii, ua.component_ids)}
        best = None
        for vb in chains_b:
            if vb.finite:
                continue
            ok = True
            for r, verts in comps_a.items():
                targets = [rr for rr in vb.radii if rr <= r - offset]
                if not targets:
                    continue
                rr = max(targets)
                comp_b = next(c for c in components_outside_ball(space, vb.basepoint, rr)
                              if c.comp_id == vb.component_ids[vb.radii.index(rr)])
                if not verts <= comp_b.vertices:
                    ok = False
                    break
            if ok:
                best = vb
                break
        pairs.append((ua, best))
    return pairs
