"""Command-line front end: JSON I/O, report aggregation, verify-paper runner.

Exit codes: 0 success, 1 a check or criterion failed, 2 input error.
COARSE_GEOM_SEED overrides the seed of any subcommand.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .acceptance import RunConfig, verify_paper
from .bouquet import (
    Bouquet,
    LittleOWitness,
    ShortFunction,
    STANDARD_D,
    equivalence_spread,
    prune,
    rebase,
    tighten_loose_bouquet,
    tip_sequence,
    validate_bouquet,
)
from .comparison import rcat0_triangle_check
from .ends import end_chains
from .errors import CoarseGeomError
from .metric import MetricSpace, four_point_delta, make_path
from .sequences import (
    SeqClaim,
    SeqRec,
    gromov_to_bouquet_sequence,
    sequence_to_bouquet,
    sequences_equivalent,
    validate_sequence,
)
from .spaces import RegionSpec, generate
from .topology import NeighborhoodSpec, neighborhood_member, separation_check


def _input_error(message):
    sys.stderr.write(f"error: {message}\n")
    raise SystemExit(2)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _input_error(f"cannot read {path}: {exc}")


def _dump(obj, path=None):
    text = json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (set, frozenset, tuple)):
        return sorted(x) if isinstance(x, (set, frozenset)) else list(x)
    raise TypeError(f"not serializable: {type(x)}")


def load_space(path):
    try:
        return MetricSpace.from_json(_load_json(path))
    except (KeyError, ValueError, CoarseGeomError) as exc:
        _input_error(f"bad space file {path}: {exc}")


def short_function_to_json(D):
    if D.kind == "custom-table":
        return {"kind": D.kind, "values": [list(v) for v in D.values]}
    return {"kind": D.kind}


def short_function_from_json(obj):
    if obj is None:
        return STANDARD_D
    return ShortFunction(obj["kind"],
                         tuple(tuple(v) for v in obj.get("values", ())))


def bouquet_to_json(b):
    out = {
        "schema_version": 1,
        "origin": b.origin,
        "base": b.base,
        "lengths": list(b.lengths),
        "paths": [list(p.vertices) for p in b.paths],
        "D": short_function_to_json(b.D),
    }
    if b.c is not None:
        out["c"] = b.c
    if b.witness is not None:
        out["witness"] = {"K": b.witness.K, "a": b.witness.a,
                          "p": b.witness.p, "t_min": b.witness.t_min}
    return out


def bouquet_from_json(space, obj):
    paths = tuple(make_path(space, vs) for vs in obj["paths"])
    wit = obj.get("witness")
    witness = LittleOWitness(**wit) if wit else None
    return Bouquet(obj["origin"], paths, tuple(p.length for p in paths),
                   D=short_function_from_json(obj.get("D")),
                   c=obj.get("c"), witness=witness,
                   base=obj.get("base", 2.0))


def seq_to_json(s):
    out = {"schema_version": 1, "points": list(s.points),
           "claim": {"kind": s.claim.kind}}
    if s.claim.c is not None:
        out["claim"]["c"] = s.claim.c
    if s.claim.witness is not None:
        w = s.claim.witness
        out["claim"]["witness"] = {"K": w.K, "a": w.a, "p": w.p,
                                   "t_min": w.t_min}
    return out


def seq_from_json(space, obj):
    claim_obj = obj.get("claim", {"kind": "unclassified"})
    wit = claim_obj.get("witness")
    claim = SeqClaim(claim_obj["kind"], c=claim_obj.get("c"),
                     witness=LittleOWitness(**wit) if wit else None)
    return SeqRec.from_points(space, obj["points"], claim)


def load_bouquet(space, path):
    try:
        return bouquet_from_json(space, _load_json(path))
    except (KeyError, ValueError, CoarseGeomError) as exc:
        _input_error(f"bad bouquet file {path}: {exc}")


def load_seq(space, path):
    try:
        return seq_from_json(space, _load_json(path))
    except (KeyError, ValueError, CoarseGeomError) as exc:
        _input_error(f"bad sequence file {path}: {exc}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gen(args):
    spec = RegionSpec(args.kind, eps=args.eps, extent=args.extent, k=args.k,
                      branching=args.branching, depth=args.depth,
                      width=args.width, height=args.height)
    space = generate(spec)
    _dump(space.to_json(), args.output)
    return 0


def cmd_delta(args):
    space = load_space(args.space)
    budget = "exact" if args.budget == "exact" else int(args.budget)
    rep = four_point_delta(space, budget, seed=args.seed)
    _dump({"schema_version": 1, "delta": rep.delta,
           "witness_quadruple": rep.witness_quadruple, "samples": rep.samples,
           "exact": rep.exact, "seed": rep.seed}, args.output)
    return 0


def cmd_rcat0(args):
    from .metric import h_bound

    space = load_space(args.space)
    rng = np.random.default_rng(args.seed)
    ids = space.ids
    if args.triangle:
        triples = [tuple(args.triangle)]
    else:
        triples = []
        for _ in range(args.random_triangles):
            triples.append(tuple(int(ids[k])
                                 for k in rng.choice(space.n_points, 3,
                                                     replace=False)))
    reports = []
    inadmissible = 0
    for a, b, c in triples:
        paths = [space.geodesic(a, b), space.geodesic(b, c),
                 space.geodesic(c, a)]
        gate = h_bound(space, a, b, c)
        try:
            rep = rcat0_triangle_check(space, paths, C=args.C,
                                       pair_samples=args.pair_samples,
                                       seed=int(rng.integers(0, 2 ** 31)))
        except CoarseGeomError:
            inadmissible += 1
            continue
        reports.append({"vertices": [a, b, c], "c_required": rep.c_required,
                        "passed": rep.passed, "allowance": rep.allowance,
                        "gate": gate, "worst_pair": rep.worst_pair})
    worst = max((r["c_required"] for r in reports), default=0.0)
    all_pass = all(r["passed"] for r in reports)
    out = {"schema_version": 1, "C": args.C, "seed": args.seed,
           "triangles": len(reports), "inadmissible": inadmissible,
           "worst_c_required": worst, "all_passed": all_pass,
           "reports": reports}
    if args.format == "csv":
        sys.stdout.write("triangle,c_required,passed\n")
        for i, r in enumerate(reports):
            sys.stdout.write(f"{i},{r['c_required']!r},{int(r['passed'])}\n")
    else:
        _dump(out, args.output)
    return 0 if all_pass else 1


def cmd_bouquet(args):
    space = load_space(args.space)
    b = load_bouquet(space, args.bouquet)
    if args.action == "check":
        rep = validate_bouquet(space, b, grid=args.grid)
        _dump({"schema_version": 1, "ok": rep.ok, "checks": rep.checks,
               "first_violation": rep.first_violation, "max_gap": rep.max_gap,
               "allowance": rep.allowance, "grid": rep.grid}, args.output)
        return 0 if rep.ok else 1
    if args.action == "prune":
        alphas = [float(a) for a in args.alphas.split(",")]
        out = prune(space, b, alphas[0] if len(alphas) == 1 else alphas)
        _dump(bouquet_to_json(out), args.output)
        return 0
    if args.action == "tips":
        seq = tip_sequence(space, b, grid=args.grid)
        _dump(seq_to_json(seq), args.output)
        return 0
    if args.action == "tighten":
        out = tighten_loose_bouquet(space, b, C=args.C)
        _dump(bouquet_to_json(out), args.output)
        return 0
    if args.action == "rebase":
        if args.o2 is None:
            _input_error("rebase needs --o2")
        out = rebase(space, b, args.o2, c2=args.c2, D2=STANDARD_D, C=args.C)
        _dump(bouquet_to_json(out), args.output)
        return 0
    if args.action == "spread":
        if args.bouquet2 is None:
            _input_error("spread needs --bouquet2")
        b2 = load_bouquet(space, args.bouquet2)
        spread = equivalence_spread(space, b, b2, C=args.C, grid=args.grid)
        bound = 5.0 * args.C + 4.0
        _dump({"schema_version": 1, "spread": spread, "bound": bound,
               "within": spread <= bound + 1e-6}, args.output)
        return 0
    _input_error(f"unknown bouquet action {args.action}")


def cmd_seq(args):
    space = load_space(args.space)
    s = load_seq(space, args.seq)
    if args.action == "check":
        rep = validate_sequence(space, s)
        _dump({"schema_version": 1, "ok": rep.ok, "checks": rep.checks,
               "worst": rep.worst, "allowance": rep.allowance}, args.output)
        return 0 if rep.ok else 1
    if args.action == "equiv":
        if args.seq2 is None:
            _input_error("equiv needs --seq2")
        s2 = load_seq(space, args.seq2)
        cert = sequences_equivalent(space, s, s2, args.mode)
        _dump({"schema_version": 1, "verdict": cert.verdict, "K": cert.K,
               "intercept": cert.intercept, "proxy": cert.proxy,
               "allowance": cert.allowance}, args.output)
        return 0
    if args.action == "to-bouquet":
        out = sequence_to_bouquet(space, s, C=args.C)
        _dump(bouquet_to_json(out), args.output)
        return 0
    if args.action == "from-gromov":
        out = gromov_to_bouquet_sequence(space, s, delta_est=args.delta_est)
        _dump(seq_to_json(out), args.output)
        return 0
    _input_error(f"unknown seq action {args.action}")


def cmd_ends(args):
    space = load_space(args.space)
    schedule = [float(r) for r in args.schedule.split(",")]
    chains = end_chains(space, space.basepoint, schedule)
    out = {"schema_version": 1, "basepoint": space.basepoint,
           "schedule": schedule,
           "chains": [{"radii": list(ch.radii),
                       "component_ids": list(ch.component_ids),
                       "sizes": list(ch.sizes), "finite": ch.finite}
                      for ch in chains]}
    if args.format == "csv":
        sys.stdout.write("chain,radius,component_id,size,finite\n")
        for i, ch in enumerate(chains):
            for r, cid, sz in zip(ch.radii, ch.component_ids, ch.sizes):
                sys.stdout.write(f"{i},{r!r},{cid},{sz},{int(ch.finite)}\n")
    else:
        _dump(out, args.output)
    return 0


def cmd_topo(args):
    space = load_space(args.space)
    b = load_bouquet(space, args.bouquet)
    if args.action == "member":
        spec = NeighborhoodSpec(b, args.r, args.n, args.t, args.variant)
        if args.point is not None:
            y = args.point
        elif args.bouquet2 is not None:
            y = load_bouquet(space, args.bouquet2)
        else:
            _input_error("member needs --point or --bouquet2")
        verdict = neighborhood_member(space, spec, y)
        _dump({"schema_version": 1, "value": verdict.value,
               "witness": verdict.witness}, args.output)
        return 0 if verdict.value != "false" else 1
    if args.action == "separate":
        if args.bouquet2 is None:
            _input_error("separate needs --bouquet2")
        b2 = load_bouquet(space, args.bouquet2)
        rep = separation_check(space, b, b2, C=args.C)
        _dump({"schema_version": 1, "level": rep.level, "t": rep.t,
               "threshold": rep.threshold, "gap_at_t": rep.gap_at_t,
               "disjoint": rep.disjoint, "candidates": list(rep.candidates)},
              args.output)
        return 0 if rep.disjoint else 1
    _input_error(f"unknown topo action {args.action}")


def cmd_verify_paper(args):
    cfg = RunConfig(seed=args.seed, horizon=args.horizon, quick=args.quick,
                    out_dir=args.out, figures=not args.no_figures)
    _, all_passed = verify_paper(cfg)
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    par = argparse.ArgumentParser(prog="coarsegeom",
                                  description=__doc__.splitlines()[0])
    sub = par.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a space")
    p.add_argument("--kind", required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--extent", type=float, default=10.0)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--height", type=int, default=8)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("delta", help="four-point hyperbolicity")
    p.add_argument("space")
    p.add_argument("--budget", default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_delta)

    p = sub.add_parser("rcat0", help="rough comparison check on triangles")
    p.add_argument("space")
    p.add_argument("--random-triangles", type=int, default=20)
    p.add_argument("--triangle", type=int, nargs=3,
                   help="three vertex ids (instead of random sampling)")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--pair-samples", type=int, default=24)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_rcat0)

    p = sub.add_parser("bouquet", help="bouquet operations")
    p.add_argument("action", choices=("check", "prune", "rebase", "tighten",
                                      "tips", "spread"))
    p.add_argument("--space", required=True)
    p.add_argument("--bouquet", required=True)
    p.add_argument("--bouquet2")
    p.add_argument("--alphas", default="0.5")
    p.add_argument("--o2", type=int)
    p.add_argument("--c2", type=float, default=0.0)
    p.add_argument("--C", type=float, default=2.0)
    p.add_argument("--grid", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_bouquet)

    p = sub.add_parser("seq", help="sequence operations")
    p.add_argument("action", choices=("check", "equiv", "to-bouquet",
                                      "from-gromov"))
    p.add_argument("--space", required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--seq2")
    p.add_argument("--mode", choices=("asymptotic", "loose", "gromov"),
                   default="asymptotic")
    p.add_argument("--C", type=float, default=2.0)
    p.add_argument("--delta-est", type=float, default=0.0)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_seq)

    p = sub.add_parser("ends", help="end chains over a radius schedule")
    p.add_argument("space")
    p.add_argument("--schedule", default="1,2,4,8,16")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_ends)

    p = sub.add_parser("topo", help="neighborhood membership and separation")
    p.add_argument("action", choices=("member", "separate"))
    p.add_argument("--space", required=True)
    p.add_argument("--bouquet", required=True)
    p.add_argument("--bouquet2")
    p.add_argument("--point", type=int)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--variant", choices=("S", "S0", "Sprime"), default="S")
    p.add_argument("--C", type=float, default=2.0)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_topo)

    p = sub.add_parser("verify-paper", help="run the acceptance suite")
    p.add_argument("--seed", type=int, default=1729)
    p.add_argument("--horizon", type=int, default=8)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(fn=cmd_verify_paper)
    return par


def main(argv=None):
    args = build_parser().parse_args(argv)
    env_seed = os.environ.get("COARSE_GEOM_SEED")
    if env_seed is not None and hasattr(args, "seed"):
        args.seed = int(env_seed)
    try:
        return args.fn(args)
    except SystemExit:
        raise
    except CoarseGeomError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
