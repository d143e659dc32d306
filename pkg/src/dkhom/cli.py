"""Command-line front end.

Subcommands: cat (homset / objects / subobjects), verify (orientation /
asphericity / homotopy), homology, doldkan (roundtrip / ez-check /
whitehead). Results go to stdout (optionally as JSON), progress to
stderr. Exit codes: 0 success, 1 verification failure, 2 usage or input
error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .errors import DkError
from . import doldkan
from .homology import homology_table
from .integrators import (
    Orientation,
    bousfield_kan,
    free_integrator,
    normalized_integrator,
    slice_integrator,
    theta_integrator,
    verify_asphericity,
    verify_orientation,
    xi_contraction,
)
from .chains import ChainMap, verify_homotopy
from .intlinalg import IntMatrix
from .presheaf import constant_z, load_presheaf, representable
from .shapecat import SliceCat, make_category
from .wreath import WreathCat, WreathRestrictedCat


def _default_dim():
    return int(os.environ.get("DK_MAX_DIM", "4"))


def _progress(msg):
    print(msg, file=sys.stderr)


def _emit(data, as_json, text_lines):
    if as_json:
        print(json.dumps(data, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def build_integrator(cat, name, degree, threads=1, orientation_file=None):
    """Resolve an integrator name against a category."""
    if name in ("standard", "nonnormalized", "free"):
        if isinstance(cat, WreathCat):
            return theta_integrator(cat, degree)
        if isinstance(cat, SliceCat):
            base_integ = build_integrator(cat.base, "standard", degree, threads)
            integ = slice_integrator(base_integ, cat.presheaf, slice_cat=cat)
        else:
            orient = _load_orientation(cat, orientation_file)
            integ = free_integrator(cat, orient, degree)
        return integ
    if name == "normalized":
        kinds = {"delta": "simplicial", "cube": "cubical",
                 "cube_c": "cubical_connections",
                 "globe_ref": "globular_reflexive"}
        kind = kinds.get(getattr(cat, "kind", None))
        if kind is None:
            raise DkError(f"no normalized integrator for {cat.name}")
        return normalized_integrator(kind, degree, cat=cat)
    if name == "bousfield_kan":
        return bousfield_kan(cat, degree)
    if name == "theta":
        return theta_integrator(cat, degree)
    raise DkError(f"unknown integrator {name!r}")


def _load_orientation(cat, spec):
    if spec in (None, "standard"):
        return Orientation.standard(cat)
    with open(spec) as fh:
        return Orientation.from_dict(cat, json.load(fh), name=spec)


def cmd_cat(args):
    cat = make_category(args.category, args.max_dim)
    if args.action == "homset":
        a = cat.parse_object(getattr(args, "from"))
        b = cat.parse_object(args.to)
        homs = cat.hom(a, b)
        if args.mono_only:
            homs = [f for f in homs if cat.is_mono(f)]
        _emit({"category": args.category, "from": cat.object_name(a),
               "to": cat.object_name(b), "count": len(homs),
               "morphisms": sorted(str(f.payload) for f in homs)},
              args.json,
              [f"{len(homs)} morphisms"] + [f"  {f.payload}" for f in homs])
        return 0
    if args.action == "objects":
        table = {d: [cat.object_name(a) for a in cat.objects(d)]
                 for d in range(args.max_dim + 1)}
        _emit({"category": args.category, "objects": {str(k): v for k, v in table.items()}},
              args.json,
              [f"dim {d}: {', '.join(v) if v else '-'}" for d, v in table.items()])
        return 0
    if args.action == "subobjects":
        a = cat.parse_object(args.object)
        if args.codim1:
            monos = cat.codim1_monos(a)
            _emit({"category": args.category, "object": cat.object_name(a),
                   "codim1": len(monos),
                   "faces": [{"source": cat.object_name(s), "payload": str(f.payload),
                              "sign": cat.face_sign(f)} for f, s in monos]},
                  args.json,
                  [f"{len(monos)} codimension-1 subobjects"] +
                  [f"  {cat.object_name(s)} via {f.payload} (sign {cat.face_sign(f):+d})"
                   for f, s in monos])
            return 0
        _progress(f"enumerating subobjects of {args.object} ...")
        count, reps = cat.subobjects(a, args.enum_bound)
        _emit({"category": args.category, "object": cat.object_name(a),
               "count": count},
              args.json, [f"{count} subobjects"])
        return 0
    raise DkError(f"unknown cat action {args.action}")


def cmd_verify(args):
    cat = make_category(args.category, args.max_dim)
    degree = args.max_deg if args.max_deg is not None else args.max_dim
    if args.check == "homotopy":
        if not isinstance(cat, WreathRestrictedCat):
            raise DkError("homotopy verification runs on xi categories")
        integ = build_integrator(cat, "standard", degree, args.threads)
        objects = ([cat.parse_object(args.object)] if args.object
                   else cat.all_objects())
        failures = []
        for t in objects:
            _progress(f"contracting {cat.object_name(t)} ...")
            r, s, h = xi_contraction(integ, t)
            lt = r.source
            ident = ChainMap(lt, lt, [IntMatrix.identity(rk) for rk in lt.ranks])
            sr = ChainMap(lt, lt, [s.components[k].mul(r.components[k])
                                   for k in range(len(lt.ranks))])
            bad = verify_homotopy(h, ident, sr)
            if bad is not None:
                failures.append((cat.object_name(t), bad))
        ok = not failures
        _emit({"check": "homotopy", "ok": ok,
               "failures": [{"object": o, "degree": d} for o, d in failures]},
              args.json,
              [f"homotopy: {'pass' if ok else 'FAIL'}"] +
              [f"  {o}: fails at degree {d}" for o, d in failures])
        return 0 if ok else 1
    integ = build_integrator(cat, args.integrator, degree, args.threads,
                             orientation_file=args.orientation)
    if args.check == "orientation":
        report = verify_orientation(integ, threads=args.threads)
    elif args.check == "asphericity":
        verify_orientation(integ, threads=args.threads)
        report = verify_asphericity(integ, threads=args.threads)
    else:
        raise DkError(f"unknown check {args.check}")
    lines = [f"{args.check}: {'pass' if report.ok else 'FAIL'}"]
    for a, ok in report.per_object.items():
        lines.append(f"  {cat.object_name(a)}: {'ok' if ok else 'VIOLATION'}")
    _emit(report.to_json(cat), args.json, lines)
    return 0 if report.ok else 1


def cmd_homology(args):
    cat = make_category(args.category, args.max_dim)
    degree = args.max_deg if args.max_deg is not None else args.max_dim
    integ = build_integrator(cat, args.integrator, degree + 1, args.threads,
                             orientation_file=args.orientation)
    _progress("verifying integrator ...")
    try:
        verify_orientation(integ, threads=args.threads)
        verify_asphericity(integ, threads=args.threads)
    except DkError:
        pass
    if args.presheaf:
        x = load_presheaf(cat, args.presheaf)
    elif args.representable is not None:
        x = representable(cat, cat.parse_object(args.representable))
    else:
        x = constant_z(cat)
    _progress(f"evaluating {x.name} ...")
    table = homology_table(integ, x, upto=degree)
    data = table.to_json()
    data["category"] = args.category
    data["presheaf"] = x.name
    lines = [f"H({args.category}, {x.name})  valid through degree {table.valid_through}"]
    if not table.integrator_verified:
        lines.append("  [raw complex, not homology: integrator unverified]")
    for n, g in enumerate(table.degrees):
        lines.append(f"  H_{n} = {g}")
    _emit(data, args.json, lines)
    return 0


def cmd_doldkan(args):
    rng = random.Random(args.seed)
    if args.action == "roundtrip":
        runs = {
            "simplicial": lambda: doldkan.roundtrip_simplicial(rng),
            "globular": lambda: doldkan.roundtrip_bourn(rng),
            "cubical": lambda: _cubical_trial(rng),
        }
        if args.flavor not in runs:
            raise DkError(f"unknown flavor {args.flavor}")
        passed = sum(bool(runs[args.flavor]()) for _ in range(args.trials))
        ok = passed == args.trials
        _emit({"action": "roundtrip", "flavor": args.flavor, "seed": args.seed,
               "trials": args.trials, "passed": passed, "ok": ok},
              args.json,
              [f"{args.flavor} roundtrip: {passed}/{args.trials} (seed {args.seed})"])
        return 0 if ok else 1
    if args.action == "ez-check":
        passed = 0
        for t in range(args.trials):
            _progress(f"trial {t + 1}/{args.trials}")
            x = doldkan.random_bisimplicial_abelian(rng, 3)
            _, _, equal = doldkan.eilenberg_zilber_check(x, 3)
            passed += equal
        ok = passed == args.trials
        _emit({"action": "ez-check", "seed": args.seed, "trials": args.trials,
               "passed": passed, "ok": ok},
              args.json,
              [f"Eilenberg-Zilber: {passed}/{args.trials} (seed {args.seed})"])
        return 0 if ok else 1
    if args.action == "whitehead":
        from .chains import ChainComplex
        c = ChainComplex([1, 1], [IntMatrix.from_rows([[1]])])
        x = doldkan.bourn_Binv(c, max(6, args.window + 2))
        v, e, rank, trivial = doldkan.whitehead_graph_check(x, args.window)
        _emit({"action": "whitehead", "window": args.window, "vertices": v,
               "edges": e, "cycle_rank": rank, "homology_trivial": trivial},
              args.json,
              [f"homology trivial: {'yes' if trivial else 'no'}; "
               f"cycle rank: {rank} (V={v}, E={e})"])
        return 0
    raise DkError(f"unknown doldkan action {args.action}")


def _cubical_trial(rng):
    """Brown-Higgins decomposition plus quotient comparison on one
    random cubical abelian group with connections."""
    x = doldkan.random_cubical_abelian(rng, 3)
    if not doldkan.brown_higgins_rank_check(x, 3):
        return False
    cn = doldkan.cubical_CN(x, 3)
    cs = doldkan.cubical_CN_sigma_only(x, 3)
    return all(cn.homology(k) == cs.homology(k) for k in range(3))


def make_parser():
    p = argparse.ArgumentParser(prog="dk", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--max-dim", type=int, default=_default_dim(),
                        help="truncation dimension (env DK_MAX_DIM)")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--json", action="store_true")

    pc = sub.add_parser("cat", help="category combinatorics")
    pc.add_argument("action", choices=["homset", "objects", "subobjects"])
    pc.add_argument("--category", required=True)
    pc.add_argument("--from", dest="from")
    pc.add_argument("--to")
    pc.add_argument("--object")
    pc.add_argument("--codim1", action="store_true")
    pc.add_argument("--mono-only", action="store_true")
    pc.add_argument("--enum-bound", type=int, default=None)
    common(pc)
    pc.set_defaults(fn=cmd_cat)

    pv = sub.add_parser("verify", help="integrator verification")
    pv.add_argument("check", choices=["orientation", "asphericity", "homotopy"])
    pv.add_argument("--category", required=True)
    pv.add_argument("--integrator", default="standard")
    pv.add_argument("--orientation", default=None,
                    help="orientation name or JSON file of signs")
    pv.add_argument("--object", default=None)
    pv.add_argument("--max-deg", type=int, default=None)
    common(pv)
    pv.set_defaults(fn=cmd_verify)

    ph = sub.add_parser("homology", help="homology tables")
    ph.add_argument("--category", required=True)
    ph.add_argument("--integrator", default="standard")
    ph.add_argument("--orientation", default=None)
    ph.add_argument("--presheaf", default=None)
    ph.add_argument("--constant-Z", action="store_true")
    ph.add_argument("--representable", default=None)
    ph.add_argument("--max-deg", type=int, default=None)
    common(ph)
    ph.set_defaults(fn=cmd_homology)

    pd = sub.add_parser("doldkan", help="correspondence cross-checks")
    pd.add_argument("action", choices=["roundtrip", "ez-check", "whitehead"])
    pd.add_argument("--flavor", default="simplicial")
    pd.add_argument("--seed", type=int, default=0)
    pd.add_argument("--trials", type=int, default=20)
    pd.add_argument("--window", type=int, default=2)
    common(pd)
    pd.set_defaults(fn=cmd_doldkan)
    return p


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (DkError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
