"""Command-line front end: harmval <subcommand> [options]."""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import analysis as an
from . import critical as cr
from . import harness, render
from .cluster import cluster_set
from .core import FunctionSpecError, HarmonicPolynomial, parse_function
from .partition import join_probe
from .preimage import preimages, preimages_numeric, valence

DECIMALS = 6


class UsageError(Exception):
    pass


def parse_complex(s):
    """'a+bj', 'a+bi' or 'a,b'."""
    s = s.strip().replace(" ", "")
    try:
        if "," in s:
            re_, im_ = s.split(",")
            return complex(float(re_), float(im_))
        return complex(s.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


def parse_viewport(s):
    try:
        v = tuple(float(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad viewport {s!r}") from None
    if len(v) != 4 or v[0] >= v[1] or v[2] >= v[3]:
        raise argparse.ArgumentTypeError("viewport must be x0,x1,y0,y1 with x0<x1, y0<y1")
    return v


def _fmt(x):
    return f"{x:.{DECIMALS}f}"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _json(obj):
    def default(o):
        if isinstance(o, complex):
            return [o.real, o.imag]
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        return str(o)
    return json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n"


def _emit(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _function(args):
    if not args.function:
        raise UsageError("--function is required")
    try:
        return parse_function(args.function)
    except FunctionSpecError as e:
        raise UsageError(str(e)) from None


def _analysis(args, f, **kw):
    return an.analyze(f, viewport=args.viewport, cell_n=args.grid, seed=args.seed, **kw)


# -- subcommands ----------------------------------------------------------------------------

def cmd_eval(args):
    f = _function(args)
    w = complex(f(np.array([args.point]))[0])
    J = float(f.jacobian(np.array([args.point]))[0])
    if args.format == "report":
        _emit(args, _json({"z": args.point, "f": w, "jacobian": J}))
    else:
        _emit(args, _csv(["re", "im", "jacobian"], [[w.real, w.imag, J]]))
    return 0


def _solve(f, w, args):
    if isinstance(f, HarmonicPolynomial):
        return preimages(f, w)
    box = args.viewport or (-4.0, 4.0, -4.0, 4.0)
    return preimages_numeric(f, w, box)


def cmd_preimages(args):
    f = _function(args)
    ps = _solve(f, args.target, args)
    if args.format == "report":
        _emit(args, _json({"target": args.target, "verdict": str(ps.verdict),
                           "certified": ps.certified, "notes": ps.notes,
                           "solutions": [[z.real, z.imag, r] for z, r in
                                         zip(ps.solutions, ps.residuals)]}))
    else:
        # coordinates at full precision so re-evaluation meets the residual tolerance
        _emit(args, _csv(["re", "im", "residual"],
                         [[repr(float(z.real)), repr(float(z.imag)), f"{float(r):.6e}"]
                          for z, r in zip(ps.solutions, ps.residuals)]))
    return 0


def cmd_valence(args):
    f = _function(args)
    if isinstance(f, HarmonicPolynomial):
        v = valence(f, args.target)
    else:
        v = valence(f, args.target, box=args.viewport)
    if args.format == "report":
        _emit(args, _json({"target": args.target, "verdict": str(v), "count": v.count}))
    else:
        _emit(args, (str(v.count) if v.kind == "finite" else v.kind) + "\n")
    return 0 if v.kind != "unknown" else 1


def cmd_critset(args):
    f = _function(args)
    if args.format == "svg":
        a = _analysis(args, f, domain=False, folds=False)
        _emit(args, render.figure(a, "critical"))
        return 0
    vp = args.viewport or an.adaptive_viewport(f)
    cs = cr.trace(f, vp, cells=args.grid)
    if args.format == "csv":
        rows = [[i, z.real, z.imag] for i, p in enumerate(cs.polylines) for z in p]
        rows += [[-1, z.real, z.imag] for z in cs.isolated_points]
        _emit(args, _csv(["polyline", "re", "im"], rows))
    else:
        _emit(args, _json({"viewport": list(vp), "closed": list(cs.closed),
                           "polylines": [[[z.real, z.imag] for z in p] for p in cs.polylines],
                           "isolated_points": [[z.real, z.imag] for z in cs.isolated_points],
                           "diagnostics": list(cs.diagnostics)}))
    return 0


def cmd_image(args):
    f = _function(args)
    a = _analysis(args, f, domain=False, folds=False)
    if args.format == "svg":
        _emit(args, render.figure(a, "image"))
    elif args.format == "csv":
        rows = [[i, z.real, z.imag] for i, p in enumerate(a.image.polylines) for z in p]
        _emit(args, _csv(["polyline", "re", "im"], rows))
    else:
        rep = a.to_report()
        _emit(args, _json({k: rep[k] for k in ("function", "range_viewport", "cusps",
                                               "cusp_thresholds", "special_points")}))
    return 0


def cmd_cluster(args):
    f = _function(args)
    from .catalog import CATALOG

    entry = CATALOG.get(f.name) if f.name in CATALOG else None
    vp = args.viewport or (entry.range_viewport if entry else None)
    kw = {"viewport": vp} if vp else {}
    c = cluster_set(f, entry, **kw)
    if args.format == "csv":
        _emit(args, _csv(["re", "im"], [[z.real, z.imag] for z in c.points]))
    else:
        _emit(args, _json(c.to_dict()))
    return 0


def cmd_partition(args):
    f = _function(args)
    a = _analysis(args, f)
    if args.format == "svg":
        _emit(args, render.figure(a, args.side))
    elif args.format == "csv":
        comps = a.range_components if args.side == "range" else a.domain_components
        rows = [[c.id, "" if c.valence is None else str(c.valence), c.mapped_to, c.n0,
                 c.bounded, c.cells] for c in comps]
        _emit(args, _csv(["component", "valence", "mapped_to", "n0", "bounded", "cells"], rows))
    else:
        _emit(args, _json(a.to_report()))
    bad = any(c.constancy_violation for c in a.range_components)
    bad |= any(not c.jump_ok for c in a.fold_checks)
    return 1 if bad else 0


def cmd_verify(args):
    spec = harness.RandomPolySpec(seed=args.seed, count=args.count)
    try:
        res = harness.run_suite(args.suite, spec, cell_n=args.grid)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    if args.format == "report":
        _emit(args, _json(res.to_dict()))
    else:
        _emit(args, res.summary() + "\n")
    return 0 if res.ok else 1


def cmd_render(args):
    f = _function(args)
    a = _analysis(args, f, folds=False, domain=args.figure == "domain")
    try:
        _emit(args, render.figure(a, args.figure))
    except render.RenderError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def cmd_join_probe(args):
    f = _function(args)
    a = _analysis(args, f, folds=False)
    try:
        res = join_probe(f, a.domain_grid, args.components, a.critical, seed=args.seed)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    _emit(args, _json(res))
    return 0


# -- parser ---------------------------------------------------------------------------------

GLOBAL_DEFAULTS = {"function": None, "viewport": None, "grid": 512, "seed": 0, "out": None,
                   "format": None}


def _common():
    # defaults are filled in after parsing: a subparser default would
    # otherwise clobber a value given before the subcommand
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("global options")
    g.add_argument("--function", help="catalog name, JSON spec or path to a JSON spec file")
    g.add_argument("--viewport", type=parse_viewport, help="x0,x1,y0,y1")
    g.add_argument("--grid", type=int, help="cells per side (default 512)")
    g.add_argument("--seed", type=int, help="random seed (default 0)")
    g.add_argument("--out", help="write output here instead of stdout")
    g.add_argument("--format", choices=("svg", "csv", "report"))
    return p


def build_parser():
    common = _common()
    ap = argparse.ArgumentParser(prog="harmval", parents=[common],
                                 description="Valence and critical-set analysis of harmonic maps.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, fmt, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=fn, default_format=fmt)
        return p

    p = add("eval", cmd_eval, "csv", "evaluate f and its Jacobian at a point")
    p.add_argument("--point", type=parse_complex, required=True)
    p = add("preimages", cmd_preimages, "csv", "all solutions of f(z) = w")
    p.add_argument("--target", type=parse_complex, required=True)
    p = add("valence", cmd_valence, "text", "number of solutions of f(z) = w")
    p.add_argument("--target", type=parse_complex, required=True)
    add("critset", cmd_critset, "report", "trace the critical set")
    add("image", cmd_image, "report", "image of the critical set with cusps")
    add("cluster", cmd_cluster, "report", "cluster set at infinity")
    p = add("partition", cmd_partition, "report", "valence partition of range and domain")
    p.add_argument("--side", choices=("range", "domain"), default="range")
    p = add("verify", cmd_verify, "text", "run a property suite")
    p.add_argument("suite", help="one of: " + ", ".join(sorted(harness.SUITES)))
    p.add_argument("--count", type=int, default=50, help="random polynomials (default 50)")
    p = add("render", cmd_render, "svg", "write an SVG figure")
    p.add_argument("--figure", choices=("critical", "image", "range", "domain"),
                   default="image")
    p = add("join-probe", cmd_join_probe, "report",
            "univalence of adjacent domain components joined across S")
    p.add_argument("--components", type=lambda s: [int(t) for t in s.split(",")],
                   required=True, help="comma separated domain component ids")
    return ap


_VALUE_FLAGS = ("--target", "--point", "--viewport")


def _join_negative(argv):
    """'--target -1+2j' -> '--target=-1+2j' so argparse does not take it for an option."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1][:1] == "-" \
                and argv[i + 1][1:2] in set("0123456789."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def cli(argv=None):
    """Run the command line; returns 0 on success, 1 on analysis failure, 2 on usage errors."""
    ap = build_parser()
    argv = _join_negative(list(sys.argv[1:] if argv is None else argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if args.format is None:
        args.format = args.default_format
    if args.grid < 16:
        print("error: --grid must be at least 16", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, render.RenderError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli())


if __name__ == "__main__":
    main()
