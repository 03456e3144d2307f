"""Command-line front end: simulation, evaluation and verification subcommands
with reproducible seeds and machine-readable (JSON or CSV) output.

Exit codes: 0 success, 1 usage/input error, 2 identity-suite failure.
"""

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import laws, lpp_laws, polymer, whittaker
from .grsk import PolygonalArray, diagonal_product, energy, grsk
from .quadrature import QuadratureSpec

SCHEMA = "v1"
SEED_ENV = "POLYWHIT_SEED"


def _floats(text):
    return tuple(float(v) for v in text.split(",")) if text else ()


def _scalar_out(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def _emit(doc, csv=False):
    if not csv:
        print(json.dumps(doc, default=_scalar_out))
        return
    flat = {}

    def put(prefix, val):
        if isinstance(val, dict):
            for k, v in val.items():
                put(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(val, (list, tuple)):
            flat[prefix] = ";".join(str(_scalar_out(v)) for v in val)
        else:
            flat[prefix] = _scalar_out(val)

    put("", doc)
    print(",".join(flat.keys()))
    print(",".join(str(v) for v in flat.values()))


def _geometry(args):
    return polymer.Geometry(args.geometry, n=args.n)


def _params(args):
    return polymer.PolymerParams(alpha=_floats(args.alpha), beta=_floats(args.beta),
                                 gamma=args.gamma, kind=args.kind,
                                 y=_floats(getattr(args, "y", "") or ""))


def _seed(args):
    seed = getattr(args, "seed", None)
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    return int(env) if env else 0


def cmd_grsk(args):
    with open(args.input) as fh:
        data = json.load(fh)
    exact = args.mode == "exact"
    conv = (lambda v: Fraction(v) if isinstance(v, str) else Fraction(v)) if exact else float
    rows = [[conv(v) for v in row] for row in data["rows"]]
    w = PolygonalArray.from_rows(rows, exact=exact)
    t = grsk(w)
    diags = sorted({j - i for (i, j) in t.index_set.cells})
    doc = {
        "schema": SCHEMA,
        "command": "grsk",
        "mode": args.mode,
        "input_rows": data["rows"],
        "output_rows": [[_scalar_out(v) for v in row] for row in t.to_rows()],
        "energy": _scalar_out(energy(t)),
        "tau": {str(k): _scalar_out(diagonal_product(t, k)) for k in diags},
    }
    _emit(doc, getattr(args, 'csv', False))
    return 0


def cmd_simulate(args):
    geom = _geometry(args)
    params = _params(args)
    seed = _seed(args)
    if args.target == "laplace":
        est = polymer.mc_laplace_transform(params, geom, args.r, args.samples, seed,
                                           threads=getattr(args, 'threads', 1))
    else:
        est = polymer.mc_lpp_cdf(params, geom, args.u, args.samples, seed,
                                 threads=getattr(args, 'threads', 1))
    doc = {
        "schema": SCHEMA,
        "command": "simulate",
        "target": args.target,
        "geometry": {"tag": geom.tag, "n": geom.n},
        "params": {"alpha": params.alpha, "beta": params.beta, "gamma": params.gamma,
                   "kind": params.kind},
        "r" if args.target == "laplace" else "u": args.r if args.target == "laplace" else args.u,
        "estimate": {"mean": est.mean, "stderr": est.stderr,
                     "n_samples": est.n_samples, "seed": est.seed},
    }
    _emit(doc, getattr(args, 'csv', False))
    return 0


def cmd_laplace(args):
    geom = _geometry(args)
    params = _params(args)
    query = laws.LaplaceQuery(geom, params, args.r)
    doc = {
        "schema": SCHEMA,
        "command": "laplace",
        "route": args.route,
        "geometry": {"tag": geom.tag, "n": geom.n},
        "params": {"alpha": params.alpha, "beta": params.beta, "gamma": params.gamma},
        "r": args.r,
    }
    if args.route == "whittaker":
        quad = QuadratureSpec(nodes=args.nodes) if args.nodes else None
        doc["value"] = laws.laplace_whittaker(query, quad)
    elif args.route == "contour":
        res = laws.laplace_contour(query)
        doc["value"] = res.value
        doc["imag_residual"] = res.imag_residual
        doc["boundary_ratio"] = res.boundary_ratio
        doc["step"] = res.step
    else:
        est = polymer.mc_laplace_transform(params, geom, args.r, args.samples, _seed(args),
                                           threads=getattr(args, 'threads', 1))
        doc["value"] = est.mean
        doc["estimate"] = {"mean": est.mean, "stderr": est.stderr,
                           "n_samples": est.n_samples, "seed": est.seed}
    _emit(doc, getattr(args, 'csv', False))
    return 0


def cmd_lpp_cdf(args):
    alpha = _floats(args.alpha)
    beta = _floats(args.beta)
    doc = {
        "schema": SCHEMA,
        "command": "lpp-cdf",
        "route": args.route,
        "geometry": args.geometry,
        "alpha": alpha,
        "beta": beta,
        "u": args.u,
    }
    if args.route == "closed":
        doc["value"] = lpp_laws.lpp_cdf(args.geometry, alpha, beta or None, args.u)
    elif args.route == "quadrature":
        doc["value"] = lpp_laws.lpp_cdf_schur_form(args.geometry, alpha, beta or None, args.u)
    else:
        geom = polymer.Geometry(args.geometry, n=len(alpha))
        params = polymer.PolymerParams(alpha=alpha, beta=beta, kind="exponential")
        est = polymer.mc_lpp_cdf(params, geom, args.u, args.samples, _seed(args),
                                 threads=getattr(args, 'threads', 1))
        doc["value"] = est.mean
        doc["estimate"] = {"mean": est.mean, "stderr": est.stderr,
                           "n_samples": est.n_samples, "seed": est.seed}
    _emit(doc, getattr(args, 'csv', False))
    return 0


def cmd_whittaker(args):
    params = _floats(args.params)
    x = _floats(args.x)
    nodes = args.nodes or 193
    q1 = QuadratureSpec(nodes=nodes)
    q0 = QuadratureSpec(nodes=max(nodes // 2 + 1, 8))
    if args.family == "gl":
        v1 = whittaker.whittaker_gl(params, x, q1)
        v0 = whittaker.whittaker_gl(params, x, q0)
    else:
        v1 = whittaker.whittaker_so(params, x, q1)
        v0 = whittaker.whittaker_so(params, x, q0)
    doc = {
        "schema": SCHEMA,
        "command": "whittaker",
        "family": args.family,
        "params": params,
        "x": x,
        "nodes": nodes,
        "value": v1,
        "est_error": abs(v1 - v0),
    }
    _emit(doc, getattr(args, 'csv', False))
    return 0


def cmd_verify(args):
    alpha = _floats(args.alpha)
    beta = _floats(args.beta)
    tol = getattr(args, 'tol', None)
    if args.suite == "bump-stade":
        lhs, rhs, diff = laws.bump_stade_check(alpha, beta, args.r)
        tol = tol if tol is not None else {1: 1e-10, 2: 1e-4, 3: 1e-3}[len(alpha)]
        rel = diff / abs(rhs)
        ok = rel < tol
        doc = {"identity": "bump-stade", "lhs": float(np.real(lhs)), "rhs": float(np.real(rhs)),
               "diff": rel}
    elif args.suite == "ishii-stade":
        lhs, rhs, diff = laws.ishii_stade_check(alpha, beta)
        tol = tol if tol is not None else {1: 1e-6, 2: 1e-3}[len(alpha)]
        rel = diff / abs(rhs)
        ok = rel < tol
        doc = {"identity": "ishii-stade", "lhs": float(np.real(lhs)), "rhs": float(np.real(rhs)),
               "diff": rel}
    elif args.suite == "laplace-routes":
        geom = _geometry(args)
        params = _params(args)
        query = laws.LaplaceQuery(geom, params, args.r)
        vw = laws.laplace_whittaker(query)
        vc = laws.laplace_contour(query).value
        tol = tol if tol is not None else 1e-5
        diff = abs(vw - vc)
        ok = diff < tol
        doc = {"identity": "laplace-routes", "lhs": vw, "rhs": vc, "diff": diff}
    elif args.suite == "lpp-routes":
        v1 = lpp_laws.lpp_cdf(args.geometry, alpha, beta or None, args.u)
        v2 = lpp_laws.lpp_cdf_schur_form(args.geometry, alpha, beta or None, args.u)
        tol = tol if tol is not None else 1e-6
        diff = abs(v1 - v2)
        ok = diff < tol
        doc = {"identity": "lpp-routes", "lhs": v1, "rhs": v2, "diff": diff}
    else:
        raise ValueError(f"unknown suite {args.suite!r}")
    doc = {"schema": SCHEMA, "command": "verify", "suite": args.suite,
           "params": {"alpha": alpha, "beta": beta}, **doc, "tol": tol, "pass": bool(ok)}
    _emit(doc, getattr(args, 'csv', False))
    return 0 if ok else 2


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help=f"RNG seed (overrides ${SEED_ENV})")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--csv", action="store_true", default=argparse.SUPPRESS,
                        help="emit a flat CSV table")
    p = argparse.ArgumentParser(prog="polywhit", parents=[common],
                                description="log-gamma polymers, Whittaker functions, "
                                            "and last passage percolation laws")
    sub = p.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    g = add_parser("grsk", help="apply geometric RSK to a JSON array")
    g.add_argument("--input", required=True)
    g.add_argument("--mode", choices=("exact", "float"), default="exact")
    g.set_defaults(fn=cmd_grsk)

    def add_model_args(sp, need_r=False, need_u=False):
        sp.add_argument("--geometry", required=True,
                        choices=("flat", "half-flat", "restricted", "symmetric"))
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--alpha", required=True)
        sp.add_argument("--beta", default="")
        sp.add_argument("--gamma", type=float, default=0.0)
        sp.add_argument("--kind", default="inverse-gamma",
                        choices=("inverse-gamma", "exponential", "geometric"))
        sp.add_argument("--y", default="")
        if need_r:
            sp.add_argument("-r", "--r", type=float, required=True)
        if need_u:
            sp.add_argument("-u", "--u", type=float, required=True)

    s = add_parser("simulate", help="Monte Carlo estimates")
    s.add_argument("--target", choices=("laplace", "lpp-cdf"), required=True)
    add_model_args(s)
    s.add_argument("-r", "--r", type=float, default=1.0)
    s.add_argument("-u", "--u", type=float, default=1.0)
    s.add_argument("--samples", type=int, default=100000)
    s.set_defaults(fn=cmd_simulate)

    la = add_parser("laplace", help="Laplace transform of a partition function")
    la.add_argument("--route", choices=("whittaker", "contour", "mc"), default="whittaker")
    add_model_args(la, need_r=True)
    la.add_argument("--samples", type=int, default=100000)
    la.add_argument("--nodes", type=int, default=None)
    la.set_defaults(fn=cmd_laplace)

    lc = add_parser("lpp-cdf", help="last passage percolation distribution")
    lc.add_argument("--geometry", required=True, choices=("flat", "half-flat", "restricted"))
    lc.add_argument("--alpha", required=True)
    lc.add_argument("--beta", default="")
    lc.add_argument("-u", "--u", type=float, required=True)
    lc.add_argument("--route", choices=("closed", "quadrature", "mc"), default="closed")
    lc.add_argument("--samples", type=int, default=100000)
    lc.set_defaults(fn=cmd_lpp_cdf)

    wh = add_parser("whittaker", help="point evaluation of a Whittaker function")
    wh.add_argument("--family", choices=("gl", "so"), required=True)
    wh.add_argument("--params", required=True)
    wh.add_argument("--x", required=True)
    wh.add_argument("--nodes", type=int, default=None)
    wh.set_defaults(fn=cmd_whittaker)

    v = add_parser("verify", help="run a named identity suite")
    v.add_argument("--suite", required=True,
                   choices=("bump-stade", "ishii-stade", "laplace-routes", "lpp-routes"))
    v.add_argument("--alpha", default="")
    v.add_argument("--beta", default="")
    v.add_argument("--gamma", type=float, default=0.0)
    v.add_argument("--kind", default="inverse-gamma")
    v.add_argument("--y", default="")
    v.add_argument("--geometry", default="flat",
                   choices=("flat", "half-flat", "restricted", "symmetric"))
    v.add_argument("--n", type=int, default=1)
    v.add_argument("-r", "--r", type=float, default=1.0)
    v.add_argument("-u", "--u", type=float, default=1.0)
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
