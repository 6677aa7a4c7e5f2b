"""Command-line front end.

Subcommands: cosets, fixset, separation, vinberg, specfun, restriction,
maass, nodal, report.  Data goes to stdout (or --out) as JSON or CSV
with every float printed to 12 significant digits, so identical
invocations produce identical bytes; a one-line summary goes to stderr.
Exit codes: 0 success, 1 computation error, 2 usage error.

REFLECTAL_THREADS caps the BLAS/OpenMP pools; results are independent
of the setting.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

__all__ = ["main", "build_parser", "canonical_json"]


def _round12(obj):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return float(format(obj, ".12g"))
    if isinstance(obj, complex):
        return {"re": float(format(obj.real, ".12g")),
                "im": float(format(obj.imag, ".12g"))}
    if isinstance(obj, dict):
        return {str(k): _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        try:
            return _round12(obj.item())
        except (AttributeError, ValueError):
            pass
    if obj is None or isinstance(obj, (int, str)):
        return obj
    return str(obj)


def canonical_json(obj) -> str:
    """12-significant-digit floats, sorted keys: diffable output."""
    return json.dumps(_round12(obj), indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(msg: str) -> None:
    print(msg, file=sys.stderr)


def _g(x: float) -> str:
    return format(float(x), ".12g")


# -- subcommand handlers -----------------------------------------------------

def _cmd_cosets(args) -> int:
    from .congruence import CosetTable, in_gamma0
    table = CosetTable.generic(args.level)
    payload = {
        "level": args.level,
        "count": len(table),
        "reps": [list(m.entries()) for m in table.reps],
    }
    if args.check:
        reps = table.reps
        for i in range(len(reps)):
            inv = reps[i].inverse()
            for j in range(i + 1, len(reps)):
                if in_gamma0((reps[j] @ inv).canonical(), args.level):
                    raise RuntimeError(
                        f"cosets {i} and {j} are equivalent at level "
                        f"{args.level}")
        payload["pairwise_inequivalent"] = True
    _emit(canonical_json(payload), args.out)
    _summary(f"cosets: level {args.level}, {len(table)} representatives"
             + (", pairwise check passed" if args.check else ""))
    return 0


def _cmd_fixset(args) -> int:
    from .congruence import CosetTable
    from .fixedsets import fixed_set_prime, fixed_set_semiprime
    if args.pq:
        p, q = args.pq
        fs = fixed_set_semiprime(p, q)
        table = CosetTable.semiprime_level(p, q)
    else:
        fs = fixed_set_prime(args.level)
        table = CosetTable.prime_level(args.level)
    fs.validate()
    _emit(canonical_json(fs.serialize()), args.out)
    if args.svg:
        from .svg import fundamental_domain_scene
        fundamental_domain_scene(fs, table).write(args.svg)
    _summary(f"fixset: level {fs.level}, {len(fs.arcs)} arcs, "
             f"{len(fs.circles)} circles, separating={fs.separating}"
             + (f", svg -> {args.svg}" if args.svg else ""))
    return 0


def _cmd_separation(args) -> int:
    import sympy as sp
    from .fixedsets import HalfTileGraph, inverse_symmetric
    lines = ["p,separating,witness_l"]
    marked = []
    for p in sp.primerange(2, args.max + 1):
        p = int(p)
        sep = HalfTileGraph.build(p).separates()
        # a non-separating level is certified by a tile gluing that
        # crosses the mirror: l and its inverse in the same half window
        witness = ""
        if not sep:
            half = (p - 1) // 2
            for l in range(2, half + 1):
                if 2 <= inverse_symmetric(p, l) <= half:
                    witness = str(l)
                    break
            if not witness:
                raise RuntimeError(f"no crossing witness at p={p}")
        if sep:
            marked.append(p)
        lines.append(f"{p},{int(sep)},{witness}")
    _emit("\n".join(lines) + "\n", args.out)
    _summary(f"separation: primes up to {args.max}, separating set "
             f"{marked}")
    return 0


def _cmd_vinberg(args) -> int:
    from .vinberg import (TernaryForm, build_group_p3, build_group_p7,
                          vinberg_roots)
    a1, a2, a3 = args.form
    if (a1, a2, a3) == (3, 1, 1):
        group = build_group_p3()
    elif (a1, a2, a3) == (7, 1, 1):
        group = build_group_p7()
    else:
        group = None
    if group is not None:
        payload = group.serialize()
        payload["form"] = [a1, a2, a3]
        svg_path = args.svg or f"vinberg_{a1}_{a2}_{a3}.svg"
        from .svg import vinberg_scene
        vinberg_scene(group).write(svg_path)
        note = f", svg -> {svg_path}"
        n_roots = len(group.roots)
    else:
        roots = vinberg_roots(TernaryForm(a1, a2, a3))
        payload = {"form": [a1, a2, a3],
                   "roots": [r.serialize() for r in roots],
                   "note": "chamber assembly implemented for the two "
                           "compact quotients (3,1,1) and (7,1,1) only"}
        note = ""
        n_roots = len(roots)
    _emit(canonical_json(payload), args.out)
    _summary(f"vinberg: form (-{a1},{a2},{a3}), {n_roots} roots{note}")
    return 0


# calibrated accuracy envelopes (validated in the test suite), not
# per-point computed bounds
_SPECFUN_ENVELOPE = {"kbessel": 3e-11, "mehler": 1e-9, "conical": 1e-8}


def _cmd_specfun(args) -> int:
    import numpy as np
    from . import specfun as sf
    fn = args.fn
    par = args.params
    rows: List[str] = []
    if fn == "kbessel":
        if len(par) < 2:
            raise ValueError("kbessel needs params: t y1 [y2 ...]")
        t, ys = par[0], np.array(par[1:])
        vals, ders = sf.k_bessel_batch(t, ys)
        rows.append("t,y,scaled_value,scaled_derivative,est_error")
        for y, v, d in zip(ys, vals, ders):
            err = _SPECFUN_ENVELOPE[fn] * max(abs(v), 1e-300)
            rows.append(f"{_g(t)},{_g(y)},{_g(v)},{_g(d)},{_g(err)}")
    elif fn == "mehler":
        if len(par) < 3:
            raise ValueError("mehler needs params: n t coshr1 [coshr2 ...]")
        n, t = int(par[0]), par[1]
        vals = sf.mehler_batch(n, t, np.array(par[2:]))
        rows.append("n,t,coshr,value,est_error")
        for c, v in zip(par[2:], vals):
            err = _SPECFUN_ENVELOPE[fn] * max(abs(v), 1e-300)
            rows.append(f"{n},{_g(t)},{_g(c)},{_g(v)},{_g(err)}")
    elif fn == "conical":
        if len(par) < 3:
            raise ValueError("conical needs params: mu t sinhrho1 [...]")
        mu, t = par[0], par[1]
        vals, ders = sf.conical_batch(mu, t, np.array(par[2:]))
        rows.append("mu,t,sinhrho,value,derivative,est_error")
        for s, v, d in zip(par[2:], vals, ders):
            err = _SPECFUN_ENVELOPE[fn] * max(abs(v), 1e-300)
            rows.append(f"{_g(mu)},{_g(t)},{_g(s)},{_g(v)},{_g(d)},{_g(err)}")
    elif fn == "dfunc":
        if len(par) < 2 or len(par) % 2:
            raise ValueError("dfunc needs params: s1 t1 [s2 t2 ...]")
        # parameters live on the unitary axis: s = i s_im, tau = 2 i t;
        # signs +1/-1 map to additive parities 0/1
        ec, er = (1 - args.eps_char) // 2, (1 - args.eps_rep) // 2
        rows.append("s_im,t,which,re_value,im_value,est_error")
        for k in range(0, len(par), 2):
            s, t = par[k], par[k + 1]
            fv = sf.model_functional_e0(1j * s, 2j * t, ec, er)
            rows.append(f"{_g(s)},{_g(t)},e0,{_g(fv.value.real)},"
                        f"{_g(fv.value.imag)},{_g(fv.est_error)}")
            fv = sf.model_functional_e0_prime(1j * s, 2j * t, ec, er)
            rows.append(f"{_g(s)},{_g(t)},e0',{_g(fv.value.real)},"
                        f"{_g(fv.value.imag)},{_g(fv.est_error)}")
    _emit("\n".join(rows) + "\n", args.out)
    _summary(f"specfun: {fn}, {len(rows) - 1} rows")
    return 0


def _cmd_restriction(args) -> int:
    from . import restriction as rs
    if args.demo:
        if args.demo == "negativity":
            payload = rs.no_positive_weight_demo()
        else:
            payload = rs.horocycle_sharpness_sweep()
        _emit(canonical_json(payload), args.out)
        _summary(f"restriction demo: {args.demo}")
        return 0
    if not args.geometry:
        raise ValueError("need --geometry or --demo")
    par = args.params
    if args.geometry == "circle":
        if len(par) != 3:
            raise ValueError("circle needs params: n t R")
        rep = rs.circle_green_identity(int(par[0]), par[1], par[2])
    elif args.geometry == "horocycle":
        if len(par) not in (3, 4):
            raise ValueError("horocycle needs params: n t Y [A]")
        amp = par[3] if len(par) == 4 else 1.0
        rep = rs.horocycle_bound(int(par[0]), par[1], par[2], amp)
    else:
        if len(par) < 5 or len(par[3:]) % 2:
            raise ValueError(
                "geodesic needs params: t kappa zeta n1 a1 [n2 a2 ...]")
        modes = [(int(par[k]), par[k + 1]) for k in range(3, len(par), 2)]
        rep = rs.geodesic_cylinder_identity(modes, par[0], par[1], par[2])
    payload = {"geometry": rep.geometry, "lhs": rep.lhs, "rhs": rep.rhs,
               "slack": rep.slack, "quad_error": rep.quad_error,
               "params": rep.params}
    _emit(canonical_json(payload), args.out)
    _summary(f"restriction: {rep.geometry} lhs={_g(rep.lhs)} "
             f"rhs={_g(rep.rhs)} slack={_g(rep.slack)}")
    return 0


def _cmd_maass(args) -> int:
    from .maass import maass_window
    t1, t2 = args.window
    kwargs = {}
    if args.heights:
        kwargs["heights"] = tuple(args.heights)
    if args.m:
        kwargs["M"] = args.m
    forms = maass_window(t1, t2, **kwargs)
    payload = {"window": [t1, t2], "count": len(forms),
               "forms": [f.as_dict() for f in forms]}
    _emit(canonical_json(payload), args.out)
    _summary("maass: window ({}, {}), {} certified form(s){}".format(
        _g(t1), _g(t2), len(forms),
        ": t = " + ", ".join(_g(f.t) for f in forms) if forms else ""))
    return 0


def _cmd_nodal(args) -> int:
    from .maass import count_sign_changes, hejhal_solve
    from .nodal import domain_count_bound, nodal_graph, \
        oval_intersection_check
    from .svg import nodal_scene, tree_dot
    form = hejhal_solve(args.t, bracket=args.bracket)
    record = count_sign_changes(form)
    graph = nodal_graph(form, args.grid)
    ovals = oval_intersection_check(graph, record)
    n_phi = record.n_phi
    payload = {
        "form": form.as_dict(),
        "sign_changes": record.as_dict(),
        "graph": graph.as_dict(),
        "ovals": ovals.as_dict(),
        "lower_bound": {
            "n_phi": n_phi,
            "required_inert": n_phi // 2 - graph.genus + 1,
            "observed_inert": graph.n_inert,
            "satisfied": graph.n_inert >= n_phi // 2 - graph.genus + 1,
            "oval_count_bound": domain_count_bound(
                len(graph.edges), graph.genus),
        },
    }
    _emit(canonical_json(payload), args.out)
    stem = f"nodal_t{format(args.t, 'g')}_grid{args.grid}"
    svg_path = args.svg or stem + ".svg"
    dot_path = args.dot or stem + ".dot"
    nodal_scene(graph).write(svg_path)
    with open(dot_path, "w") as fh:
        fh.write(tree_dot(graph))
    _summary(f"nodal: t={_g(form.t)} N={graph.n_domains} "
             f"N_in={graph.n_inert} n_phi={n_phi} chi={graph.euler_chi}, "
             f"svg -> {svg_path}, dot -> {dot_path}")
    return 0


def _cmd_report(args) -> int:
    from .fixedsets import (fixed_set_prime, fixed_set_semiprime,
                            np_count_bruteforce, np_count_expansion,
                            separation_census)
    from .restriction import circle_green_identity
    from .specfun import model_functional_e0
    from .vinberg import build_group_p3, build_group_p7
    census = separation_census(60)
    fs15 = fixed_set_semiprime(3, 5)
    fs11 = fixed_set_prime(11)
    g3, g7 = build_group_p3(), build_group_p7()
    circ = circle_green_identity(2, 5.0, 1.0)
    d00 = model_functional_e0(0.0, 0.0, 1, 1)
    payload = {
        "separating_primes": sorted(p for p, s in census.items() if s),
        "gamma0_15": dict(fs15.params),
        "gamma0_11_arcs": [a.label for a in fs11.arcs],
        "chamber_orders": {"p3": list(g3.chamber.orders),
                           "p7": list(g7.chamber.orders)},
        "root_counts": {"p3": len(g3.roots), "p7": len(g7.roots)},
        "circle_identity_slack": circ.slack,
        "model_functional_d_e0_at_0": d00.value.real,
    }
    _emit(canonical_json(payload), args.out)
    _summary("report: done")
    return 0


# -- parser and dispatch ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reflectal",
        description="Reflection fixed sets, separation decisions, "
                    "reflection groups, restriction bounds, and nodal "
                    "domains on arithmetic hyperbolic surfaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cosets", help="coset representatives of a "
                       "congruence level")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--check", action="store_true",
                   help="brute-force pairwise inequivalence")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cosets)

    p = sub.add_parser("fixset", help="reflection fixed set of a prime "
                       "or semiprime level")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--level", type=int)
    grp.add_argument("--pq", type=int, nargs=2, metavar=("P", "Q"))
    p.add_argument("--svg", help="also draw the tiled domain")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_fixset)

    p = sub.add_parser("separation", help="separating/non-separating "
                       "census over prime levels")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_separation)

    p = sub.add_parser("vinberg", help="reflection group of a ternary "
                       "form (-a1, a2, a3)")
    p.add_argument("--form", type=int, nargs=3, required=True,
                   metavar=("A1", "A2", "A3"))
    p.add_argument("--svg", help="output SVG path (default derived)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_vinberg)

    p = sub.add_parser("specfun", help="special-function tables")
    p.add_argument("--fn", required=True,
                   choices=["kbessel", "mehler", "conical", "dfunc"])
    p.add_argument("--params", type=float, nargs="+", required=True)
    p.add_argument("--eps-char", type=int, default=1, choices=[-1, 1])
    p.add_argument("--eps-rep", type=int, default=1, choices=[-1, 1])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_specfun)

    p = sub.add_parser("restriction", help="restriction-bound "
                       "identities and counterexample sweeps")
    p.add_argument("--geometry",
                   choices=["circle", "horocycle", "geodesic"])
    p.add_argument("--params", type=float, nargs="+", default=[])
    p.add_argument("--demo", choices=["negativity", "sharpness"])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_restriction)

    p = sub.add_parser("maass", help="locate even cusp forms in a "
                       "spectral window")
    p.add_argument("--window", type=float, nargs=2, required=True,
                   metavar=("T1", "T2"))
    p.add_argument("--heights", type=float, nargs=2,
                   metavar=("Y1", "Y2"))
    p.add_argument("--m", type=int, help="truncation override")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_maass)

    p = sub.add_parser("nodal", help="nodal decomposition of the even "
                       "form nearest t")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--grid", type=int, default=600)
    p.add_argument("--bracket", type=float, default=0.15)
    p.add_argument("--svg", help="nodal picture path (default derived)")
    p.add_argument("--dot", help="adjacency tree path (default derived)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_nodal)

    p = sub.add_parser("report", help="one-page summary of the exact "
                       "goldens and quick numerics")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    import os
    cap = os.environ.get("REFLECTAL_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
