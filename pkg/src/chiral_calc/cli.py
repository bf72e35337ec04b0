"""chiral-calc: verify topological currents, BRST reductions, cohomology and characters.

Exit status is 0 when every requested check passes, 1 when a check fails and
2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .algebra import AlgebraContext, IdentityFailure, Profile, lambda_bracket, nth_product
from .brst import (
    BrstComplex,
    InhomogeneousPotential,
    compat_suite,
    polyvector_checks,
    square_zero_check,
    twisted_currents,
    verify_theorem,
)
from .characters import (
    ThetaPole,
    compare_characters,
    direct_character,
    localization_character,
    origin_fixed_point,
)
from .cohomology import (
    InfiniteSlice,
    SliceComplex,
    bv_cohomology,
    bv_identities,
    cohomology,
    euler_character,
    window_keys,
)
from .freefield import omega_currents, theta_currents, verify_top_facts
from .parsing import ParseError, parse_potential, parse_state
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _weights(text: str | None, D: int):
    if text is None:
        return None
    try:
        w = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"weights must be a comma separated list of integers, got {text!r}") from None
    if len(w) != D:
        raise InputError(f"expected {D} weights, got {len(w)}")
    return w


def threads() -> int:
    """Parallelism cap from ``CHIRAL_CALC_THREADS`` (default 1)."""
    raw = os.environ.get("CHIRAL_CALC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"CHIRAL_CALC_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"CHIRAL_CALC_THREADS must be a positive integer, got {raw!r}")
    return n


def _potential(args, need_weights: bool = False):
    if not args.f:
        raise InputError("a potential is required (-f)")
    w = _weights(args.w, args.D)
    if need_weights and w is None:
        w = (1,) * args.D
    return parse_potential(args.f, args.D, w)


def _window(args, a: int):
    mmin = args.mmin if args.mmin is not None else -2 * a
    mmax = args.mmax if args.mmax is not None else 4 * a
    if mmin > mmax:
        raise InputError(f"empty m window [{mmin}, {mmax}]")
    if args.nmax < 0:
        raise InputError("--nmax must be nonnegative")
    return args.nmax, mmin, mmax


def _overrides(args, cs):
    changes = {}
    for item in args.override or []:
        name, sep, expr = item.partition("=")
        name = name.strip()
        if not sep or name not in ("L", "J", "Q", "G"):
            raise InputError(f"--override expects NAME=EXPR with NAME one of L, J, Q, G; got {item!r}")
        changes[name] = parse_state(expr, cs.ctx)
    return cs.replace(**changes) if changes else cs


def table(series) -> str:
    """Aligned coefficient table: one row per q-power, one column per u-power."""
    rows = {}
    data = series if isinstance(series, dict) else series.to_dict()
    for term in data["terms"]:
        if "coeff" not in term:
            rows[term["q"]] = {None: f"({term['numer']})/({term['denom']})"}
            continue
        rows[term["q"]] = {c["u"] if not c["t"] else (c["u"], c["t"]): c["c"] for c in term["coeff"]}
    cols = sorted({k for r in rows.values() for k in r if isinstance(k, int)})
    if not cols or any(not isinstance(k, int) for r in rows.values() for k in r):
        return "\n".join(f"  q^{n}: {r}" for n, r in sorted(rows.items()))
    head = ["q\\u"] + [str(c) for c in cols]
    body = [[f"q^{n}"] + [rows[n].get(c, "0") for c in cols] for n in sorted(rows)]
    width = max(len(x) for row in [head] + body for x in row)
    return "\n".join("  " + " ".join(x.rjust(width) for x in row) for row in [head] + body)


# ------------------------------------------------------------------ commands


def cmd_verify_top(args):
    profiles = {"de-rham": [omega_currents], "polyvector": [theta_currents],
                "both": [omega_currents, theta_currents]}[args.profile]
    reports = []
    for build in profiles:
        cs = _overrides(args, build(args.D))
        reports.append(verify_top_facts(cs))
    return reports


def cmd_show_currents(args):
    out = []
    for build in (omega_currents, theta_currents):
        cs = build(args.D)
        rep = Report(f"currents of rank {cs.rank} ({cs.profile.value}, D={args.D})")
        for name, cur in cs.as_dict().items():
            rep.values[name] = cur.render()
        out.append(rep)
    return out


def cmd_brst_suite(args):
    bc = BrstComplex.build(_potential(args))
    return [compat_suite(bc), square_zero_check(bc), polyvector_checks(bc, args.samples, args.seed)]


def cmd_twist(args):
    bc = twisted_currents(BrstComplex.build(_potential(args, need_weights=True)))
    rep = verify_theorem(bc)
    for name, cur in bc.twisted.as_dict().items():
        rep.values[f"{name}^f"] = cur.render()
    return [rep]


def cmd_cohomology(args):
    pot = _potential(args, need_weights=True)
    bc = BrstComplex.build(pot)
    nmax, mmin, mmax = _window(args, pot.a)
    sc = SliceComplex(bc, args.cache)
    rep_h = cohomology(bc, window_keys(nmax, mmin, mmax), complex_=sc)
    rep = Report(f"cohomology of f = {pot.label()}, w = {pot.weights}, n <= {nmax}, {mmin} <= m <= {mmax}")
    rep.add("d^2 = 0 on every slice", rep_h.square_zero)
    cmin, cmax = mmin + pot.a * (-nmax), mmax + pot.a * pot.D * (nmax + 1)
    euler = euler_character(bc, nmax, cmin, cmax, complex_=sc)
    bad = {f"{k}": v for k, v in euler.items() if v[0] != v[1]}
    rep.add("Euler-Poincare along charge lines", not bad, mismatches=bad)
    rep.values["nonzero"] = {f"(n={n}, m={m}, j={j})": d for (n, m, j), d in rep_h.nonzero().items()}
    if args.json:
        rep.values["cohomology"] = rep_h.to_dict()
    return [rep]


def cmd_character(args):
    pot = _potential(args, need_weights=True)
    bc = BrstComplex.build(pot)
    if args.mode == "compare":
        rep = compare_characters(bc, args.N)
        if not args.json:
            for key in ("direct", "localization"):
                rep.values[key] = "\n" + table(rep.values[key])
            lit = rep.values["literal formula discrepancy"]
            if isinstance(lit, dict):
                rep.values["literal formula discrepancy"] = "direct/literal = " + ", ".join(lit["direct/literal"])
        return [rep]
    if args.mode == "direct":
        dc = direct_character(bc, args.N)
        rep = Report(f"direct character of f = {pot.label()} through q^{args.N}")
        rep.add("window sufficient", dc.sufficient, boundary=[str(b) for b in dc.boundary])
        if args.json:
            rep.values["refined"] = dc.series.to_dict()
            rep.values["series"] = dc.collapsed().to_dict()
        else:
            rep.values["series"] = "\n" + table(dc.collapsed())
        return [rep]
    point = origin_fixed_point(pot.weights, pot.a)
    rep = Report(f"localization character of f = {pot.label()} through q^{args.N}")
    try:
        series = localization_character([point], args.N, literal=args.literal)
    except ThetaPole as exc:
        rep.add("localization formula finite", False, error=str(exc))
        return [rep]
    rep.add("localization formula finite", True)
    rep.values["series"] = series.to_dict() if args.json else "\n" + table(series)
    return [rep]


def cmd_bv(args):
    pot = _potential(args, need_weights=True)
    bc = BrstComplex.build(pot)
    nmax, mmin, mmax = _window(args, pot.a)
    return [bv_identities(bc, nmax, mmin, mmax), bv_cohomology(bc, nmax, mmin, mmax)]


def cmd_eval(args):
    profile = Profile.DE_RHAM if args.profile == "de-rham" else Profile.POLYVECTOR
    ctx = AlgebraContext(args.D, profile)
    a, b = parse_state(args.a, ctx), parse_state(args.b, ctx)
    rep = Report(f"({a}) and ({b})")
    if args.n is None:
        rep.values["lambda bracket"] = {f"n={n}": v.render() for n, v in lambda_bracket(a, b).items()}
    else:
        rep.values[f"product n={args.n}"] = nth_product(a, args.n, b).render()
    return [rep]


# ---------------------------------------------------------------------- main


def _common(p, potential=True, window=False):
    p.add_argument("-D", type=int, default=1, help="dimension (default 1)")
    if potential:
        p.add_argument("-w", help="coordinate weights, comma separated (default all 1)")
        p.add_argument("-f", help='potential, e.g. "x1^3 + x2^2"')
    if window:
        p.add_argument("--nmax", type=int, default=3, help="largest conformal weight (default 3)")
        p.add_argument("--mmin", type=int, help="smallest equivariant weight (default -2a)")
        p.add_argument("--mmax", type=int, help="largest equivariant weight (default 4a)")
    p.add_argument("--json", action="store_true", help="machine readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chiral-calc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-top", help="topological current identities")
    _common(p, potential=False)
    p.add_argument("--profile", choices=["de-rham", "polyvector", "both"], default="both")
    p.add_argument("--override", action="append", metavar="NAME=EXPR",
                   help="replace a current by a parsed state (repeatable)")
    p.set_defaults(run=cmd_verify_top)

    p = sub.add_parser("show-currents", help="print L, J, Q, G in both profiles")
    _common(p, potential=False)
    p.set_defaults(run=cmd_show_currents)

    p = sub.add_parser("brst-suite", help="BRST charge compatibilities and weight-zero checks")
    _common(p)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_brst_suite)

    p = sub.add_parser("twist", help="twisted currents and their topological structure")
    _common(p)
    p.set_defaults(run=cmd_twist)

    p = sub.add_parser("cohomology", help="slice cohomology dimensions")
    _common(p, window=True)
    p.add_argument("--cache", metavar="DIR", help="cache boundary matrices in DIR")
    p.set_defaults(run=cmd_cohomology)

    p = sub.add_parser("character", help="direct and localization characters")
    _common(p)
    p.add_argument("-N", type=int, default=6, help="q-truncation order (default 6)")
    p.add_argument("--mode", choices=["compare", "direct", "localization"], default="compare")
    p.add_argument("--literal", action="store_true",
                   help="localization with w_tot from tangent weights alone")
    p.set_defaults(run=cmd_character)

    p = sub.add_parser("bv", help="BV homotopy identities and cohomology")
    _common(p, window=True)
    p.set_defaults(run=cmd_bv)

    p = sub.add_parser("eval", help="n-th products of parsed states")
    _common(p, potential=False)
    p.add_argument("a", help="left state")
    p.add_argument("b", help="right state")
    p.add_argument("-n", type=int, help="mode (default: the whole lambda bracket)")
    p.add_argument("--profile", choices=["de-rham", "polyvector"], default="polyvector")
    p.set_defaults(run=cmd_eval)
    return parser


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (tuple, set, frozenset)):
        return list(obj)
    return str(obj)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        threads()
        if getattr(args, "N", 0) is not None and getattr(args, "N", 0) < 0:
            raise InputError("-N must be nonnegative")
        if args.D < 1:
            raise InputError("-D must be positive")
        reports = args.run(args)
    except (InputError, ParseError, InhomogeneousPotential, InfiniteSlice) as exc:
        print(f"chiral-calc: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IdentityFailure as exc:
        print(f"chiral-calc: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"chiral-calc: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        json.dump([r.to_dict() for r in reports], sys.stdout, indent=2, default=_json_default)
        print()
    else:
        for r in reports:
            print("\n".join(r.lines()))
    ok = all(r.ok for r in reports)
    if not ok:
        failed = [f"{r.title}: {name}" for r in reports for name in r.failed()]
        print("failed: " + "; ".join(failed), file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
