"""Command-line front end.

Subcommand style, JSON on stdout by default.  Exit codes: 0 success,
1 computational failure (failed verification, obstructed extension),
2 usage error, 3 group-size cap exceeded.  Output for a fixed argument
vector is byte-identical run to run; randomized suites are seeded.
"""

import argparse
import json
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import product

from . import catalog, deform, mckay, poisson, schouten
from .exactlin import CycloNum
from .groups import CapExceeded, direct_product, parse_group_spec
from .poisson import Poly

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

WEYL_TYPES = ([("A", r) for r in range(1, 7)]
              + [("B", r) for r in range(2, 6)]
              + [("C", r) for r in range(3, 6)]
              + [("D", r) for r in range(4, 6)]
              + [("E", 6), ("F", 4), ("G", 2)])


def weyl_order(typ, rank):
    if typ == "A":
        return math.factorial(rank + 1)
    if typ in ("B", "C"):
        return 2 ** rank * math.factorial(rank)
    if typ == "D":
        return 2 ** (rank - 1) * math.factorial(rank)
    return {("E", 6): 51840, ("F", 4): 1152, ("G", 2): 12}[(typ, rank)]


def catalog_group_specs(max_order):
    """Deterministic list of built-in group specs with order <= max_order."""
    specs = [f"cyclic:{n}" for n in range(2, 13) if n <= max_order]
    specs += [f"binary-dihedral:{n}" for n in range(2, 13) if 4 * n <= max_order]
    specs += [f"weyl:{t}{r}" for t, r in WEYL_TYPES if weyl_order(t, r) <= max_order]
    return specs


def _threads():
    try:
        return max(1, int(os.environ.get("MCKAYKIT_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    n = _threads()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# -- subcommand handlers (payload dict, exit code) ------------------------------


def cmd_classes(args):
    G = parse_group_spec(args.group, cap=args.cap)
    degs = mckay.class_degrees(G)
    return {
        "group": args.group,
        "order": G.order,
        "num_classes": len(degs),
        "classes": [{"index": i, "size": c.size, "degree": degs[i]}
                    for i, c in enumerate(G.conjugacy_classes())],
    }, EXIT_OK


def cmd_reflections(args):
    G = parse_group_spec(args.group, cap=args.cap)
    idx, n = mckay.symplectic_reflections(G)
    return {"group": args.group, "order": G.order,
            "reflection_classes": list(idx), "n": n}, EXIT_OK


def cmd_grcenter(args):
    G = parse_group_spec(args.group, cap=args.cap)
    out = mckay.gr_center(G).to_json()
    out["group"] = args.group
    return out, EXIT_OK


def cmd_orbifold_poincare(args):
    G = parse_group_spec(args.group, cap=args.cap)
    return {"group": args.group,
            "poincare": mckay.orbifold_poincare(G)}, EXIT_OK


def cmd_betti(args):
    G = parse_group_spec(args.group, cap=args.cap)
    betti = mckay.betti_of_resolution(G)
    return {"group": args.group,
            "betti": [{"degree": d, "b": b} for d, b in sorted(betti.items())]}, EXIT_OK


def cmd_rees(args):
    G = parse_group_spec(args.group, cap=args.cap)
    out = mckay.rees_center(G).to_json()
    out["group"] = args.group
    return out, EXIT_OK


def cmd_molien(args):
    G = parse_group_spec(args.group, cap=args.cap)
    coeffs = poisson.molien(G, args.window)
    assert all(c.denominator == 1 for c in coeffs)
    return {"group": args.group, "max_degree": args.window,
            "coefficients": [int(c) for c in coeffs]}, EXIT_OK


def _parse_weyl_arg(spec):
    kind, _, arg = spec.partition(":")
    if kind != "weyl" or len(arg) < 2:
        raise SystemExit(f"expected weyl:Xn, got {spec!r}")
    return arg[0].upper(), int(arg[1:])


def cmd_exponents(args):
    typ, rank = _parse_weyl_arg(args.group)
    exps = catalog.exponents(typ, rank, cap=args.cap)
    return {"type": f"{typ}{rank}", "exponents": list(exps)}, EXIT_OK


def cmd_catalog(args):
    if args.what != "list":
        raise SystemExit(f"unknown catalog action {args.what!r}")
    rows = catalog.catalog_table(compute_cap=min(args.cap, 20000))
    return {"catalog": [r.to_json() for r in rows]}, EXIT_OK


def cmd_hp(args):
    G = parse_group_spec(args.group, cap=args.cap)
    A = deform.build_truncated(G, args.window)
    if args.k == 1:
        report = deform.hp1(A)
    else:
        report, _ = deform.hp2_first_order(A, with_reps=False)
    return report.to_json(), EXIT_OK


def cmd_mc_extend(args):
    G = parse_group_spec(args.group, cap=args.cap)
    A = deform.build_truncated(G, args.window)
    _, reps = deform.hp2_first_order(A)
    basis = [(m, i, g1) for m in sorted(reps) for i, g1 in enumerate(reps[m])]
    out = {"group": args.group, "window": args.window, "extensions": [],
           "sum": None}
    code = EXIT_OK
    for m, i, g1 in basis:
        try:
            g2 = deform.mc_extend(A, g1)
            out["extensions"].append(
                {"m": m, "index": i, "status": "extended",
                 "order2_components": len(g2.phi) + len(g2.psi)})
        except deform.Obstructed as e:
            out["extensions"].append(
                {"m": m, "index": i, "status": "obstructed",
                 "residual_rows": len(e.residual)})
            code = EXIT_FAIL
    if len(basis) > 1:
        try:
            parts = deform.mc_extend_multi(A, [g1 for _, _, g1 in basis])
            out["sum"] = {"status": "extended", "degrees": sorted(parts)}
        except deform.Obstructed as e:
            out["sum"] = {"status": "obstructed", "residual_rows": len(e.residual)}
            code = EXIT_FAIL
    return out, code


# -- verification suites ---------------------------------------------------------


def _suite_lemma_easy(args):
    def one(spec):
        rep = mckay.check_lemma_easy(parse_group_spec(spec, cap=args.cap))
        j = rep.to_json()
        j["group"] = spec
        return j
    cases = _pmap(one, catalog_group_specs(args.max_order))
    return {"cases": cases, "pass": all(c["passed"] for c in cases)}


def _suite_grcenter_axioms(args):
    def one(spec):
        checks = mckay.verify_grcenter_axioms(parse_group_spec(spec, cap=args.cap))
        return {"group": spec, **checks, "passed": all(checks.values())}
    cases = _pmap(one, catalog_group_specs(args.max_order))
    return {"cases": cases, "pass": all(c["passed"] for c in cases)}


DEFAULT_KUNNETH_PAIRS = (
    ("cyclic:2", "cyclic:3"), ("cyclic:2", "cyclic:4"), ("cyclic:3", "cyclic:3"),
    ("cyclic:2", "binary-dihedral:2"), ("cyclic:3", "binary-dihedral:3"),
    ("binary-dihedral:2", "binary-dihedral:2"), ("cyclic:2", "weyl:A2"),
    ("weyl:A1", "weyl:A2"), ("weyl:A2", "weyl:A2"), ("cyclic:5", "weyl:B2"))


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _suite_kunneth(args):
    pairs = DEFAULT_KUNNETH_PAIRS
    if args.groups:
        p = args.groups.split(",")
        if len(p) != 2:
            raise SystemExit("--groups wants exactly two comma-separated specs")
        pairs = (tuple(p),)

    def one(pair):
        s1, s2 = pair
        G1 = parse_group_spec(s1, cap=args.cap)
        G2 = parse_group_spec(s2, cap=args.cap)
        p1 = mckay.orbifold_poincare(G1)
        p2 = mckay.orbifold_poincare(G2)
        prod = mckay.orbifold_poincare(direct_product(G1, G2, cap=args.cap))
        ok = _poly_mul(p1, p2) == prod
        return {"pair": [s1, s2], "product": prod, "passed": ok}
    cases = _pmap(one, pairs)
    return {"cases": cases, "pass": all(c["passed"] for c in cases)}


def _rand_poly(rng, vars, deg):
    t = {}
    for _ in range(3):
        e = [0] * len(vars)
        for _ in range(rng.randint(0, deg)):
            e[rng.randrange(len(vars))] += 1
        t[tuple(e)] = CycloNum.rational(rng.randint(-3, 3))
    return Poly(vars, t)


def _rand_pv(rng, vars, k):
    from itertools import combinations
    return schouten.Polyvector(
        vars, k, {S: _rand_poly(rng, vars, 2) for S in combinations(range(len(vars)), k)})


def _suite_schouten(args):
    rng = random.Random(args.seed)
    W = ("x", "y", "z")
    d2_checked = 0
    for _ in range(100):
        theta = schouten.Polyvector(
            W, 2, {(0, 1): Poly.const(W, rng.randint(-2, 2)),
                   (0, 2): Poly.const(W, rng.randint(-2, 2)),
                   (1, 2): Poly.const(W, rng.randint(-2, 2))})
        if not schouten.satisfies_jacobi(theta):
            continue
        P = _rand_pv(rng, W, rng.randint(0, 3))
        if schouten.schouten_bracket(theta, schouten.kb_differential(P, theta)):
            return {"pass": False, "failure": "d^2 != 0"}
        d2_checked += 1
    jac_checked = 0
    for _ in range(50):
        p, q, r = (rng.randint(0, 3) for _ in range(3))
        P, Q, R = (_rand_pv(rng, W, k) for k in (p, q, r))
        sp = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
        if schouten.schouten_bracket(P, Q) != schouten.schouten_bracket(Q, P).scale(sp):
            return {"pass": False, "failure": f"skew at {(p, q)}"}
        j1 = schouten.schouten_bracket(P, schouten.schouten_bracket(Q, R))
        j2 = schouten.schouten_bracket(schouten.schouten_bracket(P, Q), R)
        j3 = schouten.schouten_bracket(Q, schouten.schouten_bracket(P, R)).scale(
            -1 if ((p - 1) * (q - 1)) % 2 else 1)
        if j1 != (j2 + j3):
            return {"pass": False, "failure": f"jacobi at {(p, q, r)}"}
        jac_checked += 1
    return {"pass": True, "d_squared_zero": d2_checked, "jacobi_triples": jac_checked}


def _rand_cochain(rng, alg, k):
    t = {}
    for idx in product(range(alg.n), repeat=k):
        if rng.random() < 0.4:
            t[idx] = tuple(rng.randint(-2, 2) for _ in range(alg.n))
    return schouten.Cochain(alg, k, t)


def _cochain_associative(alg, m2):
    for i in range(alg.n):
        for j in range(alg.n):
            for k in range(alg.n):
                ei, ej, ek = (alg.basis_vec(t) for t in (i, j, k))
                if m2(m2(ei, ej), ek) != m2(ei, m2(ej, ek)):
                    return False
    return True


def _suite_gerstenhaber(args):
    rng = random.Random(args.seed)
    A = schouten.FinAlgebra.truncated_power("x", 2)
    B = schouten.FinAlgebra.truncated_power("y", 2)
    T = schouten.TensorFinAlgebra(A, B)
    mism = 0
    for _ in range(20):
        m2 = _rand_cochain(rng, A, 2)
        want = _cochain_associative(A, m2)
        got = not schouten.gerstenhaber_bracket(m2, m2)
        if want != got:
            mism += 1
    if mism:
        return {"pass": False, "failure": f"[m,m] associativity mismatches: {mism}"}
    for _ in range(25):
        k, l, w = (rng.randint(0, 2) for _ in range(3))
        f, g, h = (_rand_cochain(rng, T, a) for a in (k, l, w))
        sg = -1 if ((k - 1) * (l - 1)) % 2 == 0 else 1
        if schouten.gerstenhaber_bracket(f, g) != \
                schouten.gerstenhaber_bracket(g, f).scale(sg):
            return {"pass": False, "failure": f"skew at {(k, l)}"}
        j1 = schouten.gerstenhaber_bracket(f, schouten.gerstenhaber_bracket(g, h))
        j2 = schouten.gerstenhaber_bracket(schouten.gerstenhaber_bracket(f, g), h)
        j3 = schouten.gerstenhaber_bracket(g, schouten.gerstenhaber_bracket(f, h)).scale(
            -1 if ((k - 1) * (l - 1)) % 2 else 1)
        if j1 != (j2 + j3):
            return {"pass": False, "failure": f"jacobi at {(k, l, w)}"}
    # identity (tau) on all basis reduced omegas of arity <= 2, random f
    omegas = []
    for w in (1, 2):
        for idx in product(range(1, A.n), repeat=w):
            for r in range(A.n):
                val = tuple(Fraction(1 if t == r else 0) for t in range(A.n))
                omegas.append(schouten.Cochain(A, w, {idx: val}))
    tau_checked = 0
    for _ in range(50):
        fT = _rand_cochain(rng, T, rng.randint(1, 3))
        sh = schouten.shuffle_map(fT, T)
        for om in omegas:
            w = om.k
            lhs = schouten.shuffle_map(
                schouten.gerstenhaber_bracket(schouten.kappa_A(om, T), fT), T)
            for (p, q), comp in sh.items():
                want = schouten.first_factor_bracket(om, comp)
                got = lhs.get((p + w - 1, q)) or \
                    schouten.MixedCochain.zero(A, B, p + w - 1, q)
                if got != want:
                    return {"pass": False, "failure": f"tau at {(p, q)} w={w}"}
                tau_checked += 1
    return {"pass": True, "algebras": 20, "jacobi_triples": 25,
            "tau_components": tau_checked}


DUVAL_RANK = {"A1": 1, "A2": 2, "A3": 3}


def _suite_hp_duval(args):
    typ = args.type or "A1"
    if typ not in DUVAL_RANK:
        raise SystemExit(f"--type must be one of {sorted(DUVAL_RANK)}")
    n = DUVAL_RANK[typ]
    G = parse_group_spec(f"cyclic:{n + 1}", cap=args.cap)
    A = deform.build_truncated(G, args.window)
    r1 = deform.hp1(A)
    r2, _ = deform.hp2_first_order(A, with_reps=False)
    hp1_total = sum(d for _, d, c in r1.entries if c)
    hp2_total = r2.certified_total()
    ok = hp1_total == 0 and hp2_total == n
    return {"type": typ, "window": args.window, "hp1_certified_total": hp1_total,
            "hp2_certified_total": hp2_total, "expected": n, "pass": ok,
            "hp2": r2.to_json()}


def _suite_molien_cross(args):
    max_deg = min(args.window, 8)

    def one(spec):
        G = parse_group_spec(spec, cap=args.cap)
        coeffs = poisson.molien(G, max_deg)
        dims = [len(poisson.invariant_basis(G, d)) for d in range(max_deg + 1)]
        ok = [int(c) for c in coeffs] == dims
        return {"group": spec, "dims": dims, "passed": ok}
    cases = _pmap(one, catalog_group_specs(args.max_order))
    exp_cases = []
    for row in catalog.catalog_table(compute_cap=2000):
        j = row.to_json()
        if j["exponents"] is None or j["weyl_order"] is None:
            continue
        prod = math.prod(m + 1 for m in j["exponents"])
        exp_cases.append({"type": j["label"], "exponents": j["exponents"],
                          "product": prod, "order": j["weyl_order"],
                          "passed": prod == j["weyl_order"]})
    ok = all(c["passed"] for c in cases) and all(c["passed"] for c in exp_cases) \
        and bool(exp_cases)
    return {"cases": cases, "exponent_cases": exp_cases, "pass": ok}


SUITES = {
    "lemma-easy": _suite_lemma_easy,
    "grcenter-axioms": _suite_grcenter_axioms,
    "kunneth": _suite_kunneth,
    "schouten": _suite_schouten,
    "gerstenhaber": _suite_gerstenhaber,
    "hp-duval": _suite_hp_duval,
    "molien-cross": _suite_molien_cross,
}


def cmd_verify(args):
    payload = SUITES[args.suite](args)
    payload["suite"] = args.suite
    return payload, (EXIT_OK if payload["pass"] else EXIT_FAIL)


# -- driver ----------------------------------------------------------------------


def _render_text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=int, default=8,
                        help="degree window D (default 8)")
    common.add_argument("--cap", type=lambda s: int(float(s)), default=3_000_000,
                        help="group-size cap (default 3e6)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized suites (default 0)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    ap = argparse.ArgumentParser(prog="mckaykit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, needs_group in (
            ("classes", cmd_classes, True),
            ("reflections", cmd_reflections, True),
            ("grcenter", cmd_grcenter, True),
            ("orbifold-poincare", cmd_orbifold_poincare, True),
            ("betti", cmd_betti, True),
            ("rees", cmd_rees, True),
            ("molien", cmd_molien, True),
            ("exponents", cmd_exponents, True),
            ("mc-extend", cmd_mc_extend, True)):
        p = sub.add_parser(name, parents=[common])
        if needs_group:
            p.add_argument("group", help="group spec, e.g. cyclic:3 or weyl:A2")
        p.set_defaults(fn=fn)

    p = sub.add_parser("catalog", parents=[common])
    p.add_argument("what", nargs="?", default="list")
    p.set_defaults(fn=cmd_catalog)

    p = sub.add_parser("hp", parents=[common])
    p.add_argument("group")
    p.add_argument("--k", type=int, choices=(1, 2), default=2)
    p.set_defaults(fn=cmd_hp)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--max-order", type=int, default=2000)
    p.add_argument("--groups", help="comma pair for kunneth, e.g. cyclic:2,cyclic:3")
    p.add_argument("--type", help="du Val type for hp-duval (A1, A2, A3)")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        payload, code = args.fn(args)
    except CapExceeded as e:
        print(json.dumps({"error": "cap exceeded", "detail": str(e)}))
        return EXIT_CAP
    except (deform.InvalidCocycle, ValueError, SystemExit) as e:
        print(json.dumps({"error": str(e)}))
        return EXIT_USAGE
    if args.format == "text":
        print("\n".join(_render_text(payload)))
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
