"""Rank-filtered graded center of ZG and orbifold invariants of V/G.

The filtration degree of g in Sp(V) is rk(id - g); it is constant on
conjugacy classes and even. Class sums C_i form a basis of Z(G), the
associated graded algebra keeps a product C_i C_j -> C_k exactly when
deg k = deg i + deg j, and the Rees record tracks the defect as a power
of u. The orbifold Poincare vector counts classes by degree.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactlin import Mat, kernel_basis, rank
from .groups import MatrixGroup, class_sum_product


def reflection_rank(g: Mat) -> int:
    """Filtration degree rk(id - g)."""
    n = g.shape[0]
    return rank(Mat.identity(n) - g)


def class_degrees(G: MatrixGroup):
    return tuple(reflection_rank(G.element(c.rep)) for c in G.conjugacy_classes())


def symplectic_reflections(G: MatrixGroup):
    """Indices of reflection classes (degree 2) and their count n."""
    degs = class_degrees(G)
    idx = tuple(i for i, d in enumerate(degs) if d == 2)
    return idx, len(idx)


@dataclass
class GradedCenter:
    """gr^F Z(G): class data plus the degree-additive structure constants."""

    classes: tuple  # (rep Mat, size, degree) per conjugacy class
    constants: dict  # (i, j, k) -> int, only where deg i + deg j == deg k
    poincare: tuple  # poincare[d] = number of classes of degree d

    def to_json(self):
        return {
            "classes": [
                {"rep": rep.to_json(), "size": size, "degree": deg}
                for rep, size, deg in self.classes
            ],
            "constants": [
                {"i": i, "j": j, "k": k, "c": str(Fraction(c))}
                for (i, j, k), c in sorted(self.constants.items())
            ],
            "poincare": list(self.poincare),
        }


def _all_constants(G: MatrixGroup):
    cls = G.conjugacy_classes()
    n = len(cls)
    out = {}
    for i in range(n):
        for j in range(i, n):
            v = class_sum_product(G, i, j)
            for k, c in enumerate(v.values):
                if c:
                    out[(i, j, k)] = c
                    out[(j, i, k)] = c
    return out


def gr_center(G: MatrixGroup) -> GradedCenter:
    cls = G.conjugacy_classes()
    degs = class_degrees(G)
    constants = {
        ijk: c for ijk, c in _all_constants(G).items()
        if degs[ijk[0]] + degs[ijk[1]] == degs[ijk[2]]
    }
    poincare = [0] * (max(degs) + 1)
    for d in degs:
        poincare[d] += 1
    classes = tuple((G.element(c.rep), c.size, d) for c, d in zip(cls, degs))
    return GradedCenter(classes=classes, constants=constants, poincare=tuple(poincare))


def orbifold_poincare(G: MatrixGroup):
    """Coefficients of sum over classes of t^(rk(id - rep))."""
    degs = class_degrees(G)
    out = [0] * (max(degs) + 1)
    for d in degs:
        out[d] += 1
    return out


def betti_of_resolution(G: MatrixGroup):
    """Even Betti table {2k: b_2k} read off the orbifold Poincare vector."""
    p = orbifold_poincare(G)
    assert all(c == 0 for d, c in enumerate(p) if d % 2 == 1)
    return {d: c for d, c in enumerate(p) if d % 2 == 0}


@dataclass
class ReesData:
    """Z(G) as a Rees algebra: every product term carries u^(di+dj-dk)."""

    degrees: tuple
    terms: tuple  # (i, j, k, c, u_exp), ascending

    def to_json(self):
        return {
            "degrees": list(self.degrees),
            "terms": [
                {"i": i, "j": j, "k": k, "c": str(Fraction(c)), "u": u}
                for i, j, k, c, u in self.terms
            ],
        }


def rees_center(G: MatrixGroup) -> ReesData:
    degs = class_degrees(G)
    terms = []
    for (i, j, k), c in sorted(_all_constants(G).items()):
        u = degs[i] + degs[j] - degs[k]
        assert u >= 0 and u % 2 == 0, "filtration violated by class product"
        terms.append((i, j, k, c, u))
    return ReesData(degrees=degs, terms=tuple(terms))


def verify_grcenter_axioms(G: MatrixGroup):
    """Commutativity, unit, degree additivity and associativity of gr^F Z(G)."""
    gc = gr_center(G)
    degs = tuple(d for _, _, d in gc.classes)
    n = len(gc.classes)
    const = gc.constants
    checks = {"symmetric": True, "unit": True, "degrees_add": True, "associative": True}
    for (i, j, k), c in const.items():
        if const.get((j, i, k)) != c:
            checks["symmetric"] = False
        if degs[i] + degs[j] != degs[k]:
            checks["degrees_add"] = False
    e = next(i for i in range(n) if degs[i] == 0 and gc.classes[i][1] == 1)
    for j in range(n):
        for k in range(n):
            expect = 1 if k == j else 0
            if const.get((e, j, k), 0) != expect:
                checks["unit"] = False
    # associativity: sum_m c_ij^m c_ml^k == sum_m c_jl^m c_im^k for all i,j,l,k
    for i in range(n):
        for j in range(n):
            for l in range(n):
                for k in range(n):
                    lhs = sum(const.get((i, j, m), 0) * const.get((m, l, k), 0) for m in range(n))
                    rhs = sum(const.get((j, l, m), 0) * const.get((i, m, k), 0) for m in range(n))
                    if lhs != rhs:
                        checks["associative"] = False
    return checks


# -- Lemma check: fixed spaces in general position multiply additively ----


def _int_rows_of_kernel(g_minus_id):
    """Kernel basis of an integer matrix, scaled to integer rows."""
    basis = kernel_basis(g_minus_id)
    rows = []
    for v in basis:
        fr = [x.to_fraction() if hasattr(x, "to_fraction") else Fraction(x) for x in v]
        den = 1
        for f in fr:
            den = den * f.denominator // _gcd(den, f.denominator)
        rows.append(tuple(int(f * den) for f in fr))
    return rows


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _echelonize_int(rows, dim):
    """Fraction-free row echelon; returns pivot-indexed rows."""
    piv = {}
    for row in rows:
        r = list(row)
        while True:
            lead = next((c for c in range(dim) if r[c]), None)
            if lead is None:
                break
            if lead not in piv:
                piv[lead] = tuple(r)
                break
            p = piv[lead]
            a, b = p[lead], r[lead]
            g = _gcd(abs(a), abs(b)) or 1
            r = [(a // g) * x - (b // g) * y for x, y in zip(r, p)]
    return piv


def _merged_rank(piv, rows, dim):
    extra = 0
    added = {}
    for row in rows:
        r = list(row)
        while True:
            lead = next((c for c in range(dim) if r[c]), None)
            if lead is None:
                break
            p = piv.get(lead) or added.get(lead)
            if p is None:
                added[lead] = tuple(r)
                extra += 1
                break
            a, b = p[lead], r[lead]
            g = _gcd(abs(a), abs(b)) or 1
            r = [(a // g) * x - (b // g) * y for x, y in zip(r, p)]
    return len(piv) + extra


@dataclass
class LemmaReport:
    group_order: int
    pairs_total: int
    pairs_scanned: int
    applicable: int
    failures: tuple
    passed: bool

    def to_json(self):
        return {
            "group_order": self.group_order,
            "pairs_total": self.pairs_total,
            "pairs_scanned": self.pairs_scanned,
            "applicable": self.applicable,
            "failures": [list(f) for f in self.failures],
            "passed": self.passed,
        }


def check_lemma_easy(G: MatrixGroup) -> LemmaReport:
    """For every ordered pair with V^g + V^h = V, certify
    dim V^(gh) = dim V^g + dim V^h - dim V.

    Scanning (class rep, h) pairs covers all ordered pairs: simultaneous
    conjugation moves any (g, h) to (rep, h') and preserves both sides.
    """
    dim = G.dim
    n = G.order
    ident = Mat.identity(dim)
    if G._arr is not None:
        import numpy as np
        kernels = []
        for i in range(n):
            m = G._arr[i] - np.eye(dim, dtype=np.int64)
            kernels.append(_int_rows_of_kernel(Mat([[int(x) for x in row] for row in m])))
    else:
        kernels = []
        for i in range(n):
            basis = kernel_basis(G.element(i) - ident)
            rows = []
            for v in basis:
                rows.append(tuple(v))
            kernels.append(rows)
    dims = [len(k) for k in kernels]

    if G._arr is not None:
        echelons = [_echelonize_int(k, dim) for k in kernels]

        def spans_all(gi, hi):
            return _merged_rank(echelons[gi], kernels[hi], dim) == dim
    else:
        # cyclotomic entries: rank of the stacked bases, exactly
        def spans_all(gi, hi):
            rows = [list(r) for r in kernels[gi]] + [list(r) for r in kernels[hi]]
            if not rows:
                return dim == 0
            return rank(Mat(rows)) == dim

    failures = []
    applicable = 0
    scanned = 0
    for cls in G.conjugacy_classes():
        gi = cls.rep
        for hi in range(n):
            scanned += 1
            if dims[gi] + dims[hi] < dim:
                continue
            if not spans_all(gi, hi):
                continue
            applicable += 1
            expect = dims[gi] + dims[hi] - dim
            got = dims[G.mul_idx(gi, hi)]
            if got != expect:
                failures.append((gi, hi, dims[gi], dims[hi], got, expect))
    return LemmaReport(
        group_order=n,
        pairs_total=n * n,
        pairs_scanned=scanned,
        applicable=applicable,
        failures=tuple(failures),
        passed=not failures,
    )
