"""Exact polynomial algebra on V with its symplectic Poisson bracket.

Polynomials carry cyclotomic coefficients and a fixed variable tuple;
monomials are kept in graded-lex order (total degree, then lex descending)
so serialization and echelon bases are deterministic. The bracket of the
form J is {f, g} = sum P_ab (df/dx_a)(dg/dx_b) with P = -J^(-1); on the
standard space this gives {x_i, y_j} = delta_ij.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb as _binom

from .exactlin import CycloNum, Mat, SympSpace
from .groups import MatrixGroup

_ZERO = CycloNum.rational(0)
_ONE = CycloNum.rational(1)


def coord_names(dim: int):
    """x1..xn, y1..yn for dim = 2n."""
    assert dim % 2 == 0
    n = dim // 2
    return tuple([f"x{i+1}" for i in range(n)] + [f"y{i+1}" for i in range(n)])


def _monomial_key(exp):
    # graded-lex: higher degree first, then lex descending
    return (sum(exp), exp)


class Poly:
    """Immutable exact polynomial in a fixed variable tuple."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms):
        self.vars = tuple(vars)
        clean = {}
        for e, c in terms.items():
            c = CycloNum.coerce(c)
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, vars):
        return cls(vars, {})

    @classmethod
    def const(cls, vars, c):
        v = tuple(vars)
        return cls(v, {(0,) * len(v): CycloNum.coerce(c)})

    @classmethod
    def variable(cls, vars, i):
        v = tuple(vars)
        e = [0] * len(v)
        e[i] = 1
        return cls(v, {tuple(e): _ONE})

    @classmethod
    def monomial(cls, vars, exp, c=1):
        return cls(vars, {tuple(exp): CycloNum.coerce(c)})

    # -- ring operations ---------------------------------------------------

    def _check(self, other):
        assert self.vars == other.vars, "variable mismatch"

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.vars, other)
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, _ZERO) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return Poly(self.vars, t)

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.vars, other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = t.get(e, _ZERO) + c1 * c2
                if s:
                    t[e] = s
                else:
                    t.pop(e, None)
        return Poly(self.vars, t)

    __rmul__ = __mul__

    def scale(self, c):
        c = CycloNum.coerce(c)
        if not c:
            return Poly.zero(self.vars)
        return Poly(self.vars, {e: c * v for e, v in self.terms.items()})

    def __pow__(self, k: int):
        assert k >= 0
        out = Poly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.vars == other.vars and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items(), key=lambda t: _monomial_key(t[0]), reverse=True))))

    # -- calculus ----------------------------------------------------------

    def diff(self, i: int) -> "Poly":
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                t[tuple(ne)] = c * e[i]
        return Poly(self.vars, t)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def graded_part(self, d: int) -> "Poly":
        return Poly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def subst(self, A: Mat) -> "Poly":
        """x_i -> sum_j A[i][j] x_j."""
        n = len(self.vars)
        forms = [
            Poly(self.vars, {tuple(1 if k == j else 0 for k in range(n)): A.rows[i][j]
                             for j in range(n) if A.rows[i][j]})
            for i in range(n)
        ]
        out = Poly.zero(self.vars)
        for e, c in self.terms.items():
            m = Poly.const(self.vars, c)
            for i, k in enumerate(e):
                if k:
                    m = m * forms[i] ** k
            out = out + m
        return out

    def act(self, g: Mat) -> "Poly":
        """(g . f)(v) = f(g^(-1) v)."""
        return self.subst(g.inverse())

    # -- serialization -------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _monomial_key(t[0]), reverse=True)

    def to_json(self):
        return {
            "vars": list(self.vars),
            "terms": [{"exp": list(e), "c": c.to_json()} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj) -> "Poly":
        terms = {tuple(t["exp"]): CycloNum.from_json(t["c"]) for t in obj["terms"]}
        return cls(tuple(obj["vars"]), terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"{v}^{k}" if k > 1 else v
                            for v, k in zip(self.vars, e) if k)
            bits.append(f"({c!r})" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)


def monomials_of_degree(nvars: int, d: int):
    """Exponent tuples of total degree d, graded-lex descending."""
    if nvars == 0:
        if d == 0:
            yield ()
        return
    if nvars == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - first):
            yield (first,) + rest


def standard_bivector(space: SympSpace) -> Mat:
    """P = -J^(-1); on the standard space {x_i, y_j} = delta_ij."""
    return -space.J.inverse()


def bracket(f: Poly, g: Poly, P: Mat) -> Poly:
    """{f, g} = sum_ab P_ab (df/dx_a)(dg/dx_b)."""
    n = len(f.vars)
    df = [f.diff(a) for a in range(n)]
    dg = [g.diff(b) for b in range(n)]
    out = Poly.zero(f.vars)
    for a in range(n):
        if not df[a]:
            continue
        for b in range(n):
            c = P.rows[a][b]
            if c and dg[b]:
                out = out + (df[a] * dg[b]).scale(c)
    return out


# -- Molien series and invariants --------------------------------------------


def _char_series_inv(g: Mat, D: int):
    """Coefficients of 1/det(1 - t g) to order D."""
    n = g.shape[0]
    powers = [Mat.identity(n)]
    for _ in range(n):
        powers.append(powers[-1] * g)
    p = [sum((powers[k].rows[i][i] for i in range(n)), _ZERO) for k in range(n + 1)]
    e = [_ONE]
    for m in range(1, n + 1):
        acc = _ZERO
        for k in range(1, m + 1):
            term = e[m - k] * p[k]
            acc = acc + (term if k % 2 == 1 else -term)
        e.append(acc / m)
    det = [(e[m] if m % 2 == 0 else -e[m]) for m in range(n + 1)]
    inv = [_ONE]
    for m in range(1, D + 1):
        acc = _ZERO
        for k in range(1, min(m, n) + 1):
            if det[k]:
                acc = acc + det[k] * inv[m - k]
        inv.append(-acc)
    return inv


def molien(G: MatrixGroup, D: int, h_block_only: bool = False):
    """Molien series of the G-action to order D, as exact Fractions."""
    total = [_ZERO] * (D + 1)
    for c in G.conjugacy_classes():
        g = G.element(c.rep)
        if h_block_only:
            n = g.shape[0] // 2
            g = Mat([row[:n] for row in g.rows[:n]])
        inv = _char_series_inv(g, D)
        w = CycloNum.rational(c.size)
        total = [a + w * b for a, b in zip(total, inv)]
    return [(a / G.order).to_fraction() for a in total]


def reynolds(G: MatrixGroup, f: Poly) -> Poly:
    """Group average; summing f.subst(g) over g equals summing f.act(g)."""
    acc = Poly.zero(f.vars)
    for i in range(G.order):
        acc = acc + f.subst(G.element(i))
    return acc.scale(Fraction(1, G.order))


def _echelon_insert(echelon, poly):
    """Reduce poly against echelon rows (keyed by leading monomial); insert if
    new. Back-substitutes into earlier rows, so the echelon stays fully
    reduced and depends only on the row space, not the insertion order."""
    p = poly
    while p:
        lead = max(p.terms, key=_monomial_key)
        if lead in echelon:
            p = p - echelon[lead].scale(p.terms[lead])
        else:
            p = p.scale(p.terms[lead].inverse())
            for L, r in echelon.items():
                c = r.terms.get(lead)
                if c:
                    echelon[L] = r - p.scale(c)
            echelon[lead] = p
            return True
    return False


def _generator_kernel(G: MatrixGroup, d: int, vars):
    """Degree-d invariants as the joint kernel of subst(g) - id over the
    generators; sparse elimination over the cyclotomic field."""
    monos = list(monomials_of_degree(len(vars), d))
    col = {e: i for i, e in enumerate(monos)}
    piv = {}
    for gi in G.gen_indices:
        g = G.element(gi)
        rows = {}
        for e in monos:
            p = Poly.monomial(vars, e).subst(g)
            terms = dict(p.terms)
            terms[e] = terms.get(e, _ZERO) - _ONE
            c_e = col[e]
            for mu, cv in terms.items():
                if cv:
                    rows.setdefault(mu, {})[c_e] = cv
        for row in rows.values():
            # reduce against earlier pivots, echelon insert
            while True:
                hit = [c for c in row if c in piv]
                if not hit:
                    break
                c = min(hit)
                coeff = row.pop(c)
                for c2, v in piv[c].items():
                    if c2 == c:
                        continue
                    s = row.get(c2, _ZERO) - coeff * v
                    if s:
                        row[c2] = s
                    else:
                        row.pop(c2, None)
            if row:
                p0 = min(row)
                inv = row[p0].inverse()
                piv[p0] = {c: v * inv for c, v in row.items()}
    out = []
    for f in range(len(monos)):
        if f in piv:
            continue
        v = {f: _ONE}
        for c in sorted(piv, reverse=True):
            acc = _ZERO
            for c2, w in piv[c].items():
                if c2 != c and c2 in v:
                    acc = acc + w * v[c2]
            if acc:
                v[c] = -acc
        out.append(Poly(vars, {monos[c]: cv for c, cv in v.items()}))
    return out


def invariant_basis(G: MatrixGroup, d: int, vars=None):
    """Echelonized basis of degree-d G-invariants; size matches Molien."""
    vars = vars if vars is not None else coord_names(G.dim)
    target = int(molien(G, d)[d])
    if target == 0:
        return []
    echelon = {}
    found = 0
    nmono = _binom(len(vars) + d - 1, d)
    if G.gen_indices and G.order * nmono > 4000:
        for r in _generator_kernel(G, d, vars):
            if _echelon_insert(echelon, r):
                found += 1
    else:
        for exp in monomials_of_degree(len(vars), d):
            m = Poly.monomial(vars, exp)
            r = reynolds(G, m)
            if r and _echelon_insert(echelon, r):
                found += 1
                if found == target:
                    break
    assert found == target, f"found {found} of {target} invariants"
    basis = sorted(echelon.values(), key=lambda p: _monomial_key(max(p.terms, key=_monomial_key)), reverse=True)
    return basis


def is_invariant(G: MatrixGroup, f: Poly) -> bool:
    return all(f.subst(G.element(i)) == f for i in G.gen_indices) if G.gen_indices \
        else True


def bracket_closure_check(G: MatrixGroup, D: int):
    """Brackets of invariants up to degree D stay invariant and land in the
    expected graded piece; returns a report dict."""
    P = standard_bivector(G.space)
    bases = {d: invariant_basis(G, d) for d in range(D + 1)}
    checked = 0
    ok = True
    for p in range(1, D + 1):
        for q in range(p, D + 1):
            if p + q - 2 > D:
                continue
            for f in bases[p]:
                for g in bases[q]:
                    h = bracket(f, g, P)
                    checked += 1
                    if not h:
                        continue
                    if not (h.is_homogeneous() and h.degree() == p + q - 2):
                        ok = False
                    if not is_invariant(G, h):
                        ok = False
    return {"brackets_checked": checked, "closed": ok}
