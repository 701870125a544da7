"""Truncated Poisson cohomology of invariant rings.

The invariant ring A = C[V]^G is a graded Poisson algebra whose bracket
lowers degree by 2.  This module materializes A up to a degree window D
(multiplication and bracket tables over Q), then solves exact linear
systems for HP^0 (Poisson center), HP^1 (Poisson derivations modulo
Hamiltonian ones) and HP^2 (first-order deformations of the pair
(product, bracket) modulo gauge), and extends a first-order class to
second order in the deformation parameter (one Maurer-Cartan step).

Truncation soundness: a condition row enters a system only when every
term of it is expressible inside the window, and a cohomological degree
m is reported as certified only when the window provably contains the
conditions that pin degree-m cochains; see hp1 and hp2_first_order.
"""

from dataclasses import dataclass
from fractions import Fraction

from .poisson import (Poly, bracket, coord_names, invariant_basis,
                      monomials_of_degree, standard_bivector, _monomial_key)


class Obstructed(RuntimeError):
    """Order-2 extension is inconsistent; carries the residual rows."""

    def __init__(self, residual):
        super().__init__(f"Maurer-Cartan step obstructed ({len(residual)} residual rows)")
        self.residual = residual


class InvalidCocycle(ValueError):
    pass


# -- sparse exact linear algebra over Q ---------------------------------------

_RHS = -1   # reserved augmented column, never eligible as pivot


class _LinSystem:
    """Online sparse Gaussian elimination with integer column keys.

    Rows go in echelon form (each reduced against earlier pivots only);
    nullspace and particular-solution extraction back-substitute.  reduce()
    returns the canonical coset representative, no pivot-column support.
    """

    def __init__(self):
        self.piv = {}           # pivot column -> row dict (pivot coeff 1)
        self.residual = []      # reduced rows supported on _RHS only

    def reduce(self, row):
        row = dict(row)
        while True:
            hit = [c for c in row if c in self.piv]
            if not hit:
                return row
            c = min(hit)
            coeff = row.pop(c)
            for c2, v in self.piv[c].items():
                if c2 == c:
                    continue
                s = row.get(c2, 0) - coeff * v
                if s:
                    row[c2] = s
                else:
                    row.pop(c2, None)

    def add_row(self, row):
        """Insert one relation; returns True if the rank grew."""
        row = self.reduce(row)
        cols = [c for c in row if c != _RHS]
        if not cols:
            if row.get(_RHS):
                self.residual.append(row)
            return False
        p = min(cols)
        inv = Fraction(1) / row[p]
        self.piv[p] = {c: v * inv for c, v in row.items()}
        return True

    @property
    def rank(self):
        return len(self.piv)

    @property
    def inconsistent(self):
        return bool(self.residual)

    def nullspace(self, ncols):
        out = []
        for f in range(ncols):
            if f not in self.piv:
                out.append(self._solve(f))
        return out

    def _solve(self, free):
        """Kernel vector with entry 1 at the free column (RHS entries ignored)."""
        v = {free: Fraction(1)}
        for c in sorted(self.piv, reverse=True):
            acc = Fraction(0)
            for c2, w in self.piv[c].items():
                if c2 != c and c2 != _RHS:
                    x = v.get(c2)
                    if x:
                        acc += w * x
            if acc:
                v[c] = -acc
        return v

    def particular_solution(self):
        """Free variables set to 0; None if the system is inconsistent."""
        if self.inconsistent:
            return None
        sol = {}
        for c in sorted(self.piv, reverse=True):
            acc = self.piv[c].get(_RHS, Fraction(0))
            for c2, w in self.piv[c].items():
                if c2 != c and c2 != _RHS:
                    x = sol.get(c2)
                    if x:
                        acc += w * x
            if acc:
                sol[c] = -acc
        return sol


class _Cols:
    """Assigns dense integer ids to hashable column keys."""

    def __init__(self):
        self.ids = {}
        self.keys = []

    def __call__(self, key):
        i = self.ids.get(key)
        if i is None:
            i = len(self.keys)
            self.ids[key] = i
            self.keys.append(key)
        return i

    def __len__(self):
        return len(self.keys)


def _racc(rows, k, col, v):
    if not v:
        return
    r = rows.setdefault(k, {})
    s = r.get(col, 0) + v
    if s:
        r[col] = s
    else:
        del r[col]


# -- the truncated algebra ----------------------------------------------------


@dataclass(frozen=True)
class TruncatedGradedAlgebra:
    """C[V]^G up to degree D: bases, multiplication and bracket tables.

    mult[(p, q)][(i, j)] (p <= q, p+q <= D) expands b_i^(p) * b_j^(q) in
    the degree-(p+q) basis as {k: coefficient}; brk does the same for the
    Poisson bracket, landing in degree p+q-2 and stored for p+q <= D+2.
    gen_counts[d] counts basis elements of degree d not spanned by
    products of lower-degree invariants.
    """

    D: int
    dims: tuple
    basis: tuple
    mult: dict
    brk: dict
    gen_counts: dict

    def n(self, d):
        return self.dims[d] if 0 <= d <= self.D else 0

    @property
    def gen_degrees(self):
        return tuple(sorted(d for d, c in self.gen_counts.items() if c))

    @property
    def max_gen_degree(self):
        degs = self.gen_degrees
        return max(degs) if degs else 1

    def mul_cc(self, p, i, q, j):
        if p > q:
            p, q, i, j = q, p, j, i
        return self.mult.get((p, q), {}).get((i, j), {})

    def brk_cc(self, p, i, q, j):
        if p > q:
            ent = self.brk.get((q, p), {}).get((j, i), {})
            return {k: -v for k, v in ent.items()}
        return self.brk.get((p, q), {}).get((i, j), {})

    def elements(self, max_degree=None):
        top = self.D if max_degree is None else max_degree
        return [(d, i) for d in range(top + 1) for i in range(self.n(d))]

    def to_json(self):
        return {"D": self.D, "dims": list(self.dims),
                "gen_degrees": list(self.gen_degrees)}


def _expand(poly, lead_map):
    """Coordinates of poly in an echelonized basis keyed by leading monomial."""
    out = {}
    p = poly
    while p:
        lead = max(p.terms, key=_monomial_key)
        i, b = lead_map[lead]
        c = p.terms[lead]
        out[i] = c.to_fraction()
        p = p - b.scale(c)
    return out


def _tables_from_polys(D, basis, pbrk):
    """Multiplication and bracket tables for echelonized graded bases."""
    lead_maps = [{max(b.terms, key=_monomial_key): (i, b) for i, b in enumerate(bd)}
                 for bd in basis]
    mult = {}
    for p in range(D + 1):
        for q in range(p, D + 1 - p):
            tab = {}
            for i, bi in enumerate(basis[p]):
                for j, bj in enumerate(basis[q]):
                    ent = _expand(bi * bj, lead_maps[p + q])
                    if ent:
                        tab[(i, j)] = ent
            mult[(p, q)] = tab
    brk = {}
    for p in range(D + 1):
        for q in range(p, min(D, D + 2 - p) + 1):
            if p + q < 2:
                continue
            tab = {}
            for i, bi in enumerate(basis[p]):
                for j, bj in enumerate(basis[q]):
                    h = pbrk(bi, bj)
                    if h:
                        tab[(i, j)] = _expand(h, lead_maps[p + q - 2])
            brk[(p, q)] = tab
    return mult, brk


def _generator_counts(D, dims, mult):
    out = {}
    for d in range(1, D + 1):
        if not dims[d]:
            continue
        span = _LinSystem()
        r = 0
        for p in range(1, d // 2 + 1):
            for ent in mult[(p, d - p)].values():
                r += span.add_row(dict(ent))
        out[d] = dims[d] - r
    return out


def build_truncated(G, D):
    """Tables of C[V]^G through degree D; exact over Q."""
    assert D >= 2
    vars = coord_names(G.dim)
    P = standard_bivector(G.space)
    basis = tuple(tuple(invariant_basis(G, d, vars)) for d in range(D + 1))
    dims = tuple(len(b) for b in basis)
    assert dims[0] == 1 and basis[0][0] == Poly.const(vars, 1)
    mult, brk = _tables_from_polys(D, basis, lambda f, g: bracket(f, g, P))
    gen_counts = _generator_counts(D, dims, mult)
    return TruncatedGradedAlgebra(D, dims, basis, mult, brk, gen_counts)


def polynomial_truncation(nvars, D, P=None):
    """Plain C[x_1..x_n] through degree D; bracket from matrix P (default 0)."""
    vars = tuple(f"x{i + 1}" for i in range(nvars))
    basis = tuple(tuple(Poly.monomial(vars, e) for e in monomials_of_degree(nvars, d))
                  for d in range(D + 1))
    dims = tuple(len(b) for b in basis)
    pbrk = (lambda f, g: Poly.zero(vars)) if P is None else \
        (lambda f, g: bracket(f, g, P))
    mult, brk = _tables_from_polys(D, basis, pbrk)
    gen_counts = _generator_counts(D, dims, mult)
    return TruncatedGradedAlgebra(D, dims, basis, mult, brk, gen_counts)


def _vec_add(acc, ent, scale=1):
    for k, v in ent.items():
        s = acc.get(k, 0) + scale * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


def audit_truncated(A):
    """Exhaustive in-window associativity / Leibniz / Jacobi check."""
    D = A.D
    els = A.elements()
    ok_assoc = ok_leib = ok_jac = True
    for p, i in els:
        for q, j in els:
            for r, k in els:
                s = p + q + r
                if s <= D:
                    left = {}
                    for t, v in A.mul_cc(p, i, q, j).items():
                        _vec_add(left, A.mul_cc(p + q, t, r, k), v)
                    right = {}
                    for t, v in A.mul_cc(q, j, r, k).items():
                        _vec_add(right, A.mul_cc(p, i, q + r, t), v)
                    ok_assoc &= left == right
                if q + r <= D and 2 <= s <= D + 2:
                    lhs = {}
                    for t, v in A.mul_cc(q, j, r, k).items():
                        _vec_add(lhs, A.brk_cc(p, i, q + r, t), v)
                    rhs = {}
                    for t, v in A.brk_cc(p, i, q, j).items():
                        _vec_add(rhs, A.mul_cc(p + q - 2, t, r, k), v)
                    for t, v in A.brk_cc(p, i, r, k).items():
                        _vec_add(rhs, A.mul_cc(q, j, p + r - 2, t), v)
                    ok_leib &= lhs == rhs
                if s <= D + 4 and max(p + q, q + r, p + r) <= D + 2:
                    acc = {}
                    for (u, a), (v, b), (w, c) in (((p, i), (q, j), (r, k)),
                                                   ((q, j), (r, k), (p, i)),
                                                   ((r, k), (p, i), (q, j))):
                        for t, x in A.brk_cc(v, b, w, c).items():
                            _vec_add(acc, A.brk_cc(u, a, v + w - 2, t), x)
                    ok_jac &= not acc
    return {"associative": ok_assoc, "leibniz": ok_leib, "jacobi": ok_jac}


# -- HP^0: the Poisson center ---------------------------------------------------


def hp0(A, window=None):
    """Per degree d <= D-2: dim{z in A_d : {z, A_p} = 0 whenever in window}."""
    D = A.D if window is None else min(window, A.D)
    out = []
    for d in range(D - 1):
        sys = _LinSystem()
        for p in range(D + 1):
            if not (0 <= d + p - 2 <= D):
                continue
            for j in range(A.n(p)):
                rows = {}
                for i in range(A.n(d)):
                    for k, v in A.brk_cc(d, i, p, j).items():
                        _racc(rows, k, i, v)
                for row in rows.values():
                    sys.add_row(row)
        out.append(A.n(d) - sys.rank)
    return out


# -- reports --------------------------------------------------------------------


@dataclass(frozen=True)
class HPReport:
    k: int
    window: int
    entries: tuple     # (m, dim, certified) with m ascending

    def dim(self, m):
        for mm, d, _ in self.entries:
            if mm == m:
                return d
        return None

    def certified_total(self):
        return sum(d for _, d, cert in self.entries if cert)

    def to_json(self):
        return {
            "k": self.k,
            "window": self.window,
            "certified": [{"m": m, "dim": d} for m, d, c in self.entries if c],
            "uncertified": [{"m": m, "dim": d} for m, d, c in self.entries if not c],
        }


# -- HP^1 -------------------------------------------------------------------------


def _hp1_cols(A, m, cols):
    for p, i in A.elements():
        for t in range(A.n(p + m)):
            cols(("f", p, i, t))


def _hp1_rows(A, m, cols):
    """Rows forcing a degree-m map f to derive both product and bracket."""
    D = A.D
    els = A.elements()
    for x, (p, i) in enumerate(els):
        for q, j in els[x:]:
            # f(ab) - a f(b) - b f(a) = 0 in degree p+q+m
            if p + q <= D and 0 <= p + q + m <= D and A.n(p + q + m):
                rows = {}
                n_t = A.n(p + q + m)
                for t, v in A.mul_cc(p, i, q, j).items():
                    for k in range(n_t):
                        _racc(rows, k, cols(("f", p + q, t, k)), v)
                for t in range(A.n(q + m)):
                    col = cols(("f", q, j, t))
                    for k, w in A.mul_cc(p, i, q + m, t).items():
                        _racc(rows, k, col, -w)
                for t in range(A.n(p + m)):
                    col = cols(("f", p, i, t))
                    for k, w in A.mul_cc(q, j, p + m, t).items():
                        _racc(rows, k, col, -w)
                for row in rows.values():
                    if row:
                        yield row
            # f({a,b}) - {f(a),b} - {a,f(b)} = 0 in degree p+q+m-2
            if (p, i) != (q, j) and p + q <= D + 2 and 0 <= p + q + m - 2 <= D \
                    and p + m <= D and q + m <= D and A.n(p + q + m - 2):
                rows = {}
                if 0 <= p + q - 2:
                    n_t = A.n(p + q + m - 2)
                    for t, v in A.brk_cc(p, i, q, j).items():
                        for k in range(n_t):
                            _racc(rows, k, cols(("f", p + q - 2, t, k)), v)
                for t in range(A.n(p + m)):
                    col = cols(("f", p, i, t))
                    for k, w in A.brk_cc(p + m, t, q, j).items():
                        _racc(rows, k, col, -w)
                for t in range(A.n(q + m)):
                    col = cols(("f", q, j, t))
                    for k, w in A.brk_cc(p, i, q + m, t).items():
                        _racc(rows, k, col, -w)
                for row in rows.values():
                    if row:
                        yield row


def _hamiltonian_vectors(A, m, cols):
    """Images of c in A_{m+2} under c -> {c, -}, as column vectors."""
    if not (0 <= m + 2 <= A.D):
        return
    for s in range(A.n(m + 2)):
        vec = {}
        for p, i in A.elements():
            if not (0 <= p + m <= A.D):
                continue
            for t, v in A.brk_cc(m + 2, s, p, i).items():
                vec[cols(("f", p, i, t))] = v
        if vec:
            yield vec


def hp1(A, m_range=None):
    """Poisson derivations modulo Hamiltonian ones, per degree m.

    Degree m is certified when m + 2*max_gen_degree <= D: the relations of
    the invariant ring live in degree <= 2*max_gen_degree, so every
    generator-level constraint on a degree-m derivation then fits in the
    window.
    """
    D = A.D
    g = A.max_gen_degree
    if m_range is None:
        m_range = range(-D, min(D, D - 2 * g + 2) + 1)
    entries = []
    for m in m_range:
        cols = _Cols()
        _hp1_cols(A, m, cols)
        nvars = len(cols)
        if nvars == 0:
            entries.append((m, 0, m + 2 * g <= D))
            continue
        sys = _LinSystem()
        for row in _hp1_rows(A, m, cols):
            sys.add_row(row)
        qsys = _LinSystem()
        for vec in _hamiltonian_vectors(A, m, cols):
            qsys.add_row(vec)
        dim = 0
        for v in sys.nullspace(nvars):
            dim += qsys.add_row(v)
        entries.append((m, dim, m + 2 * g <= D))
    return HPReport(1, D, tuple(entries))


# -- HP^2: first-order deformations of (product, bracket) -------------------------


@dataclass(frozen=True)
class CochainPair:
    """Degree-m deformation pair: phi perturbs the product into degree
    p+q+m, psi perturbs the bracket into degree p+q+m-2.

    Components are stored on canonical index pairs ((p,i) <= (q,j) for phi,
    strict for psi) as {target index: Fraction}.
    """

    m: int
    phi: dict
    psi: dict

    def phi_at(self, p, i, q, j):
        if (p, i) <= (q, j):
            return self.phi.get((p, i, q, j), {})
        return self.phi.get((q, j, p, i), {})

    def psi_at(self, p, i, q, j):
        if (p, i) < (q, j):
            return self.psi.get((p, i, q, j), {})
        if (p, i) > (q, j):
            ent = self.psi.get((q, j, p, i), {})
            return {k: -v for k, v in ent.items()}
        return {}

    def is_zero(self):
        return not (self.phi or self.psi)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return CochainPair(self.m, {}, {})
        return CochainPair(
            self.m,
            {key: {k: c * v for k, v in ent.items()} for key, ent in self.phi.items()},
            {key: {k: c * v for k, v in ent.items()} for key, ent in self.psi.items()})

    def __add__(self, other):
        assert self.m == other.m
        def merge(a, b):
            out = {key: dict(ent) for key, ent in a.items()}
            for key, ent in b.items():
                cur = out.setdefault(key, {})
                for k, v in ent.items():
                    s = cur.get(k, 0) + v
                    if s:
                        cur[k] = s
                    else:
                        cur.pop(k, None)
            return {key: ent for key, ent in out.items() if ent}
        return CochainPair(self.m, merge(self.phi, other.phi),
                           merge(self.psi, other.psi))

    def __eq__(self, other):
        return (isinstance(other, CochainPair) and self.m == other.m
                and self.phi == other.phi and self.psi == other.psi)

    def to_json(self):
        def block(d):
            return [{"p": p, "i": i, "q": q, "j": j,
                     "coeffs": [{"k": k, "c": str(ent[k])} for k in sorted(ent)]}
                    for (p, i, q, j), ent in sorted(d.items())]
        return {"m": self.m, "phi": block(self.phi), "psi": block(self.psi)}


def _phi_grid(A, m):
    els = A.elements()
    out = []
    for x, (p, i) in enumerate(els):
        for q, j in els[x:]:
            if p + q <= A.D and 0 <= p + q + m <= A.D and A.n(p + q + m):
                out.append((p, i, q, j))
    return out


def _psi_grid(A, m):
    els = A.elements()
    out = []
    for x, (p, i) in enumerate(els):
        for q, j in els[x + 1:]:
            if p + q <= A.D + 2 and 0 <= p + q + m - 2 <= A.D and A.n(p + q + m - 2):
                out.append((p, i, q, j))
    return out


def _hp2_cols(A, m, cols):
    for p, i, q, j in _phi_grid(A, m):
        for k in range(A.n(p + q + m)):
            cols(("phi", p, i, q, j, k))
    for p, i, q, j in _psi_grid(A, m):
        for k in range(A.n(p + q + m - 2)):
            cols(("psi", p, i, q, j, k))


def _phi_col(cols, p, i, q, j, k):
    if (p, i) <= (q, j):
        return cols(("phi", p, i, q, j, k)), 1
    return cols(("phi", q, j, p, i, k)), 1


def _psi_col(cols, p, i, q, j, k):
    if (p, i) < (q, j):
        return cols(("psi", p, i, q, j, k)), 1
    if (p, i) > (q, j):
        return cols(("psi", q, j, p, i, k)), -1
    return None, 0


def _hp2_rows(A, m, cols):
    """First-order cocycle rows: associativity of phi, the Leibniz coupling
    of (phi, psi), and Jacobi for psi, each where fully in window."""
    D = A.D
    els = A.elements()

    # associativity: phi(a,b)c + phi(ab,c) - a phi(b,c) - phi(a,bc) = 0
    for x, (p, i) in enumerate(els):
        for q, j in els:
            for r, k2 in els[x:]:
                if (p, i) == (r, k2):
                    continue
                s = p + q + r
                if s > D or not (0 <= s + m <= D) or not A.n(s + m):
                    continue
                rows = {}
                n_t = A.n(s + m)
                for t in range(A.n(p + q + m)):
                    col, sg = _phi_col(cols, p, i, q, j, t)
                    for k, w in A.mul_cc(p + q + m, t, r, k2).items():
                        _racc(rows, k, col, sg * w)
                for t, v in A.mul_cc(p, i, q, j).items():
                    for k in range(n_t):
                        col, sg = _phi_col(cols, p + q, t, r, k2, k)
                        _racc(rows, k, col, sg * v)
                for t in range(A.n(q + r + m)):
                    col, sg = _phi_col(cols, q, j, r, k2, t)
                    for k, w in A.mul_cc(p, i, q + r + m, t).items():
                        _racc(rows, k, col, -sg * w)
                for t, v in A.mul_cc(q, j, r, k2).items():
                    for k in range(n_t):
                        col, sg = _phi_col(cols, p, i, q + r, t, k)
                        _racc(rows, k, col, -sg * v)
                for row in rows.values():
                    if row:
                        yield row

    # Leibniz coupling:
    # psi(a,bc) + {a,phi(b,c)} - phi({a,b},c) - psi(a,b)c - phi(b,{a,c}) - b psi(a,c) = 0
    for p, i in els:
        for y, (q, j) in enumerate(els):
            for r, k2 in els[y:]:
                s = p + q + r
                if q + r > D or s > D + 2 or not (0 <= s + m - 2 <= D) \
                        or not A.n(s + m - 2):
                    continue
                if q + r + m > D and p > 0:
                    continue   # {a, phi(b,c)} would reference an unstored component
                rows = {}
                n_t = A.n(s + m - 2)
                for t, v in A.mul_cc(q, j, r, k2).items():
                    for k in range(n_t):
                        col, sg = _psi_col(cols, p, i, q + r, t, k)
                        if sg:
                            _racc(rows, k, col, sg * v)
                if p > 0:
                    for t in range(A.n(q + r + m)):
                        col, sg = _phi_col(cols, q, j, r, k2, t)
                        for k, w in A.brk_cc(p, i, q + r + m, t).items():
                            _racc(rows, k, col, sg * w)
                for t, v in A.brk_cc(p, i, q, j).items():
                    for k in range(n_t):
                        col, sg = _phi_col(cols, p + q - 2, t, r, k2, k)
                        _racc(rows, k, col, -sg * v)
                for t in range(A.n(p + q + m - 2)):
                    col, sg = _psi_col(cols, p, i, q, j, t)
                    if sg:
                        for k, w in A.mul_cc(p + q + m - 2, t, r, k2).items():
                            _racc(rows, k, col, -sg * w)
                for t, v in A.brk_cc(p, i, r, k2).items():
                    for k in range(n_t):
                        col, sg = _phi_col(cols, q, j, p + r - 2, t, k)
                        _racc(rows, k, col, -sg * v)
                for t in range(A.n(p + r + m - 2)):
                    col, sg = _psi_col(cols, p, i, r, k2, t)
                    if sg:
                        for k, w in A.mul_cc(q, j, p + r + m - 2, t).items():
                            _racc(rows, k, col, -sg * w)
                for row in rows.values():
                    if row:
                        yield row

    # Jacobi: cyclic sum of psi(a,{b,c}) + {a,psi(b,c)} = 0
    for x, (p, i) in enumerate(els):
        for y, (q, j) in enumerate(els[x + 1:], x + 1):
            for r, k2 in els[y + 1:]:
                s = p + q + r
                if s > D + 4 or max(p + q, q + r, p + r) > D + 2 \
                        or not (0 <= s + m - 4 <= D) or not A.n(s + m - 4):
                    continue
                trip = ((p, i), (q, j), (r, k2))
                ok = True
                for c in range(3):
                    (u, _), (v, _), (w, _) = trip[c], trip[(c + 1) % 3], trip[(c + 2) % 3]
                    if v + w + m - 2 > D and u > 0:
                        ok = False   # {a, psi(b,c)} escapes the window
                if not ok:
                    continue
                rows = {}
                n_t = A.n(s + m - 4)
                for c in range(3):
                    (u, a), (v, b), (w, cc) = trip[c], trip[(c + 1) % 3], trip[(c + 2) % 3]
                    for t, x2 in A.brk_cc(v, b, w, cc).items():
                        for k in range(n_t):
                            col, sg = _psi_col(cols, u, a, v + w - 2, t, k)
                            if sg:
                                _racc(rows, k, col, sg * x2)
                    if u > 0:
                        for t in range(A.n(v + w + m - 2)):
                            col, sg = _psi_col(cols, v, b, w, cc, t)
                            if sg:
                                for k, x2 in A.brk_cc(u, a, v + w + m - 2, t).items():
                                    _racc(rows, k, col, sg * x2)
                for row in rows.values():
                    if row:
                        yield row


def _gauge_vector(A, m, cols, p0, i0, t0):
    """(df, delta f) for the elementary f sending b_{i0}^(p0) to b_{t0}^(p0+m)."""
    vec = {}
    for p, i, q, j in _phi_grid(A, m):
        if p + q == p0:
            v = A.mul_cc(p, i, q, j).get(i0)
            if v:
                col, _ = _phi_col(cols, p, i, q, j, t0)
                vec[col] = vec.get(col, 0) + v
        if (q, j) == (p0, i0):
            for k, w in A.mul_cc(p, i, p0 + m, t0).items():
                col, _ = _phi_col(cols, p, i, q, j, k)
                s = vec.get(col, 0) - w
                if s:
                    vec[col] = s
                else:
                    vec.pop(col, None)
        if (p, i) == (p0, i0):
            for k, w in A.mul_cc(q, j, p0 + m, t0).items():
                col, _ = _phi_col(cols, p, i, q, j, k)
                s = vec.get(col, 0) - w
                if s:
                    vec[col] = s
                else:
                    vec.pop(col, None)
    for p, i, q, j in _psi_grid(A, m):
        if p + q - 2 == p0:
            v = A.brk_cc(p, i, q, j).get(i0)
            if v:
                col, _ = _psi_col(cols, p, i, q, j, t0)
                vec[col] = vec.get(col, 0) + v
        if (p, i) == (p0, i0):
            for k, w in A.brk_cc(p0 + m, t0, q, j).items():
                col, _ = _psi_col(cols, p, i, q, j, k)
                s = vec.get(col, 0) - w
                if s:
                    vec[col] = s
                else:
                    vec.pop(col, None)
        if (q, j) == (p0, i0):
            for k, w in A.brk_cc(p, i, p0 + m, t0).items():
                col, _ = _psi_col(cols, p, i, q, j, k)
                s = vec.get(col, 0) - w
                if s:
                    vec[col] = s
                else:
                    vec.pop(col, None)
    return {c: Fraction(v) for c, v in vec.items() if v}


def _gauge_vectors(A, m, cols):
    for p, i in A.elements():
        for t in range(A.n(p + m)):
            v = _gauge_vector(A, m, cols, p, i, t)
            if v:
                yield v


def coboundary_pair(A, m, f):
    """(df, delta f) for the degree-m map given as {(p, i): {t: coeff}}."""
    cols = _Cols()
    _hp2_cols(A, m, cols)
    vec = {}
    for (p, i), ent in f.items():
        for t, c in ent.items():
            for col, v in _gauge_vector(A, m, cols, p, i, t).items():
                s = vec.get(col, 0) + c * v
                if s:
                    vec[col] = s
                else:
                    vec.pop(col, None)
    return _pair_from_vec(m, cols, vec)


def _pair_from_vec(m, cols, vec):
    phi, psi = {}, {}
    for c, v in vec.items():
        if c == _RHS or not v:
            continue
        key = cols.keys[c]
        store = phi if key[0] == "phi" else psi
        _, p, i, q, j, k = key
        store.setdefault((p, i, q, j), {})[k] = Fraction(v)
    return CochainPair(m, phi, psi)


def _vec_from_pair(A, cols, pair):
    vec = {}
    for (p, i, q, j), ent in pair.phi.items():
        for k, v in ent.items():
            vec[cols(("phi", p, i, q, j, k))] = Fraction(v)
    for (p, i, q, j), ent in pair.psi.items():
        for k, v in ent.items():
            vec[cols(("psi", p, i, q, j, k))] = Fraction(v)
    return vec


def gauge_reduce(A, pair):
    """Canonical representative of pair modulo coboundary pairs."""
    cols = _Cols()
    _hp2_cols(A, pair.m, cols)
    qsys = _LinSystem()
    for gv in _gauge_vectors(A, pair.m, cols):
        qsys.add_row(gv)
    return _pair_from_vec(pair.m, cols, qsys.reduce(_vec_from_pair(A, cols, pair)))


def hp2_first_order(A, m_range=None, with_reps=True):
    """First-order Poisson deformations modulo gauge, per degree m.

    Returns (HPReport, {m: tuple of CochainPair basis representatives}).
    Degree m is certified when m <= 0 and m + 3*max_gen_degree <= D:
    generator triples then fit in the window together with the
    relation-level consequences that pin degree-m pairs.  Degree-raising
    pairs (m > 0) are never certified; the conditions that would cut
    their junk cocycles leave every finite window.
    """
    D = A.D
    g = A.max_gen_degree
    if m_range is None:
        m_range = range(-D, min(D, D - 3 * g + 2) + 1)
    entries = []
    reps = {}
    for m in m_range:
        cols = _Cols()
        _hp2_cols(A, m, cols)
        nvars = len(cols)
        certified = m <= 0 and m + 3 * g <= D
        if nvars == 0:
            entries.append((m, 0, certified))
            continue
        sys = _LinSystem()
        for row in _hp2_rows(A, m, cols):
            sys.add_row(row)
        qsys = _LinSystem()
        for gv in _gauge_vectors(A, m, cols):
            qsys.add_row(gv)
        found = []
        for v in sys.nullspace(nvars):
            vr = qsys.reduce(v)
            if any(c != _RHS for c in vr):
                found.append(_pair_from_vec(m, cols, vr))
                qsys.add_row(vr)
        entries.append((m, len(found), certified))
        if found and with_reps:
            reps[m] = tuple(found)
    return HPReport(2, D, tuple(entries)), reps


# -- order-2 Maurer-Cartan step ----------------------------------------------------


def _mc_rows(A, parts, mu, cols):
    """Rows of the degree-mu piece of the order-2 system: the cocycle
    operators at degree mu on the unknown pair, with the quadratic source
    of the first-order parts on the right-hand side."""
    D = A.D
    m2 = mu
    dpairs = [(gi, gj) for gi in parts for gj in parts if gi.m + gj.m == mu]
    els = A.elements()

    # associativity at order 2
    for x, (p, i) in enumerate(els):
        for q, j in els:
            for r, k2 in els[x:]:
                if (p, i) == (r, k2):
                    continue
                s = p + q + r
                if s > D or not (0 <= s + m2 <= D) or not A.n(s + m2):
                    continue
                if any(s + gj.m > D for _, gj in dpairs):
                    continue   # an outer first-order pair would leave the grid
                rows = {}
                n_t = A.n(s + m2)
                for t in range(A.n(p + q + m2)):
                    col, sg = _phi_col(cols, p, i, q, j, t)
                    for k, w in A.mul_cc(p + q + m2, t, r, k2).items():
                        _racc(rows, k, col, sg * w)
                for t, v in A.mul_cc(p, i, q, j).items():
                    for k in range(n_t):
                        col, sg = _phi_col(cols, p + q, t, r, k2, k)
                        _racc(rows, k, col, sg * v)
                for t in range(A.n(q + r + m2)):
                    col, sg = _phi_col(cols, q, j, r, k2, t)
                    for k, w in A.mul_cc(p, i, q + r + m2, t).items():
                        _racc(rows, k, col, -sg * w)
                for t, v in A.mul_cc(q, j, r, k2).items():
                    for k in range(n_t):
                        col, sg = _phi_col(cols, p, i, q + r, t, k)
                        _racc(rows, k, col, -sg * v)
                # RHS: sum of phi_i(a, phi_j(b,c)) - phi_i(phi_j(a,b), c)
                for gi, gj in dpairs:
                    mj = gj.m
                    for t, v in gj.phi_at(q, j, r, k2).items():
                        for k, w in gi.phi_at(p, i, q + r + mj, t).items():
                            _racc(rows, k, _RHS, -v * w)
                    for t, v in gj.phi_at(p, i, q, j).items():
                        for k, w in gi.phi_at(p + q + mj, t, r, k2).items():
                            _racc(rows, k, _RHS, v * w)
                for row in rows.values():
                    if row:
                        yield row

    # Leibniz coupling at order 2
    for p, i in els:
        for y, (q, j) in enumerate(els):
            for r, k2 in els[y:]:
                s = p + q + r
                if q + r > D or s > D + 2 or not (0 <= s + m2 - 2 <= D) \
                        or not A.n(s + m2 - 2):
                    continue
                if q + r + m2 > D and p > 0:
                    continue
                if any(s + gj.m > D + 2 for _, gj in dpairs):
                    continue   # RHS would reference a part outside its grid
                rows = {}
                n_t = A.n(s + m2 - 2)
                for t, v in A.mul_cc(q, j, r, k2).items():
                    for k in range(n_t):
                        col, sg = _psi_col(cols, p, i, q + r, t, k)
                        if sg:
                            _racc(rows, k, col, sg * v)
                if p > 0:
                    for t in range(A.n(q + r + m2)):
                        col, sg = _phi_col(cols, q, j, r, k2, t)
                        for k, w in A.brk_cc(p, i, q + r + m2, t).items():
                            _racc(rows, k, col, sg * w)
                for t, v in A.brk_cc(p, i, q, j).items():
                    for k in range(n_t):
                        col, sg = _phi_col(cols, p + q - 2, t, r, k2, k)
                        _racc(rows, k, col, -sg * v)
                for t in range(A.n(p + q + m2 - 2)):
                    col, sg = _psi_col(cols, p, i, q, j, t)
                    if sg:
                        for k, w in A.mul_cc(p + q + m2 - 2, t, r, k2).items():
                            _racc(rows, k, col, -sg * w)
                for t, v in A.brk_cc(p, i, r, k2).items():
                    for k in range(n_t):
                        col, sg = _phi_col(cols, q, j, p + r - 2, t, k)
                        _racc(rows, k, col, -sg * v)
                for t in range(A.n(p + r + m2 - 2)):
                    col, sg = _psi_col(cols, p, i, r, k2, t)
                    if sg:
                        for k, w in A.mul_cc(q, j, p + r + m2 - 2, t).items():
                            _racc(rows, k, col, -sg * w)
                # RHS: sum of phi_i(psi_j(a,b), c) + phi_i(b, psi_j(a,c))
                #      - psi_i(a, phi_j(b,c))
                for gi, gj in dpairs:
                    mj = gj.m
                    for t, v in gj.psi_at(p, i, q, j).items():
                        for k, w in gi.phi_at(p + q + mj - 2, t, r, k2).items():
                            _racc(rows, k, _RHS, -v * w)
                    for t, v in gj.psi_at(p, i, r, k2).items():
                        for k, w in gi.phi_at(q, j, p + r + mj - 2, t).items():
                            _racc(rows, k, _RHS, -v * w)
                    for t, v in gj.phi_at(q, j, r, k2).items():
                        for k, w in gi.psi_at(p, i, q + r + mj, t).items():
                            _racc(rows, k, _RHS, v * w)
                for row in rows.values():
                    if row:
                        yield row

    # Jacobi at order 2
    for x, (p, i) in enumerate(els):
        for y, (q, j) in enumerate(els[x + 1:], x + 1):
            for r, k2 in els[y + 1:]:
                s = p + q + r
                if s > D + 4 or max(p + q, q + r, p + r) > D + 2 \
                        or not (0 <= s + m2 - 4 <= D) or not A.n(s + m2 - 4):
                    continue
                trip = ((p, i), (q, j), (r, k2))
                # else psi_i(a, psi_j(b,c)) escapes the grid:
                ok = all(s + gj.m <= D + 4 for _, gj in dpairs)
                for c in range(3):
                    (u, _), (v, _), (w, _) = trip[c], trip[(c + 1) % 3], trip[(c + 2) % 3]
                    if u > 0 and v + w + m2 - 2 > D:
                        ok = False
                if not ok:
                    continue
                rows = {}
                n_t = A.n(s + m2 - 4)
                for c in range(3):
                    (u, a), (v, b), (w, cc) = trip[c], trip[(c + 1) % 3], trip[(c + 2) % 3]
                    for t, x2 in A.brk_cc(v, b, w, cc).items():
                        for k in range(n_t):
                            col, sg = _psi_col(cols, u, a, v + w - 2, t, k)
                            if sg:
                                _racc(rows, k, col, sg * x2)
                    if u > 0:
                        for t in range(A.n(v + w + m2 - 2)):
                            col, sg = _psi_col(cols, v, b, w, cc, t)
                            if sg:
                                for k, x2 in A.brk_cc(u, a, v + w + m2 - 2, t).items():
                                    _racc(rows, k, col, sg * x2)
                    # RHS: - sum of psi_i(a, psi_j(b,c))
                    for gi, gj in dpairs:
                        for t, x2 in gj.psi_at(v, b, w, cc).items():
                            for k, x3 in gi.psi_at(u, a, v + w + gj.m - 2, t).items():
                                _racc(rows, k, _RHS, x2 * x3)
                for row in rows.values():
                    if row:
                        yield row


def _check_cocycle(A, pair):
    cols = _Cols()
    _hp2_cols(A, pair.m, cols)
    vec = _vec_from_pair(A, cols, pair)
    for row in _hp2_rows(A, pair.m, cols):
        acc = Fraction(0)
        for c, v in row.items():
            x = vec.get(c)
            if x:
                acc += v * x
        if acc:
            raise InvalidCocycle(f"order-1 condition violated (residual {acc})")


def mc_extend_multi(A, parts, window=None):
    """Order-2 corrections for a sum of homogeneous first-order pairs.

    Returns {mu: CochainPair} over the degrees mu = m_i + m_j of the
    quadratic source.  Raises InvalidCocycle if some part fails its
    in-window first-order conditions, Obstructed on inconsistency.
    """
    parts = [g for g in parts if not g.is_zero()]
    for g in parts:
        _check_cocycle(A, g)
    out = {}
    for mu in sorted({gi.m + gj.m for gi in parts for gj in parts}):
        cols = _Cols()
        _hp2_cols(A, mu, cols)
        sys = _LinSystem()
        for row in _mc_rows(A, parts, mu, cols):
            sys.add_row(row)
        sol = sys.particular_solution()
        if sol is None:
            raise Obstructed(sys.residual)
        out[mu] = _pair_from_vec(mu, cols, sol)
    return out


def mc_extend(A, gamma1, window=None):
    """Order-2 correction (phi2, psi2) for the first-order pair gamma1.

    Raises InvalidCocycle if gamma1 fails its in-window first-order
    conditions, Obstructed if the order-2 system is inconsistent.
    """
    if gamma1.is_zero():
        return CochainPair(2 * gamma1.m, {}, {})
    _check_cocycle(A, gamma1)
    mu = 2 * gamma1.m
    cols = _Cols()
    _hp2_cols(A, mu, cols)
    sys = _LinSystem()
    for row in _mc_rows(A, [gamma1], mu, cols):
        sys.add_row(row)
    sol = sys.particular_solution()
    if sol is None:
        raise Obstructed(sys.residual)
    return _pair_from_vec(mu, cols, sol)
