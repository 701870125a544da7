"""Polyvector fields with the Schouten bracket, smooth Poisson cohomology,
and the finite-dimensional Hochschild layer (Gerstenhaber bracket, shuffle
map, kappa embeddings).

Polyvectors are written in odd coordinates: a k-vector is a sum of
coeff * xi_S over k-subsets S, with polynomial coefficients. The bracket
convention is fixed by {X, f} = X(f) for a vector field X and
d f = {Theta, f} for the differential of a bivector Theta.

The Hochschild layer works over explicit finite-dimensional commutative
algebras with rational structure constants, where the Gerstenhaber
bracket, the shuffle map sh and the embeddings kappa are finite tensor
contractions. The bracket uses the standard sign package
[f,g] = f o g - (-1)^((k-1)(l-1)) g o f with
(f o g) = sum_i (-1)^((i-1)(l-1)) f(.., g(..), ..), under which [m,m]
vanishes exactly for associative m and the graded Jacobi identity holds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .exactlin import CycloNum
from .poisson import Poly, monomials_of_degree

_ONE = CycloNum.rational(1)


class JacobiViolated(ValueError):
    pass


# -------------------------------------------------------------------------
# Polyvector fields
# -------------------------------------------------------------------------


class Polyvector:
    """Sum of Poly coefficients times xi_S over sorted k-subsets S."""

    __slots__ = ("vars", "k", "terms")

    def __init__(self, vars, k, terms):
        self.vars = tuple(vars)
        self.k = k
        clean = {}
        for S, c in terms.items():
            S = tuple(S)
            assert len(S) == k and list(S) == sorted(S)
            if c:
                clean[S] = c
        self.terms = clean

    @classmethod
    def zero(cls, vars, k):
        return cls(vars, k, {})

    @classmethod
    def from_poly(cls, f: Poly):
        return cls(f.vars, 0, {(): f})

    @classmethod
    def basis_term(cls, vars, S, coeff) -> "Polyvector":
        return cls(vars, len(S), {tuple(S): coeff})

    def __add__(self, other):
        assert self.vars == other.vars
        if not other.terms:
            return self
        if not self.terms:
            return other
        assert self.k == other.k
        t = dict(self.terms)
        for S, c in other.terms.items():
            s = t.get(S)
            s = c if s is None else s + c
            if s:
                t[S] = s
            else:
                t.pop(S, None)
        return Polyvector(self.vars, self.k, t)

    def __neg__(self):
        return Polyvector(self.vars, self.k, {S: -c for S, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Polyvector(self.vars, self.k, {S: p.scale(c) for S, p in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Polyvector) or self.vars != other.vars:
            return NotImplemented
        if not self.terms and not other.terms:
            return True  # zero is arity-agnostic
        return self.k == other.k and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff_degree(self):
        return max((p.degree() for p in self.terms.values()), default=0)

    def is_coeff_homogeneous(self):
        degs = {sum(e) for p in self.terms.values() for e in p.terms}
        return len(degs) <= 1

    def to_json(self):
        return {
            "vars": list(self.vars),
            "arity": self.k,
            "terms": [{"subset": list(S), "coeff": self.terms[S].to_json()}
                      for S in sorted(self.terms)],
        }

    @classmethod
    def from_json(cls, obj):
        vars = tuple(obj["vars"])
        terms = {tuple(t["subset"]): Poly.from_json(t["coeff"]) for t in obj["terms"]}
        return cls(vars, obj["arity"], terms)

    def __repr__(self):
        if not self.terms:
            return f"0[{self.k}]"
        bits = []
        for S in sorted(self.terms):
            xi = "^".join(f"xi{i}" for i in S) or "1"
            bits.append(f"({self.terms[S]!r})*{xi}")
        return " + ".join(bits)


def _merge_sign(S, T):
    """Sign of sorting xi_S xi_T, or (None, 0) on collision."""
    if set(S) & set(T):
        return None, 0
    inv = sum(1 for a in S for b in T if a > b)
    merged = tuple(sorted(S + T))
    return merged, -1 if inv % 2 else 1


def schouten_bracket(P: Polyvector, Q: Polyvector) -> Polyvector:
    """Schouten bracket in odd coordinates.

    [P,Q] = (-1)^((p-1)q) sum_i dP/dxi_i dQ/dx_i
            + (-1)^q      sum_i dQ/dxi_i dP/dx_i
    with left xi-derivatives. This is the unique sign package (up to an
    overall arity-wise rescaling) with {X,f} = X(f), the Lie bracket on
    vector fields, graded skew-symmetry in degree p-1, and graded Jacobi.
    """
    assert P.vars == Q.vars
    vars = P.vars
    p, q = P.k, Q.k
    if p == 0 and q == 0:
        return Polyvector.zero(vars, 0)
    out = {}

    def accum(S, poly, sgn):
        if not poly:
            return
        c = poly.scale(sgn) if sgn != 1 else poly
        s = out.get(S)
        s = c if s is None else s + c
        if s:
            out[S] = s
        else:
            out.pop(S, None)

    sa = -1 if ((p - 1) * q) % 2 else 1
    sb = -1 if q % 2 else 1
    for S, cS in P.terms.items():
        for pos, i in enumerate(S):
            sgn1 = -1 if pos % 2 else 1
            Sm = S[:pos] + S[pos + 1:]
            for T, cT in Q.terms.items():
                dT = cT.diff(i)
                if not dT:
                    continue
                M, ms = _merge_sign(Sm, T)
                if M is not None:
                    accum(M, cS * dT, sa * sgn1 * ms)
    for T, cT in Q.terms.items():
        for pos, i in enumerate(T):
            sgn1 = -1 if pos % 2 else 1
            Tm = T[:pos] + T[pos + 1:]
            for S, cS in P.terms.items():
                dS = cS.diff(i)
                if not dS:
                    continue
                M, ms = _merge_sign(Tm, S)
                if M is not None:
                    accum(M, cT * dS, sb * sgn1 * ms)
    return Polyvector(vars, p + q - 1, out)


def bivector_field(P_mat, vars) -> Polyvector:
    """Theta = sum_{a<b} P[a][b] xi_a xi_b for an antisymmetric matrix."""
    n = len(vars)
    terms = {}
    for a in range(n):
        for b in range(a + 1, n):
            c = P_mat.rows[a][b]
            if c:
                terms[(a, b)] = Poly.const(vars, c)
    return Polyvector(vars, 2, terms)


def satisfies_jacobi(theta: Polyvector) -> bool:
    return not schouten_bracket(theta, theta)


def kb_differential(P: Polyvector, theta: Polyvector) -> Polyvector:
    """d P = [Theta, P]; requires [Theta, Theta] = 0."""
    if not satisfies_jacobi(theta):
        raise JacobiViolated("[Theta, Theta] != 0")
    return schouten_bracket(theta, P)


# -- smooth Poisson cohomology in a polynomial degree window ---------------


def _cell_basis(vars, k, d):
    n = len(vars)
    return [(S, e) for S in combinations(range(n), k) for e in monomials_of_degree(n, d)]


def _sparse_rank(columns):
    """Exact rank of a list of sparse columns {row_key: CycloNum}."""
    pivots = {}
    rank = 0
    for col in columns:
        c = dict(col)
        while c:
            hit = next((r for r in c if r in pivots), None)
            if hit is None:
                break
            f = c.pop(hit)
            for r, v in pivots[hit].items():
                if r == hit:
                    continue
                s = c.get(r, None)
                s = -f * v if s is None else s - f * v
                if s:
                    c[r] = s
                else:
                    c.pop(r, None)
        if not c:
            continue
        piv = min(c, key=lambda r: (0 if c[r] == 1 or c[r] == -1 else 1, r))
        inv = c[piv].inverse()
        pivots[piv] = {r: inv * v for r, v in c.items()}
        rank += 1
    return rank


def _d_columns(theta, vars, k, d, target_index):
    """Columns of [theta, -] on cell (k, d) in the target cell's index."""
    cols = []
    for S, e in _cell_basis(vars, k, d):
        img = schouten_bracket(theta, Polyvector.basis_term(vars, S, Poly.monomial(vars, e)))
        col = {}
        for T, poly in img.terms.items():
            for ee, c in poly.terms.items():
                col[target_index[(T, ee)]] = c
        cols.append(col)
    return cols


@dataclass
class SmoothHPReport:
    k: int
    window: int
    dims: list  # dims[d] = dim HP^k in coefficient degree d
    certified_through: int
    flagged: tuple

    def to_json(self):
        return {
            "k": self.k,
            "window": self.window,
            "dims": list(self.dims),
            "certified_through": self.certified_through,
            "flagged": list(self.flagged),
        }


def hp_smooth(theta: Polyvector, k: int, window: int) -> SmoothHPReport:
    """Graded dims of HP^k = ker d / im d for coefficient degrees <= window.

    theta must have homogeneous coefficients; d is then graded and the
    computation per degree is exact. Degrees window-1 and window are
    flagged per the stated truncation contract.
    """
    if not satisfies_jacobi(theta):
        raise JacobiViolated("[Theta, Theta] != 0")
    assert theta.is_coeff_homogeneous(), "need homogeneous Theta coefficients"
    vars = theta.vars
    n = len(vars)
    t = theta.coeff_degree() if theta else 0
    dims = []
    for d in range(window + 1):
        cell = _cell_basis(vars, k, d)
        dim_cell = len(cell)
        # outgoing d: (k, d) -> (k+1, d+t-1)
        rank_out = 0
        if theta and k < n and d + t - 1 >= 0:
            tgt = {be: i for i, be in enumerate(_cell_basis(vars, k + 1, d + t - 1))}
            rank_out = _sparse_rank(_d_columns(theta, vars, k, d, tgt))
        # incoming d: (k-1, d-t+1) -> (k, d)
        rank_in = 0
        dprev = d - t + 1
        if theta and k >= 1 and 0 <= dprev <= window + 2:
            tgt = {be: i for i, be in enumerate(cell)}
            rank_in = _sparse_rank(_d_columns(theta, vars, k - 1, dprev, tgt))
        dims.append(dim_cell - rank_out - rank_in)
    return SmoothHPReport(
        k=k, window=window, dims=dims,
        certified_through=window - 2,
        flagged=(window - 1, window),
    )


# -------------------------------------------------------------------------
# Finite-dimensional Hochschild layer
# -------------------------------------------------------------------------


class FinAlgebra:
    """Commutative associative unital algebra with rational constants."""

    def __init__(self, labels, mult, unit):
        self.labels = tuple(labels)
        self.n = len(self.labels)
        self.mult = tuple(tuple(tuple(Fraction(x) for x in v) for v in row) for row in mult)
        self.unit = tuple(Fraction(x) for x in unit)
        n = self.n
        assert len(self.mult) == n and all(len(r) == n for r in self.mult)
        for i in range(n):
            for j in range(i, n):
                assert self.mult[i][j] == self.mult[j][i], "not commutative"
        for i in range(n):
            e = tuple(Fraction(1 if t == i else 0) for t in range(n))
            assert self.mul_vec(self.unit, e) == e, "unit axiom fails"
        for i in range(n):
            for j in range(n):
                for t in range(n):
                    ei = self.basis_vec(i)
                    lhs = self.mul_vec(self.mul_vec(ei, self.basis_vec(j)), self.basis_vec(t))
                    rhs = self.mul_vec(ei, self.mul_vec(self.basis_vec(j), self.basis_vec(t)))
                    assert lhs == rhs, "not associative"

    def basis_vec(self, i):
        return tuple(Fraction(1 if t == i else 0) for t in range(self.n))

    def mul_vec(self, u, v):
        out = [Fraction(0)] * self.n
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, vj in enumerate(v):
                if not vj:
                    continue
                row = self.mult[i][j]
                c = ui * vj
                for t, m in enumerate(row):
                    if m:
                        out[t] += c * m
        return tuple(out)

    @classmethod
    def truncated_power(cls, var: str, n: int) -> "FinAlgebra":
        """Q[var]/var^n with basis 1, var, ..., var^(n-1)."""
        labels = ["1"] + [f"{var}^{k}" if k > 1 else var for k in range(1, n)]
        mult = [[tuple(1 if t == i + j else 0 for t in range(n)) if i + j < n
                 else (0,) * n for j in range(n)] for i in range(n)]
        unit = tuple(1 if t == 0 else 0 for t in range(n))
        return cls(labels, mult, unit)


class TensorFinAlgebra(FinAlgebra):
    """A (x) B with basis e_i (x) u_j flattened to index i * dim(B) + j."""

    def __init__(self, A: FinAlgebra, B: FinAlgebra):
        self.A, self.B = A, B
        nA, nB = A.n, B.n
        labels = [f"{a}|{b}" for a in A.labels for b in B.labels]
        mult = [[None] * (nA * nB) for _ in range(nA * nB)]
        for i1 in range(nA):
            for j1 in range(nB):
                for i2 in range(nA):
                    for j2 in range(nB):
                        va = A.mult[i1][i2]
                        vb = B.mult[j1][j2]
                        vec = [Fraction(0)] * (nA * nB)
                        for r, x in enumerate(va):
                            if not x:
                                continue
                            for s, y in enumerate(vb):
                                if y:
                                    vec[r * nB + s] = x * y
                        mult[i1 * nB + j1][i2 * nB + j2] = tuple(vec)
        unit = [Fraction(0)] * (nA * nB)
        for r, x in enumerate(A.unit):
            for s, y in enumerate(B.unit):
                unit[r * nB + s] = x * y
        super().__init__(labels, mult, tuple(unit))

    def embed(self, avec, bvec):
        nB = self.B.n
        out = [Fraction(0)] * (self.A.n * nB)
        for r, x in enumerate(avec):
            if not x:
                continue
            for s, y in enumerate(bvec):
                if y:
                    out[r * nB + s] = x * y
        return tuple(out)


class Cochain:
    """Multilinear map A^(x k) -> A as a basis-indexed tensor."""

    __slots__ = ("alg", "k", "tensor")

    def __init__(self, alg, k, tensor):
        self.alg = alg
        self.k = k
        self.tensor = {tuple(i): tuple(Fraction(x) for x in v)
                       for i, v in tensor.items() if any(v)}

    @classmethod
    def zero(cls, alg, k):
        return cls(alg, k, {})

    @classmethod
    def from_function(cls, alg, k, fn):
        t = {}
        for idx in product(range(alg.n), repeat=k):
            v = fn(*idx)
            if any(v):
                t[idx] = tuple(Fraction(x) for x in v)
        return cls(alg, k, t)

    def __call__(self, *vecs):
        assert len(vecs) == self.k
        out = [Fraction(0)] * self.alg.n
        for idx, val in self.tensor.items():
            c = Fraction(1)
            for slot, i in enumerate(idx):
                c *= vecs[slot][i]
                if not c:
                    break
            if c:
                for t, x in enumerate(val):
                    if x:
                        out[t] += c * x
        return tuple(out)

    def __add__(self, other):
        assert self.alg is other.alg
        if not other.tensor:
            return self
        if not self.tensor:
            return other
        assert self.k == other.k
        t = dict(self.tensor)
        for i, v in other.tensor.items():
            cur = t.get(i)
            s = v if cur is None else tuple(a + b for a, b in zip(cur, v))
            if any(s):
                t[i] = s
            else:
                t.pop(i, None)
        return Cochain(self.alg, self.k, t)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        return Cochain(self.alg, self.k, {i: tuple(c * x for x in v)
                                          for i, v in self.tensor.items()})

    def __eq__(self, other):
        if not isinstance(other, Cochain) or self.alg is not other.alg:
            return NotImplemented
        if not self.tensor and not other.tensor:
            return True  # zero is arity-agnostic
        return self.k == other.k and self.tensor == other.tensor

    def __bool__(self):
        return bool(self.tensor)

    def is_reduced(self) -> bool:
        """Vanishes whenever any argument is the unit."""
        alg = self.alg
        basis = [alg.basis_vec(i) for i in range(alg.n)]
        for slot in range(self.k):
            for rest in product(range(alg.n), repeat=self.k - 1):
                args = [basis[r] for r in rest]
                args.insert(slot, alg.unit)
                if any(self(*args)):
                    return False
        return True

    def to_json(self):
        return {
            "labels": list(self.alg.labels),
            "arity": self.k,
            "tensor": [{"idx": list(i), "value": [str(x) for x in v]}
                       for i, v in sorted(self.tensor.items())],
        }


def m_cochain(alg: FinAlgebra) -> Cochain:
    return Cochain(alg, 2, {(i, j): alg.mult[i][j]
                            for i in range(alg.n) for j in range(alg.n)})


def _circ(f: Cochain, g: Cochain) -> Cochain:
    """(f o g) with signs (-1)^((i-1)(l-1)) for insertion at slot i."""
    k, l = f.k, g.k
    alg = f.alg
    n = alg.n
    if k == 0:
        return Cochain.zero(alg, 0)
    arity = k + l - 1
    out = {}
    basis = [alg.basis_vec(i) for i in range(n)]
    for i in range(1, k + 1):
        sgn = -1 if ((i - 1) * (l - 1)) % 2 else 1
        for idx in product(range(n), repeat=arity):
            inner = g(*(basis[t] for t in idx[i - 1:i - 1 + l]))
            if not any(inner):
                continue
            acc = [Fraction(0)] * n
            for s, c in enumerate(inner):
                if not c:
                    continue
                fi = idx[:i - 1] + (s,) + idx[i - 1 + l:]
                val = f.tensor.get(fi)
                if val:
                    for t, x in enumerate(val):
                        if x:
                            acc[t] += c * x
            if any(acc):
                cur = out.get(idx)
                if cur is None:
                    out[idx] = tuple(sgn * a for a in acc)
                else:
                    out[idx] = tuple(u + sgn * a for u, a in zip(cur, acc))
    return Cochain(alg, arity, out)


def gerstenhaber_bracket(f: Cochain, g: Cochain) -> Cochain:
    """[f,g] = f o g - (-1)^((k-1)(l-1)) g o f."""
    assert f.alg is g.alg
    swap = -1 if ((f.k - 1) * (g.k - 1)) % 2 else 1
    return _circ(f, g) - _circ(g, f).scale(swap)


def hochschild_differential(f: Cochain) -> Cochain:
    """delta f = [m, f]; squares to zero since [m,m] = 0."""
    return gerstenhaber_bracket(m_cochain(f.alg), f)


# -- shuffle map, kappa embeddings, factorwise brackets --------------------


class MixedCochain:
    """Map A^(x p) (x) B^(x q) -> A (x) B, basis-indexed."""

    __slots__ = ("A", "B", "p", "q", "terms")

    def __init__(self, A, B, p, q, terms):
        self.A, self.B = A, B
        self.p, self.q = p, q
        clean = {}
        for (ia, jb), val in terms.items():
            val = {rs: Fraction(v) for rs, v in val.items() if v}
            if val:
                clean[(tuple(ia), tuple(jb))] = val
        self.terms = clean

    @classmethod
    def zero(cls, A, B, p, q):
        return cls(A, B, p, q, {})

    def __add__(self, other):
        assert (self.A, self.B, self.p, self.q) == (other.A, other.B, other.p, other.q)
        t = {k: dict(v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            cur = t.setdefault(k, {})
            for rs, x in v.items():
                s = cur.get(rs, Fraction(0)) + x
                if s:
                    cur[rs] = s
                else:
                    cur.pop(rs, None)
        return MixedCochain(self.A, self.B, self.p, self.q, t)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        return MixedCochain(self.A, self.B, self.p, self.q,
                            {k: {rs: c * x for rs, x in v.items()}
                             for k, v in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, MixedCochain)
                and (self.p, self.q) == (other.p, other.q)
                and self.terms == other.terms)

    def __bool__(self):
        return bool(self.terms)


def kappa_A(f: Cochain, T: TensorFinAlgebra) -> Cochain:
    """kappa_A(f)(a1 (x) b1, ..., ak (x) bk) = f(a...) (x) (b1 ... bk)."""
    A, B = T.A, T.B
    assert f.alg is A
    nB = B.n
    k = f.k
    out = {}
    for idx in product(range(A.n * nB), repeat=k):
        ri = tuple(i // nB for i in idx)
        si = tuple(i % nB for i in idx)
        fa = f.tensor.get(ri)
        if not fa:
            continue
        bprod = B.unit
        for s in si:
            bprod = B.mul_vec(bprod, B.basis_vec(s))
        if not any(bprod):
            continue
        out[idx] = T.embed(fa, bprod)
    return Cochain(T, k, out)


def kappa_B(g: Cochain, T: TensorFinAlgebra) -> Cochain:
    A, B = T.A, T.B
    assert g.alg is B
    nB = B.n
    k = g.k
    out = {}
    for idx in product(range(A.n * nB), repeat=k):
        ri = tuple(i // nB for i in idx)
        si = tuple(i % nB for i in idx)
        gb = g.tensor.get(si)
        if not gb:
            continue
        aprod = A.unit
        for r in ri:
            aprod = A.mul_vec(aprod, A.basis_vec(r))
        if not any(aprod):
            continue
        out[idx] = T.embed(aprod, gb)
    return Cochain(T, k, out)


def _shuffle_sign(S):
    """Sign of interleaving a's (at sorted positions S) before b's."""
    inv = sum(pos - i for i, pos in enumerate(S))
    return -1 if inv % 2 else 1


def shuffle_map(f: Cochain, T: TensorFinAlgebra) -> dict:
    """sh(f) as components {(p, q): MixedCochain} over all splits p+q = arity.

    sh(f)(a1..ap, b1..bq) sums sign(sigma_Phi) f(c1,...,cn) over all
    interleavings, with a_i (x) 1 at the chosen positions and 1 (x) b_j
    elsewhere.
    """
    assert f.alg is T
    A, B = T.A, T.B
    n = f.k
    comps = {}
    a_embed = [T.embed(A.basis_vec(r), B.unit) for r in range(A.n)]
    b_embed = [T.embed(A.unit, B.basis_vec(s)) for s in range(B.n)]
    for p in range(n + 1):
        q = n - p
        terms = {}
        for ia in product(range(A.n), repeat=p):
            for jb in product(range(B.n), repeat=q):
                acc = {}
                for S in combinations(range(n), p):
                    sgn = _shuffle_sign(S)
                    args = []
                    ai = iter(ia)
                    bj = iter(jb)
                    Sset = set(S)
                    for pos in range(n):
                        args.append(a_embed[next(ai)] if pos in Sset
                                    else b_embed[next(bj)])
                    val = f(*args)
                    for t, x in enumerate(val):
                        if x:
                            rs = (t // B.n, t % B.n)
                            s = acc.get(rs, Fraction(0)) + sgn * x
                            if s:
                                acc[rs] = s
                            else:
                                acc.pop(rs, None)
                if acc:
                    terms[(ia, jb)] = acc
        comps[(p, q)] = MixedCochain(A, B, p, q, terms)
    return comps


def first_factor_bracket(omega: Cochain, X: MixedCochain) -> MixedCochain:
    """[omega, X] acting on the A-leg of X through Hom(A^p (x) B^q, A (x) B).

    Carries the Koszul sign (-1)^((w-1)q): omega has degree w-1 and passes
    the q bar-arguments coming from B before reaching the A-slots.
    """
    A, B = X.A, X.B
    assert omega.alg is A
    p, q, w = X.p, X.q, omega.k
    sign = -1 if ((w - 1) * q) % 2 else 1
    out = {}
    for jb in {key[1] for key in X.terms}:
        for s in range(B.n):
            slice_t = {}
            for (ia, jb2), val in X.terms.items():
                if jb2 != jb:
                    continue
                vec = [Fraction(0)] * A.n
                hit = False
                for (r, s2), x in val.items():
                    if s2 == s:
                        vec[r] = x
                        hit = True
                if hit:
                    slice_t[ia] = tuple(vec)
            if not slice_t:
                continue
            br = gerstenhaber_bracket(omega, Cochain(A, p, slice_t))
            for ia2, vec in br.tensor.items():
                key = (ia2, jb)
                cur = out.setdefault(key, {})
                for r, x in enumerate(vec):
                    if x:
                        rs = (r, s)
                        t = cur.get(rs, Fraction(0)) + sign * x
                        if t:
                            cur[rs] = t
                        else:
                            cur.pop(rs, None)
    return MixedCochain(A, B, p + w - 1, q, out)


def second_factor_bracket(omega: Cochain, X: MixedCochain) -> MixedCochain:
    """[omega, X] acting on the B-leg of X."""
    A, B = X.A, X.B
    assert omega.alg is B
    p, q, w = X.p, X.q, omega.k
    out = {}
    for ia in {key[0] for key in X.terms}:
        for r in range(A.n):
            slice_t = {}
            for (ia2, jb), val in X.terms.items():
                if ia2 != ia:
                    continue
                vec = [Fraction(0)] * B.n
                hit = False
                for (r2, s), x in val.items():
                    if r2 == r:
                        vec[s] = x
                        hit = True
                if hit:
                    slice_t[jb] = tuple(vec)
            if not slice_t:
                continue
            br = gerstenhaber_bracket(omega, Cochain(B, q, slice_t))
            for jb2, vec in br.tensor.items():
                key = (ia, jb2)
                cur = out.setdefault(key, {})
                for s, x in enumerate(vec):
                    if x:
                        rs = (r, s)
                        t = cur.get(rs, Fraction(0)) + x
                        if t:
                            cur[rs] = t
                        else:
                            cur.pop(rs, None)
    return MixedCochain(A, B, p, q + w - 1, out)


def tensor_differential(X: MixedCochain) -> dict:
    """Differential on DT(A) (x) DT(B): {(p+1,q): [m_A, X]_A, (p,q+1): [m_B, X]_B}.

    No extra twist is needed: the Koszul sign inside first_factor_bracket
    already makes sh a chain map (sh o [m_T, -] = D o sh componentwise).
    """
    dA = first_factor_bracket(m_cochain(X.A), X)
    dB = second_factor_bracket(m_cochain(X.B), X)
    return {(X.p + 1, X.q): dA, (X.p, X.q + 1): dB}
