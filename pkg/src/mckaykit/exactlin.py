"""Exact linear algebra over cyclotomic fields Q(zeta_N).

Numbers are stored in the power basis 1, z, ..., z^(phi(N)-1) modulo the
N-th cyclotomic polynomial, with Fraction coefficients and the conductor
reduced to its minimum, so equality and hashing are canonical.  No floating
point anywhere.
"""
from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from math import gcd


def _poly_divmod(num, den):
    # exact division of integer/Fraction coefficient lists, ascending order
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 0)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        if c:
            c = Fraction(c) / den[-1]
            q[i] = c
            for j, d in enumerate(den):
                num[i + j] -= c * d
    while num and not num[-1]:
        num.pop()
    return q, num


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Coefficients of Phi_n, ascending, as ints."""
    if n == 1:
        return (-1, 1)
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, cyclotomic_poly(d))
            assert not rem
    coeffs = tuple(int(c) for c in poly)
    assert all(Fraction(c).denominator == 1 for c in poly)
    return coeffs


@lru_cache(maxsize=None)
def _phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


@lru_cache(maxsize=None)
def _xpow_table(n: int, maxexp: int) -> tuple:
    # x^j mod Phi_n for j = 0..maxexp, each a tuple of Fractions of length phi(n)
    d = _phi(n)
    phi = cyclotomic_poly(n)
    # x^d = -(phi[0] + phi[1] x + ... + phi[d-1] x^(d-1))
    top = [Fraction(-phi[j]) for j in range(d)]
    rows = []
    cur = [Fraction(0)] * d
    cur[0] = Fraction(1)
    for j in range(maxexp + 1):
        rows.append(tuple(cur))
        # multiply by x
        carry = cur[d - 1]
        cur = [Fraction(0)] + cur[:-1]
        if carry:
            cur = [c + carry * t for c, t in zip(cur, top)]
    return tuple(rows)


def _reduce_poly(coeffs, n):
    """Reduce a coefficient list (any length) mod Phi_n to length phi(n)."""
    d = _phi(n)
    out = [Fraction(0)] * d
    if len(coeffs) > d:
        table = _xpow_table(n, len(coeffs) - 1)
        for j, c in enumerate(coeffs):
            if c:
                row = table[j]
                for k in range(d):
                    if row[k]:
                        out[k] += c * row[k]
    else:
        for j, c in enumerate(coeffs):
            out[j] = Fraction(c)
    return out


@lru_cache(maxsize=None)
def _embed_matrix(small: int, big: int) -> tuple:
    # columns: power basis of Q(zeta_small) written in the power basis of Q(zeta_big)
    assert big % small == 0
    step = big // small
    cols = []
    for j in range(_phi(small)):
        e = [0] * (j * step) + [1]
        cols.append(tuple(_reduce_poly(e, big)))
    return tuple(cols)


def _try_descend(coeffs, n, d):
    # express coeffs (in Q(zeta_n)) in Q(zeta_d) if possible, else None
    cols = _embed_matrix(d, n)
    rows = [[cols[j][i] for j in range(len(cols))] + [coeffs[i]]
            for i in range(len(coeffs))]
    sol = _solve_echelon(rows, len(cols))
    return sol


def _solve_echelon(aug, ncols):
    # solve the augmented system exactly; returns solution list or None
    rows = [list(r) for r in aug]
    piv = []
    r = 0
    for c in range(ncols):
        ii = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if ii is None:
            continue
        rows[r], rows[ii] = rows[ii], rows[r]
        inv = 1 / rows[r][c] if isinstance(rows[r][c], Fraction) else rows[r][c].inverse()
        rows[r] = [e * inv for e in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [e - f * e2 for e, e2 in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1]:
            return None
    if len(piv) < ncols:
        return None  # underdetermined; not needed here
    sol = [Fraction(0)] * ncols
    for k, c in enumerate(piv):
        sol[c] = rows[k][-1]
    return sol


class CycloNum:
    """An element of Q(zeta_N), canonically reduced to minimal conductor."""

    __slots__ = ("N", "coeffs", "_hash")

    def __init__(self, N, coeffs, _canonical=False):
        coeffs = _reduce_poly(coeffs, N) if not _canonical else list(coeffs)
        if not _canonical:
            N, coeffs = self._canonicalize(N, coeffs)
        self.N = N
        self.coeffs = tuple(coeffs)
        self._hash = hash((N, self.coeffs))

    @staticmethod
    def _canonicalize(n, coeffs):
        if n == 1:
            return 1, coeffs
        if not any(coeffs[1:]):
            return 1, [coeffs[0]]
        for d in sorted(k for k in range(2, n) if n % k == 0):
            sol = _try_descend(coeffs, n, d)
            if sol is not None:
                return d, sol
        return n, coeffs

    @classmethod
    def rational(cls, q) -> "CycloNum":
        return cls(1, [Fraction(q)], _canonical=True)

    @classmethod
    def zeta(cls, N: int, k: int = 1) -> "CycloNum":
        e = [0] * (k % N) + [1]
        return cls(N, e)

    @classmethod
    def coerce(cls, x) -> "CycloNum":
        if isinstance(x, CycloNum):
            return x
        return cls.rational(x)

    def promote(self, M: int) -> list:
        """Coefficients of self in the power basis of Q(zeta_M); N must divide M."""
        assert M % self.N == 0
        if M == self.N:
            return list(self.coeffs)
        cols = _embed_matrix(self.N, M)
        out = [Fraction(0)] * _phi(M)
        for j, c in enumerate(self.coeffs):
            if c:
                for k in range(len(out)):
                    if cols[j][k]:
                        out[k] += c * cols[j][k]
        return out

    def _pair(self, other):
        other = CycloNum.coerce(other)
        if self.N == other.N:
            return self.N, list(self.coeffs), list(other.coeffs)
        m = self.N * other.N // gcd(self.N, other.N)
        return m, self.promote(m), other.promote(m)

    def __add__(self, other):
        m, a, b = self._pair(other)
        return CycloNum(m, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __sub__(self, other):
        m, a, b = self._pair(other)
        return CycloNum(m, [x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return CycloNum.coerce(other) - self

    def __neg__(self):
        return CycloNum(self.N, [-c for c in self.coeffs], _canonical=True)

    def __mul__(self, other):
        other = CycloNum.coerce(other)
        if self.N == 1 and other.N == 1:
            return CycloNum(1, [self.coeffs[0] * other.coeffs[0]], _canonical=True)
        m, a, b = self._pair(other)
        prod = [Fraction(0)] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return CycloNum(m, prod)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        if not self:
            raise ZeroDivisionError("cyclotomic division by zero")
        if self.N == 1:
            return CycloNum(1, [1 / self.coeffs[0]], _canonical=True)
        # extended Euclid: u*self + v*Phi_N = 1 in Q[x]
        a = list(self.coeffs)
        b = [Fraction(c) for c in cyclotomic_poly(self.N)]
        s0, s1 = [Fraction(1)], [Fraction(0)]
        while any(b):
            q, r = _poly_divmod(a, b)
            a, b = b, r
            t = list(s0)
            for i, qc in enumerate(q):
                if qc:
                    while len(t) < i + len(s1):
                        t.append(Fraction(0))
                    for j, sc in enumerate(s1):
                        t[i + j] -= qc * sc
            while t and not t[-1]:
                t.pop()
            s0, s1 = s1, t if t else [Fraction(0)]
        c = a[0]  # gcd is a nonzero constant
        inv = [x / c for x in s0]
        return CycloNum(self.N, inv)

    def __truediv__(self, other):
        return self * CycloNum.coerce(other).inverse()

    def __rtruediv__(self, other):
        return CycloNum.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = CycloNum.rational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, (CycloNum, int, Fraction)):
            return NotImplemented
        other = CycloNum.coerce(other)
        return self.N == other.N and self.coeffs == other.coeffs

    def __hash__(self):
        return self._hash

    @property
    def is_rational(self) -> bool:
        return self.N == 1

    def to_fraction(self) -> Fraction:
        if self.N != 1:
            raise ValueError(f"not rational: {self!r}")
        return self.coeffs[0]

    def to_json(self) -> dict:
        return {"N": self.N, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "CycloNum":
        return cls(int(obj["N"]), [Fraction(s) for s in obj["coeffs"]])

    def __repr__(self):
        if self.N == 1:
            return str(self.coeffs[0])
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if j == 0 else f"{c}*z{self.N}^{j}")
        return " + ".join(terms) if terms else "0"


ZERO = CycloNum.rational(0)
ONE = CycloNum.rational(1)


class Mat:
    """Immutable dense matrix over CycloNum."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows):
        self.rows = tuple(tuple(CycloNum.coerce(e) for e in row) for row in rows)
        assert len({len(r) for r in self.rows}) <= 1
        self._hash = hash(self.rows)

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, n: int) -> "Mat":
        return cls([[0] * n for _ in range(m)])

    def __mul__(self, other):
        if isinstance(other, Mat):
            n, k = self.shape
            k2, m = other.shape
            assert k == k2
            cols = list(zip(*other.rows))
            return Mat([[_dot(r, c) for c in cols] for r in self.rows])
        other = CycloNum.coerce(other)
        return Mat([[e * other for e in r] for r in self.rows])

    def __rmul__(self, other):
        return self * other

    def __add__(self, other):
        return Mat([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return Mat([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return Mat([[-e for e in r] for r in self.rows])

    def transpose(self) -> "Mat":
        return Mat(list(zip(*self.rows)))

    def apply(self, vec):
        return tuple(_dot(r, vec) for r in self.rows)

    def inverse(self) -> "Mat":
        n, m = self.shape
        assert n == m
        aug = [list(r) + [ONE if i == j else ZERO for j in range(n)]
               for i, r in enumerate(self.rows)]
        red, piv = rref(aug)
        if len(piv) < n or piv != list(range(n)):
            raise ValueError("matrix not invertible")
        return Mat([row[n:] for row in red])

    def __eq__(self, other):
        return isinstance(other, Mat) and self.rows == other.rows

    def __hash__(self):
        return self._hash

    def to_json(self):
        return [[e.to_json() for e in r] for r in self.rows]

    @classmethod
    def from_json(cls, obj) -> "Mat":
        return cls([[CycloNum.from_json(e) for e in row] for row in obj])

    def __repr__(self):
        return "Mat(" + "; ".join(", ".join(map(str, r)) for r in self.rows) + ")"


def _dot(r, c):
    acc = ZERO
    for a, b in zip(r, c):
        if a and b:
            acc = acc + a * b
    return acc


def rref(rows):
    """Reduced row echelon form with first-nonzero pivoting.

    Accepts rows of CycloNum or Fraction; returns (rows, pivot_columns).
    Deterministic: columns scanned left to right, first nonzero row wins.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    piv = []
    r = 0
    for c in range(ncols):
        ii = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if ii is None:
            continue
        rows[r], rows[ii] = rows[ii], rows[r]
        p = rows[r][c]
        inv = 1 / p if isinstance(p, (Fraction, int)) else p.inverse()
        rows[r] = [e * inv for e in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [e - f * e2 for e, e2 in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], piv


def rank(M) -> int:
    """Exact rank of a Mat or of raw rows."""
    rows = M.rows if isinstance(M, Mat) else M
    _, piv = rref(rows)
    return len(piv)


def kernel_basis(M):
    """Canonical basis of the right kernel {v : Mv = 0} as tuples."""
    rows = M.rows if isinstance(M, Mat) else M
    if not rows:
        return []
    ncols = len(rows[0])
    red, piv = rref(rows)
    zero, one = _zero_one_like(rows[0][0])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for k, p in enumerate(piv):
            v[p] = -red[k][f]
        basis.append(tuple(v))
    return basis


def _zero_one_like(sample):
    if isinstance(sample, CycloNum):
        return ZERO, ONE
    return Fraction(0), Fraction(1)


def solve(M, b):
    """One exact solution of Mx = b, or None if inconsistent."""
    rows = M.rows if isinstance(M, Mat) else M
    aug = [list(r) + [bb] for r, bb in zip(rows, b)]
    red, piv = rref(aug)
    ncols = len(rows[0])
    if ncols in piv:
        return None
    zero, _ = _zero_one_like(rows[0][0])
    sol = [zero] * ncols
    for k, c in enumerate(piv):
        sol[c] = red[k][-1]
    return tuple(sol)


def fixed_space(g: Mat):
    """Basis of V^g = ker(g - id)."""
    n, m = g.shape
    assert n == m
    return kernel_basis(g - Mat.identity(n))


def restrict_form(J: Mat, basis) -> Mat:
    """Gram matrix of the form J on the span of the given vectors."""
    Jv = [J.apply(v) for v in basis]
    return Mat([[_dot(u, jv) for jv in Jv] for u in basis])


class SympSpace:
    """A symplectic vector space: dimension plus the form's Gram matrix J."""

    def __init__(self, J: Mat):
        n, m = J.shape
        assert n == m and n % 2 == 0
        assert J.transpose() == -J, "form must be skew"
        assert rank(J) == n, "form must be nondegenerate"
        self.J = J
        self.dim = n

    @classmethod
    def standard(cls, half: int) -> "SympSpace":
        n = half
        rows = [[0] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            rows[i][n + i] = 1
            rows[n + i][i] = -1
        return cls(Mat(rows))

    @classmethod
    def from_gram(cls, B: Mat) -> "SympSpace":
        """Doubled space h + h* with form (B on h) tensor the area form."""
        n, _ = B.shape
        rows = [[ZERO] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            for j in range(n):
                rows[i][n + j] = B.rows[i][j]
                rows[n + i][j] = -B.rows[i][j]
        return cls(Mat(rows))

    def is_symplectic(self, g: Mat) -> bool:
        return g.transpose() * self.J * g == self.J

    def to_json(self):
        return {"dim": self.dim, "J": self.J.to_json()}


def mat_to_json_str(M: Mat) -> str:
    return json.dumps(M.to_json(), sort_keys=True)
