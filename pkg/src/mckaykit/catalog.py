"""Built-in group families and root-system metadata.

Weyl groups act on V = h + h* realized over Q in the root basis: the Gram
matrix of h is the symmetrized Cartan matrix, each w acts as diag(w, w),
and the symplectic form pairs the two copies through the Gram matrix.
Cyclic and binary dihedral families live in SL(2) over cyclotomics.
"""
from __future__ import annotations

from dataclasses import dataclass

from .exactlin import CycloNum, Mat, SympSpace
from .groups import DEFAULT_CAP, CapExceeded, MatrixGroup, generate

_TYPES = ("A", "B", "C", "D", "E", "F", "G")


def cartan_data(typ: str, rank: int):
    """Cartan matrix C (rows i, C[i][j] = 2(a_i,a_j)/(a_i,a_i)) and root
    half-lengths d_i, chosen integral so the Gram matrix S = D C is integral."""
    n = rank
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    d = [1] * n

    def bond(i, j, cij=-1, cji=-1):
        C[i][j] = cij
        C[j][i] = cji

    if typ == "A":
        assert n >= 1
        for i in range(n - 1):
            bond(i, i + 1)
    elif typ == "B":
        assert n >= 2
        for i in range(n - 2):
            bond(i, i + 1)
        bond(n - 2, n - 1, -1, -2)
        d = [2] * (n - 1) + [1]
    elif typ == "C":
        assert n >= 2
        for i in range(n - 2):
            bond(i, i + 1)
        bond(n - 2, n - 1, -2, -1)
        d = [1] * (n - 1) + [2]
    elif typ == "D":
        assert n >= 3
        for i in range(n - 2):
            bond(i, i + 1)
        C[n - 2][n - 1] = C[n - 1][n - 2] = 0
        bond(n - 3, n - 1)
    elif typ == "E":
        assert n in (6, 7, 8)
        bond(0, 2)
        bond(1, 3)
        for i in range(2, n - 1):
            bond(i, i + 1)
    elif typ == "F":
        assert n == 4
        bond(0, 1)
        bond(1, 2, -1, -2)
        bond(2, 3)
        d = [2, 2, 1, 1]
    elif typ == "G":
        assert n == 2
        bond(0, 1, -1, -3)
        d = [3, 1]
    else:
        raise ValueError(f"unknown type {typ!r}")
    S = [[d[i] * C[i][j] for j in range(n)] for i in range(n)]
    assert all(S[i][j] == S[j][i] for i in range(n) for j in range(n))
    return C, S


def simple_reflections(typ: str, rank: int):
    """Reflection matrices on h in the root basis: s_i(e_j) = e_j - C[i][j] e_i."""
    C, _ = cartan_data(typ, rank)
    mats = []
    for i in range(rank):
        m = [[1 if r == c else 0 for c in range(rank)] for r in range(rank)]
        for j in range(rank):
            m[i][j] -= C[i][j]
        mats.append(Mat(m))
    return mats


def _doubled(w: Mat) -> Mat:
    n = w.shape[0]
    rows = []
    for i in range(n):
        rows.append(list(w.rows[i]) + [0] * n)
    for i in range(n):
        rows.append([0] * n + list(w.rows[i]))
    return Mat(rows)


_weyl_cache = {}


def weyl_group(typ: str, rank: int, cap: int = DEFAULT_CAP) -> MatrixGroup:
    """W(typ_rank) acting on h + h* (dimension 2*rank), over Q."""
    key = (typ, rank)
    if key in _weyl_cache and _weyl_cache[key].order <= cap:
        return _weyl_cache[key]
    _, S = cartan_data(typ, rank)
    space = SympSpace.from_gram(Mat(S))
    gens = [_doubled(s) for s in simple_reflections(typ, rank)]
    G = generate(gens, space, cap)
    _weyl_cache[key] = G
    return G


_sl2_cache = {}


def sl2_subgroup(kind: str, n: int, cap: int = DEFAULT_CAP) -> MatrixGroup:
    """cyclic:n = <diag(z_n, z_n^-1)>; binary-dihedral:n adds [[0,1],[-1,0]]."""
    key = (kind, n)
    if key in _sl2_cache:
        return _sl2_cache[key]
    space = SympSpace.standard(1)
    if kind == "cyclic":
        if n == 1:
            G = generate([], space, cap)
        else:
            z = CycloNum.zeta(n)
            G = generate([Mat([[z, 0], [0, z ** -1]])], space, cap)
    elif kind == "binary-dihedral":
        z = CycloNum.zeta(2 * n)
        gens = [Mat([[z, 0], [0, z ** -1]]), Mat([[0, 1], [-1, 0]])]
        G = generate(gens, space, cap)
        assert G.order == 4 * n
    else:
        raise ValueError(f"unknown SL(2) family {kind!r}")
    _sl2_cache[key] = G
    return G


def exponents(typ: str, rank: int, cap: int = DEFAULT_CAP):
    """Exponents m_i from greedy factorization of the Molien series on h."""
    from .poisson import molien

    W = weyl_group(typ, rank, cap)
    precision = 4 * rank + 8
    while True:
        series = molien(W, precision, h_block_only=True)
        degrees = _greedy_degrees(series, rank, precision)
        if degrees is not None:
            prod = 1
            for dd in degrees:
                prod *= dd
            if prod == W.order and sum(degrees) - rank < precision:
                return [dd - 1 for dd in sorted(degrees)]
        precision *= 2


def _greedy_degrees(series, rank, precision):
    # peel factors 1/(1-t^d), smallest d first
    s = list(series)
    found = []
    for _ in range(rank):
        d = next((k for k in range(1, precision + 1) if k < len(s) and s[k] != 0), None)
        if d is None:
            return None
        found.append(d)
        s = [s[k] - (s[k - d] if k >= d else 0) for k in range(len(s))]
    if any(s[1:]) or s[0] != 1:
        return None
    return found


def resolution_exists(typ: str):
    """Whether V/W admits a symplectic resolution, with a citation string."""
    if typ in ("A", "B", "C"):
        return True, "quotient admits a crepant resolution of Hilbert-scheme type (types A, B, C)"
    return False, "no symplectic resolution exists for Weyl quotients of types D, E, F, G"


@dataclass
class RootSystemInfo:
    label: str
    typ: str
    rank: int
    cartan: tuple
    gram: tuple
    simple_roots: tuple  # root-basis chart: simple roots are the unit vectors
    resolution_exists: bool
    citation: str
    weyl_order: int | None = None
    exponents: list | None = None

    def to_json(self):
        return {
            "label": self.label,
            "rank": self.rank,
            "cartan": [list(r) for r in self.cartan],
            "gram": [list(r) for r in self.gram],
            "simple_roots": [list(r) for r in self.simple_roots],
            "resolution_exists": self.resolution_exists,
            "citation": self.citation,
            "weyl_order": self.weyl_order,
            "exponents": self.exponents,
        }


CATALOG_TYPES = (
    ("A", 1), ("A", 2), ("A", 3), ("A", 4), ("A", 5), ("A", 6),
    ("B", 2), ("B", 3), ("B", 4),
    ("C", 3), ("C", 4),
    ("D", 4), ("D", 5),
    ("E", 6), ("E", 7), ("E", 8),
    ("F", 4), ("G", 2),
)


def root_system_info(typ: str, rank: int, compute: bool = True,
                     compute_cap: int = 20000) -> RootSystemInfo:
    C, S = cartan_data(typ, rank)
    ok, cite = resolution_exists(typ)
    ident = tuple(tuple(1 if i == j else 0 for j in range(rank)) for i in range(rank))
    info = RootSystemInfo(
        label=f"{typ}{rank}", typ=typ, rank=rank,
        cartan=tuple(tuple(r) for r in C), gram=tuple(tuple(r) for r in S),
        simple_roots=ident, resolution_exists=ok, citation=cite,
    )
    if compute:
        try:
            W = weyl_group(typ, rank, cap=compute_cap)
        except CapExceeded:
            return info
        info.weyl_order = W.order
        info.exponents = exponents(typ, rank, cap=compute_cap)
    return info


def catalog_table(compute_cap: int = 20000):
    return [root_system_info(t, r, compute_cap=compute_cap) for t, r in CATALOG_TYPES]
