"""Finite matrix groups in Sp(V): closure, conjugacy classes, class sums.

Elements live in a hash-consed table in canonical (lexicographic) order.
Integer-matrix groups (the Weyl family) run on an exact numpy int64 fast
path; cyclotomic groups use the generic CycloNum path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactlin import CycloNum, Mat, SympSpace

DEFAULT_CAP = 3_000_000
_INT_BOUND = 1 << 20  # entry bound guarding int64 matmul exactness


class CapExceeded(Exception):
    pass


class NotSymplectic(Exception):
    pass


@dataclass(frozen=True)
class ConjClass:
    rep: int
    members: tuple
    size: int


class ClassFunction:
    """Values indexed by conjugacy class."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = tuple(values)

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, ClassFunction) and self.values == other.values

    def __repr__(self):
        return f"ClassFunction({list(self.values)})"


def _is_integral(g: Mat) -> bool:
    return all(e.N == 1 and e.coeffs[0].denominator == 1 for row in g.rows for e in row)


class MatrixGroup:
    """Immutable element table of a finite subgroup of Sp(V)."""

    def __init__(self, space, arr=None, cyclo_elems=None, gen_indices=()):
        self.space = space
        self.dim = space.dim
        self._arr = arr  # numpy (n, d, d) int64, canonical order
        self._cyclo = cyclo_elems  # tuple of flat CycloNum tuples, canonical order
        self.gen_indices = tuple(gen_indices)
        if arr is not None:
            self._index = {arr[i].tobytes(): i for i in range(len(arr))}
            self.order = len(arr)
        else:
            self._index = {e: i for i, e in enumerate(cyclo_elems)}
            self.order = len(cyclo_elems)
        self._classes = None
        self._class_of = None
        self._csp_cache = {}

    # -- element access -------------------------------------------------

    def element(self, i: int) -> Mat:
        d = self.dim
        if self._arr is not None:
            m = self._arr[i]
            return Mat([[int(m[r, c]) for c in range(d)] for r in range(d)])
        flat = self._cyclo[i]
        return Mat([flat[r * d:(r + 1) * d] for r in range(d)])

    @property
    def elements(self):
        return tuple(self.element(i) for i in range(self.order))

    def identity_index(self) -> int:
        d = self.dim
        if self._arr is not None:
            key = np.eye(d, dtype=np.int64).tobytes()
        else:
            key = _flat_identity(d)
        return self._index[key]

    def mul_idx(self, i: int, j: int) -> int:
        if self._arr is not None:
            return self._index[(self._arr[i] @ self._arr[j]).tobytes()]
        return self._index[_flat_mul(self._cyclo[i], self._cyclo[j], self.dim)]

    def inv_idx(self, i: int) -> int:
        e = self.identity_index()
        j, prev = i, e
        while j != e:
            prev, j = j, self.mul_idx(j, i)
        return prev

    # -- conjugacy ------------------------------------------------------

    def conjugacy_classes(self):
        if self._classes is None:
            self._compute_classes()
        return self._classes

    def class_of(self, i: int) -> int:
        if self._class_of is None:
            self._compute_classes()
        return self._class_of[i]

    def _compute_classes(self):
        gens = list(self.gen_indices) or [self.identity_index()]
        ginv = [self.inv_idx(g) for g in gens]
        n = self.order
        seen = [False] * n
        classes = []
        if self._arr is not None:
            garr = [self._arr[g] for g in gens]
            giarr = [self._arr[g] for g in ginv]
        for start in range(n):
            if seen[start]:
                continue
            members = [start]
            seen[start] = True
            frontier = [start]
            while frontier:
                nxt = []
                if self._arr is not None:
                    block = self._arr[frontier]
                    for gi, g in zip(giarr, garr):
                        prods = gi @ block @ g
                        for row in prods:
                            k = self._index[row.tobytes()]
                            if not seen[k]:
                                seen[k] = True
                                members.append(k)
                                nxt.append(k)
                else:
                    for x in frontier:
                        for gi, g in zip(ginv, gens):
                            k = self.mul_idx(self.mul_idx(gi, x), g)
                            if not seen[k]:
                                seen[k] = True
                                members.append(k)
                                nxt.append(k)
                frontier = nxt
            members.sort()
            classes.append(ConjClass(rep=members[0], members=tuple(members), size=len(members)))
        classes.sort(key=lambda c: c.rep)
        self._classes = tuple(classes)
        self._class_of = [None] * n
        for ci, c in enumerate(self._classes):
            for m in c.members:
                self._class_of[m] = ci
        assert sum(c.size for c in self._classes) == n
        assert all(n % c.size == 0 for c in self._classes)

    def __repr__(self):
        return f"MatrixGroup(order={self.order}, dim={self.dim})"


def _flat_identity(d):
    return tuple(CycloNum.rational(1 if i == j else 0) for i in range(d) for j in range(d))


def _flat_mul(a, b, d):
    out = []
    for r in range(d):
        for c in range(d):
            acc = None
            for k in range(d):
                x, y = a[r * d + k], b[k * d + c]
                if x and y:
                    acc = x * y if acc is None else acc + x * y
            out.append(acc if acc is not None else CycloNum.rational(0))
    return tuple(out)


def _cyclo_sort_key(flat):
    return tuple((e.N, e.coeffs) for e in flat)


def generate(gens, space: SympSpace, cap: int = DEFAULT_CAP) -> MatrixGroup:
    """Close the generators under multiplication; canonical element order."""
    for g in gens:
        if not space.is_symplectic(g):
            raise NotSymplectic(f"generator does not preserve the form: {g!r}")
    d = space.dim
    if gens and all(_is_integral(g) for g in gens):
        return _generate_int(gens, space, cap)
    # generic cyclotomic closure
    ident = _flat_identity(d)
    gen_flats = [tuple(e for row in g.rows for e in row) for g in gens]
    index = {ident: 0}
    elems = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gen_flats:
                y = _flat_mul(x, g, d)
                if y not in index:
                    if len(elems) >= cap:
                        raise CapExceeded(f"group order exceeds cap {cap}")
                    index[y] = len(elems)
                    elems.append(y)
                    nxt.append(y)
        frontier = nxt
    elems.sort(key=_cyclo_sort_key)
    G = MatrixGroup(space, cyclo_elems=tuple(elems), gen_indices=())
    gen_idx = [G._index[f] for f in gen_flats]
    G.gen_indices = tuple(dict.fromkeys(gen_idx))
    return G


def _generate_int(gens, space, cap):
    d = space.dim
    gmats = [np.array([[int(e.coeffs[0]) for e in row] for row in g.rows], dtype=np.int64)
             for g in gens]
    blocks = [np.eye(d, dtype=np.int64)[None, :, :]]
    index = {blocks[0][0].tobytes(): 0}
    count = 1
    frontier = blocks[0]
    while len(frontier):
        new_rows = []
        for g in gmats:
            prods = frontier @ g
            if np.abs(prods).max() > _INT_BOUND:
                raise OverflowError("entry bound exceeded in integer closure")
            for row in prods:
                key = row.tobytes()
                if key not in index:
                    if count >= cap:
                        raise CapExceeded(f"group order exceeds cap {cap}")
                    index[key] = count
                    count += 1
                    new_rows.append(row)
        if new_rows:
            frontier = np.stack(new_rows)
            blocks.append(frontier)
        else:
            frontier = ()
    arr = np.concatenate(blocks, axis=0)
    flat = arr.reshape(len(arr), d * d)
    order = np.lexsort(tuple(flat.T[::-1]))
    arr = np.ascontiguousarray(arr[order])
    G = MatrixGroup(space, arr=arr)
    G.gen_indices = tuple(dict.fromkeys(G._index[g.astype(np.int64).tobytes()] for g in gmats))
    return G


def class_sum_product(G: MatrixGroup, i: int, j: int) -> ClassFunction:
    """Structure constants c_{ij}^k of C_i C_j = sum_k c_{ij}^k C_k in ZG."""
    key = (i, j) if i <= j else (j, i)
    if key in G._csp_cache:
        return G._csp_cache[key]
    classes = G.conjugacy_classes()
    ci, cj = classes[key[0]], classes[key[1]]
    counts = [0] * len(classes)
    if G._arr is not None:
        block = G._arr[list(ci.members)]
        for b in cj.members:
            prods = block @ G._arr[b]
            for row in prods:
                counts[G.class_of(G._index[row.tobytes()])] += 1
    else:
        for a in ci.members:
            for b in cj.members:
                counts[G.class_of(G.mul_idx(a, b))] += 1
    vals = []
    for k, c in enumerate(classes):
        q, r = divmod(counts[k], c.size)
        assert r == 0, "class sum product not constant on classes"
        vals.append(q)
    out = ClassFunction(vals)
    G._csp_cache[key] = out
    return out


def direct_product(G1: MatrixGroup, G2: MatrixGroup, cap: int = DEFAULT_CAP) -> MatrixGroup:
    """G1 x G2 acting blockwise on V1 + V2."""
    d1, d2 = G1.dim, G2.dim
    J = _block_diag(G1.space.J, G2.space.J)
    space = SympSpace(J)
    gens = [_block_diag(G1.element(i), Mat.identity(d2)) for i in G1.gen_indices]
    gens += [_block_diag(Mat.identity(d1), G2.element(i)) for i in G2.gen_indices]
    return generate(gens, space, cap)


def _block_diag(A: Mat, B: Mat) -> Mat:
    a, b = A.shape[0], B.shape[0]
    rows = []
    for i in range(a):
        rows.append(list(A.rows[i]) + [0] * b)
    for i in range(b):
        rows.append([0] * a + list(B.rows[i]))
    return Mat(rows)


def parse_group_spec(spec: str, cap: int = DEFAULT_CAP) -> MatrixGroup:
    """Parse the CLI mini-language into a group.

    Forms: cyclic:n, binary-dihedral:n, weyl:Xn, symmetric:n, matrix-file:PATH.
    """
    from . import catalog  # deferred: catalog builds on this module

    kind, _, arg = spec.partition(":")
    if not arg:
        raise ValueError(f"malformed group spec: {spec!r}")
    if kind == "cyclic":
        return catalog.sl2_subgroup("cyclic", int(arg), cap=cap)
    if kind == "binary-dihedral":
        return catalog.sl2_subgroup("binary-dihedral", int(arg), cap=cap)
    if kind == "weyl":
        return catalog.weyl_group(arg[0].upper(), int(arg[1:]), cap=cap)
    if kind == "symmetric":
        n = int(arg)
        if n < 2:
            raise ValueError("symmetric:n needs n >= 2")
        return catalog.weyl_group("A", n - 1, cap=cap)
    if kind == "matrix-file":
        with open(arg) as fh:
            data = json.load(fh)
        space = SympSpace(Mat.from_json(data["J"]))
        gens = [Mat.from_json(g) for g in data["gens"]]
        return generate(gens, space, cap)
    raise ValueError(f"unknown group spec kind: {kind!r}")
