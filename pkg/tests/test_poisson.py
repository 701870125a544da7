"""Polynomials, the symplectic bracket, Molien series and invariant bases."""
from fractions import Fraction

import pytest

from mckaykit.exactlin import CycloNum, Mat
from mckaykit.groups import parse_group_spec
from mckaykit.poisson import (
    Poly, bracket, bracket_closure_check, coord_names, invariant_basis,
    is_invariant, molien, monomials_of_degree, reynolds, standard_bivector,
    _echelon_insert,
)

V = ("x1", "y1")
X = Poly.variable(V, 0)
Y = Poly.variable(V, 1)


def test_poly_ring_ops():
    f = X * X + Y.scale(3) - 1
    g = X - Y
    assert f + g - g == f
    assert (f * g).degree() == 3
    assert f ** 2 == f * f
    assert Poly.zero(V) + f == f
    assert not (f - f)


def test_poly_diff():
    f = X ** 3 * Y + X
    assert f.diff(0) == X ** 2 * Y * 3 + Poly.const(V, 1)
    assert f.diff(1) == X ** 3


def test_poly_subst():
    g = Mat([[0, 1], [-1, 0]])
    f = X ** 2 + Y
    assert f.subst(g) == Y ** 2 - X


def test_poly_graded_parts():
    f = X ** 2 + X * Y + Y - 5
    assert not f.is_homogeneous()
    assert f.graded_part(2) == X ** 2 + X * Y
    assert f.graded_part(0) == Poly.const(V, -5)


def test_poly_json_roundtrip():
    f = X ** 2 * Y.scale(Fraction(2, 3)) - X + 7
    assert Poly.from_json(f.to_json()) == f


def test_monomials_of_degree():
    monos = list(monomials_of_degree(2, 3))
    assert monos == [(3, 0), (2, 1), (1, 2), (0, 3)]
    assert len(list(monomials_of_degree(4, 5))) == 56


def test_bracket_canonical_pairs():
    sp = parse_group_spec("cyclic:2").space
    P = standard_bivector(sp)
    assert bracket(X, Y, P) == Poly.const(V, 1)
    assert bracket(Y, X, P) == Poly.const(V, -1)
    assert not bracket(X, X, P)


def test_bracket_leibniz_jacobi():
    sp = parse_group_spec("cyclic:2").space
    P = standard_bivector(sp)
    f = X ** 2 + Y
    g = X * Y
    h = Y ** 2 - X
    assert bracket(f, g * h, P) == bracket(f, g, P) * h + g * bracket(f, h, P)
    jac = bracket(f, bracket(g, h, P), P) \
        + bracket(g, bracket(h, f, P), P) \
        + bracket(h, bracket(f, g, P), P)
    assert not jac


def test_molien_cyclic2():
    # C[x,y]^(Z/2): even degrees only, dim d+1 in degree d
    assert molien(parse_group_spec("cyclic:2"), 6) == [1, 0, 3, 0, 5, 0, 7]


def test_molien_trivial_group():
    assert molien(parse_group_spec("cyclic:1"), 4) == [1, 2, 3, 4, 5]


def test_molien_weyl_h_block():
    # W(A2) on h: 1/((1-t^2)(1-t^3))
    s = molien(parse_group_spec("weyl:A2"), 6, h_block_only=True)
    assert s == [1, 0, 1, 1, 1, 1, 2]


def test_reynolds_projects_onto_invariants():
    G = parse_group_spec("cyclic:3")
    f = X ** 2 * Y + X
    r = reynolds(G, f)
    assert is_invariant(G, r)
    assert reynolds(G, r) == r
    inv = X * Y
    assert reynolds(G, inv) == inv


@pytest.mark.parametrize("spec,dmax", [
    ("cyclic:2", 6), ("cyclic:5", 6), ("binary-dihedral:2", 8), ("weyl:A2", 5),
])
def test_invariant_basis_matches_molien(spec, dmax):
    G = parse_group_spec(spec)
    series = molien(G, dmax)
    for d in range(dmax + 1):
        basis = invariant_basis(G, d)
        assert len(basis) == int(series[d])
        for p in basis:
            assert is_invariant(G, p)
            assert p.is_homogeneous() and (not p or p.degree() == d)


def test_invariant_basis_is_echelon():
    from mckaykit.poisson import _monomial_key
    basis = invariant_basis(parse_group_spec("binary-dihedral:2"), 4)
    leads = [max(p.terms, key=_monomial_key) for p in basis]
    assert len(set(leads)) == len(basis)
    for p, lead in zip(basis, leads):
        assert p.terms[lead] == CycloNum.rational(1)


def test_kernel_path_agrees_with_reynolds():
    """The generator-kernel fast path must reproduce the Reynolds echelon."""
    from mckaykit.poisson import _monomial_key
    G = parse_group_spec("weyl:B3")
    d = 4
    vars = coord_names(G.dim)
    echelon = {}
    target = int(molien(G, d)[d])
    found = 0
    for exp in monomials_of_degree(len(vars), d):
        r = reynolds(G, Poly.monomial(vars, exp))
        if r and _echelon_insert(echelon, r):
            found += 1
            if found == target:
                break
    slow = sorted(echelon.values(),
                  key=lambda p: _monomial_key(max(p.terms, key=_monomial_key)),
                  reverse=True)
    fast = invariant_basis(G, d)  # order * nmono is past the threshold here
    assert len(fast) == len(slow) == target
    assert all(a.terms == b.terms for a, b in zip(fast, slow))


def test_bracket_closure():
    out = bracket_closure_check(parse_group_spec("cyclic:2"), 4)
    assert out["closed"] and out["brackets_checked"] > 0


def test_coord_names():
    assert coord_names(4) == ("x1", "x2", "y1", "y2")
    with pytest.raises(AssertionError):
        coord_names(3)
