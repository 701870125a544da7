"""Rank filtration, graded center, orbifold Poincare and the easy lemma."""
import pytest

from mckaykit.exactlin import Mat
from mckaykit.groups import direct_product, parse_group_spec
from mckaykit.mckay import (
    betti_of_resolution, check_lemma_easy, class_degrees, gr_center,
    orbifold_poincare, rees_center, reflection_rank, symplectic_reflections,
    verify_grcenter_axioms,
)


def test_reflection_rank():
    assert reflection_rank(Mat.identity(4)) == 0
    assert reflection_rank(-Mat.identity(2)) == 2
    assert reflection_rank(Mat([[0, 1], [1, 0]])) == 1


def test_class_degrees_even_in_sp():
    for spec in ("cyclic:4", "binary-dihedral:3", "weyl:B2"):
        G = parse_group_spec(spec)
        assert all(d % 2 == 0 for d in class_degrees(G))


@pytest.mark.parametrize("n", range(2, 8))
def test_cyclic_reflection_count(n):
    idx, count = symplectic_reflections(parse_group_spec(f"cyclic:{n}"))
    assert count == n - 1
    assert len(idx) == count


def test_orbifold_poincare_cyclic():
    # identity in degree 0, all n-1 nontrivial classes in degree 2
    assert orbifold_poincare(parse_group_spec("cyclic:4")) == [1, 0, 3]


def test_betti_cyclic():
    assert betti_of_resolution(parse_group_spec("cyclic:6")) == {0: 1, 2: 5}


def test_betti_s3_doubled():
    assert betti_of_resolution(parse_group_spec("weyl:A2")) == {0: 1, 2: 1, 4: 1}


def test_gr_center_poincare_matches_orbifold():
    for spec in ("cyclic:3", "binary-dihedral:2", "weyl:A2", "weyl:B2"):
        G = parse_group_spec(spec)
        assert list(gr_center(G).poincare) == orbifold_poincare(G)


def test_gr_center_constants_degree_additive():
    G = parse_group_spec("binary-dihedral:3")
    gc = gr_center(G)
    degs = [d for _, _, d in gc.classes]
    for (i, j, k), c in gc.constants.items():
        assert c
        assert degs[i] + degs[j] == degs[k]


def test_grcenter_axioms():
    for spec in ("cyclic:5", "binary-dihedral:2", "weyl:A2", "weyl:B2"):
        checks = verify_grcenter_axioms(parse_group_spec(spec))
        assert all(checks.values()), (spec, checks)


def test_gr_center_json_shape():
    out = gr_center(parse_group_spec("cyclic:2")).to_json()
    assert set(out) == {"classes", "constants", "poincare"}
    assert out["poincare"] == [1, 0, 1]


def test_rees_defect_even_nonnegative():
    rd = rees_center(parse_group_spec("binary-dihedral:2"))
    assert all(t[4] >= 0 and t[4] % 2 == 0 for t in rd.terms)
    # some product must genuinely drop filtration degree
    assert any(t[4] > 0 for t in rd.terms)


def test_rees_vs_gr_center():
    # u = 0 terms of the Rees record are exactly the graded constants
    G = parse_group_spec("weyl:A2")
    rd = rees_center(G)
    gc = gr_center(G)
    flat = {(i, j, k): c for i, j, k, c, u in rd.terms if u == 0}
    assert flat == gc.constants


def test_kunneth_orbifold_poincare():
    """Poincare vector of a blockwise product is the polynomial product."""
    pairs = [("cyclic:2", "cyclic:3"), ("cyclic:2", "weyl:A2"),
             ("binary-dihedral:2", "cyclic:2")]
    for s1, s2 in pairs:
        G1, G2 = parse_group_spec(s1), parse_group_spec(s2)
        p1, p2 = orbifold_poincare(G1), orbifold_poincare(G2)
        prod = [0] * (len(p1) + len(p2) - 1)
        for i, a in enumerate(p1):
            for j, b in enumerate(p2):
                prod[i + j] += a * b
        assert orbifold_poincare(direct_product(G1, G2)) == prod


def test_lemma_easy_small_groups():
    for spec in ("cyclic:6", "binary-dihedral:3", "weyl:A2", "weyl:B2"):
        rep = check_lemma_easy(parse_group_spec(spec))
        assert rep.passed, (spec, rep.failures)
        assert rep.applicable > 0
        assert rep.pairs_scanned <= rep.pairs_total


def test_lemma_easy_cyclotomic_path():
    # cyclic groups use the CycloNum branch, identity pairs are applicable
    rep = check_lemma_easy(parse_group_spec("cyclic:3"))
    assert rep.passed
    assert rep.group_order == 3
