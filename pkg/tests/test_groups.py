"""Group closure, conjugacy classes and class-sum structure constants."""
import json

import pytest

from mckaykit.exactlin import CycloNum, Mat, SympSpace
from mckaykit.groups import (
    CapExceeded, NotSymplectic, class_sum_product, direct_product, generate,
    parse_group_spec,
)


def test_cyclic_orders():
    for n in range(1, 13):
        G = parse_group_spec(f"cyclic:{n}")
        assert G.order == n
        assert G.dim == 2


def test_binary_dihedral_orders():
    for n in range(2, 8):
        G = parse_group_spec(f"binary-dihedral:{n}")
        assert G.order == 4 * n


def test_cyclic_classes_are_singletons():
    G = parse_group_spec("cyclic:5")
    cls = G.conjugacy_classes()
    assert len(cls) == 5
    assert all(c.size == 1 for c in cls)


def test_binary_dihedral_class_count():
    # BD(n) of order 4n has n + 3 conjugacy classes
    for n in (2, 3, 4):
        G = parse_group_spec(f"binary-dihedral:{n}")
        assert len(G.conjugacy_classes()) == n + 3


def test_weyl_a2_is_s3():
    G = parse_group_spec("weyl:A2")
    assert G.order == 6
    assert len(G.conjugacy_classes()) == 3
    assert sorted(c.size for c in G.conjugacy_classes()) == [1, 2, 3]


def test_mul_inv_consistency():
    G = parse_group_spec("binary-dihedral:3")
    e = G.identity_index()
    for i in range(G.order):
        j = G.inv_idx(i)
        assert G.mul_idx(i, j) == e
        assert G.mul_idx(j, i) == e


def test_class_sum_structure_constants():
    """c_ij^k counts products landing in class k; row sum is |Ci||Cj|."""
    G = parse_group_spec("weyl:A2")
    cls = G.conjugacy_classes()
    for i in range(len(cls)):
        for j in range(len(cls)):
            v = class_sum_product(G, i, j)
            total = sum(c * cls[k].size for k, c in enumerate(v.values))
            assert total == cls[i].size * cls[j].size


def test_class_sum_symmetry():
    G = parse_group_spec("binary-dihedral:2")
    n = len(G.conjugacy_classes())
    for i in range(n):
        for j in range(n):
            assert class_sum_product(G, i, j) == class_sum_product(G, j, i)


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        parse_group_spec("cyclic:50", cap=10)


def test_not_symplectic_rejected():
    sp = SympSpace.standard(1)
    with pytest.raises(NotSymplectic):
        generate([Mat([[1, 0], [0, 2]])], sp)


def test_direct_product():
    G1 = parse_group_spec("cyclic:2")
    G2 = parse_group_spec("cyclic:3")
    G = direct_product(G1, G2)
    assert G.order == 6
    assert G.dim == 4
    assert len(G.conjugacy_classes()) == 6


def test_direct_product_weyl_factor():
    G = direct_product(parse_group_spec("cyclic:2"), parse_group_spec("weyl:A2"))
    assert G.order == 12
    assert G.dim == 6


def test_parse_group_spec_errors():
    for bad in ("nope:3", "cyclic", "cyclic:"):
        with pytest.raises(ValueError):
            parse_group_spec(bad)


def test_symmetric_spec_aliases_weyl_a():
    G = parse_group_spec("symmetric:4")
    assert G.order == 24
    assert G.dim == 6


def test_matrix_file_spec(tmp_path):
    z = CycloNum.zeta(3)
    sp = SympSpace.standard(1)
    g = Mat([[z, 0], [0, z ** -1]])
    path = tmp_path / "c3.json"
    path.write_text(json.dumps({"J": sp.J.to_json(), "gens": [g.to_json()]}))
    G = parse_group_spec(f"matrix-file:{path}")
    assert G.order == 3


def test_element_order_is_canonical():
    # two builds of the same group agree element by element
    a = generate([Mat([[0, 1], [-1, 0]])], SympSpace.standard(1))
    b = generate([Mat([[0, -1], [1, 0]])], SympSpace.standard(1))
    assert a.order == b.order == 4
    assert all(a.element(i) == b.element(i) for i in range(4))
