"""Root-system data, Weyl groups and Molien-derived exponents."""
import math

import pytest

from mckaykit.catalog import (
    CATALOG_TYPES, cartan_data, catalog_table, exponents, resolution_exists,
    root_system_info, simple_reflections, sl2_subgroup, weyl_group,
)
from mckaykit.exactlin import Mat

WEYL_ORDERS = {
    ("A", 1): 2, ("A", 2): 6, ("A", 3): 24, ("A", 4): 120, ("A", 5): 720,
    ("B", 2): 8, ("B", 3): 48, ("B", 4): 384,
    ("C", 3): 48, ("D", 4): 192, ("F", 4): 1152, ("G", 2): 12,
}

KNOWN_EXPONENTS = {
    ("A", 2): [1, 2], ("A", 3): [1, 2, 3], ("A", 5): [1, 2, 3, 4, 5],
    ("B", 2): [1, 3], ("B", 3): [1, 3, 5], ("C", 3): [1, 3, 5],
    ("D", 4): [1, 3, 3, 5], ("F", 4): [1, 5, 7, 11], ("G", 2): [1, 5],
}


def test_cartan_matrices():
    C, S = cartan_data("A", 2)
    assert C == [[2, -1], [-1, 2]]
    assert S == [[2, -1], [-1, 2]]
    C, S = cartan_data("G", 2)
    assert C == [[2, -1], [-3, 2]]
    assert S[0][1] == S[1][0]
    C, _ = cartan_data("B", 3)
    assert C[1][2] == -1 and C[2][1] == -2


def test_gram_symmetric_everywhere():
    for typ, rank in CATALOG_TYPES:
        _, S = cartan_data(typ, rank)
        assert all(S[i][j] == S[j][i] for i in range(rank) for j in range(rank))


def test_simple_reflections_are_involutions():
    for typ, rank in (("A", 3), ("B", 3), ("D", 4), ("G", 2)):
        for s in simple_reflections(typ, rank):
            assert s * s == Mat.identity(rank)


@pytest.mark.parametrize("typ,rank", sorted(WEYL_ORDERS))
def test_weyl_orders(typ, rank):
    assert weyl_group(typ, rank).order == WEYL_ORDERS[(typ, rank)]


def test_weyl_group_preserves_form():
    W = weyl_group("B", 2)
    for i in range(W.order):
        assert W.space.is_symplectic(W.element(i))


@pytest.mark.parametrize("typ,rank", sorted(KNOWN_EXPONENTS))
def test_exponents(typ, rank):
    assert exponents(typ, rank) == KNOWN_EXPONENTS[(typ, rank)]


def test_exponents_product_is_group_order():
    for typ, rank in (("A", 4), ("B", 3), ("D", 4), ("G", 2)):
        m = exponents(typ, rank)
        assert math.prod(e + 1 for e in m) == weyl_group(typ, rank).order


def test_sl2_families():
    assert sl2_subgroup("cyclic", 1).order == 1
    assert sl2_subgroup("cyclic", 7).order == 7
    assert sl2_subgroup("binary-dihedral", 5).order == 20
    with pytest.raises(ValueError):
        sl2_subgroup("icosahedral", 5)


def test_resolution_flags():
    assert resolution_exists("A")[0]
    assert resolution_exists("B")[0]
    assert resolution_exists("C")[0]
    for typ in "DEFG":
        ok, cite = resolution_exists(typ)
        assert not ok and cite


def test_root_system_info():
    info = root_system_info("A", 2)
    assert info.label == "A2"
    assert info.weyl_order == 6
    assert info.exponents == [1, 2]
    out = info.to_json()
    assert set(out) == {"label", "rank", "cartan", "gram", "simple_roots",
                        "resolution_exists", "citation", "weyl_order", "exponents"}


def test_root_system_info_respects_cap():
    info = root_system_info("E", 8, compute_cap=100)
    assert info.weyl_order is None and info.exponents is None
    assert info.cartan and info.resolution_exists is False


def test_catalog_table_covers_all_types():
    table = catalog_table(compute_cap=50)
    assert len(table) == len(CATALOG_TYPES)
    labels = [r.label for r in table]
    assert "E8" in labels and "A1" in labels
