"""CLI behaviors: schemas, determinism, exit codes."""
import json

import pytest

from mckaykit.cli import (
    EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_USAGE, catalog_group_specs, main,
    weyl_order,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_classes(capsys):
    code, out = run_json(capsys, "classes", "cyclic:4")
    assert code == EXIT_OK
    assert out["order"] == 4 and out["num_classes"] == 4
    assert all(c["size"] == 1 for c in out["classes"])
    degrees = sorted(c["degree"] for c in out["classes"])
    assert degrees == [0, 2, 2, 2]


def test_reflections(capsys):
    code, out = run_json(capsys, "reflections", "cyclic:6")
    assert code == EXIT_OK
    assert out["n"] == 5
    assert len(out["reflection_classes"]) == 5


def test_orbifold_poincare_and_betti(capsys):
    code, out = run_json(capsys, "orbifold-poincare", "cyclic:3")
    assert code == EXIT_OK and out["poincare"] == [1, 0, 2]
    code, out = run_json(capsys, "betti", "cyclic:3")
    assert code == EXIT_OK
    assert out["betti"] == [{"degree": 0, "b": 1}, {"degree": 2, "b": 2}]


def test_grcenter_schema(capsys):
    code, out = run_json(capsys, "grcenter", "cyclic:2")
    assert code == EXIT_OK
    assert out["group"] == "cyclic:2"
    assert set(out) >= {"classes", "constants", "poincare"}


def test_rees(capsys):
    code, out = run_json(capsys, "rees", "binary-dihedral:2")
    assert code == EXIT_OK
    assert all(set(t) == {"i", "j", "k", "c", "u"} for t in out["terms"])


def test_molien_window(capsys):
    code, out = run_json(capsys, "molien", "cyclic:2", "--window", "4")
    assert code == EXIT_OK
    assert out["coefficients"] == [1, 0, 3, 0, 5]
    assert out["max_degree"] == 4


def test_exponents(capsys):
    code, out = run_json(capsys, "exponents", "weyl:B2")
    assert code == EXIT_OK
    assert out == {"type": "B2", "exponents": [1, 3]}


def test_exponents_rejects_non_weyl(capsys):
    code, out = run_json(capsys, "exponents", "cyclic:3")
    assert code == EXIT_USAGE
    assert "error" in out


def test_catalog_list(capsys):
    code, out = run_json(capsys, "catalog", "--cap", "100")
    assert code == EXIT_OK
    rows = {r["label"]: r for r in out["catalog"]}
    assert rows["A2"]["exponents"] == [1, 2]
    assert rows["E8"]["weyl_order"] is None
    assert rows["A2"]["resolution_exists"] is True
    assert rows["D4"]["resolution_exists"] is False


def test_hp_schema(capsys):
    code, out = run_json(capsys, "hp", "cyclic:2", "--window", "6", "--k", "2")
    assert code == EXIT_OK
    assert out["k"] == 2 and out["window"] == 6
    cert = {e["m"]: e["dim"] for e in out["certified"]}
    assert cert[-4] == 1
    assert all(set(e) == {"m", "dim"} for e in out["uncertified"])


def test_hp1(capsys):
    code, out = run_json(capsys, "hp", "cyclic:2", "--window", "6", "--k", "1")
    assert code == EXIT_OK
    assert out["k"] == 1
    assert all(e["dim"] == 0 for e in out["certified"])


def test_mc_extend(capsys):
    code, out = run_json(capsys, "mc-extend", "cyclic:2", "--window", "6")
    assert code == EXIT_OK
    assert out["extensions"][0]["status"] == "extended"
    assert out["sum"] is None  # single basis cocycle, no sum case


def test_usage_error_exit_code(capsys):
    assert main(["no-such-command"]) == EXIT_USAGE
    capsys.readouterr()
    assert main(["classes"]) == EXIT_USAGE
    capsys.readouterr()
    code, out = run_json(capsys, "classes", "bogus:spec")
    assert code == EXIT_USAGE and "error" in out


def test_cap_exit_code(capsys):
    code, out = run_json(capsys, "classes", "cyclic:40", "--cap", "10")
    assert code == EXIT_CAP
    assert out["error"] == "cap exceeded"


def test_text_format(capsys):
    code, out = run(capsys, "reflections", "cyclic:3", "--format", "text")
    assert code == EXIT_OK
    assert "n: 2" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_output_is_deterministic(capsys):
    _, a = run(capsys, "grcenter", "binary-dihedral:2")
    _, b = run(capsys, "grcenter", "binary-dihedral:2")
    assert a == b


def test_verify_schouten(capsys):
    code, out = run_json(capsys, "verify", "schouten")
    assert code == EXIT_OK
    assert out["pass"] and out["suite"] == "schouten"
    assert out["d_squared_zero"] > 0


def test_verify_kunneth_single_pair(capsys):
    code, out = run_json(capsys, "verify", "kunneth",
                         "--groups", "cyclic:2,cyclic:3")
    assert code == EXIT_OK
    assert out["pass"] and len(out["cases"]) == 1


def test_verify_lemma_easy_small(capsys):
    code, out = run_json(capsys, "verify", "lemma-easy", "--max-order", "24")
    assert code == EXIT_OK and out["pass"]
    specs = {c["group"] for c in out["cases"]}
    assert "weyl:A3" in specs and "cyclic:12" in specs


def test_verify_grcenter_axioms_small(capsys):
    code, out = run_json(capsys, "verify", "grcenter-axioms", "--max-order", "12")
    assert code == EXIT_OK and out["pass"]


def test_verify_hp_duval_a1(capsys):
    code, out = run_json(capsys, "verify", "hp-duval", "--type", "A1")
    assert code == EXIT_OK
    assert out["pass"] and out["hp2_certified_total"] == 1


def test_catalog_group_specs_ordering():
    specs = catalog_group_specs(50)
    assert specs[0] == "cyclic:2"
    assert "weyl:B3" in specs and "weyl:B4" not in specs
    assert all("binary" not in s or 4 * int(s.split(":")[1]) <= 50 for s in specs)


def test_weyl_order_formulas():
    assert weyl_order("A", 5) == 720
    assert weyl_order("B", 4) == 384
    assert weyl_order("D", 5) == 1920
    assert weyl_order("E", 6) == 51840
