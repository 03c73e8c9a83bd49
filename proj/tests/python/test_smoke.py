import math

import pytest

import csplab


def test_sample_is_planted_and_deterministic():
    a = csplab.sample("sat", 12, 1.5, seed=4)
    b = csplab.sample("sat", 12, 1.5, seed=4)
    assert a == b
    assert a["n"] == 12
    assert len(a["planted"]) == 12


def test_count_methods_agree():
    brute = csplab.count("naesat", 14, 1.0, seed=2, method="brute")
    comp = csplab.count("naesat", 14, 1.0, seed=2, method="components")
    assert brute["z"] == comp["z"]
    assert int(brute["z"]) >= 1


def test_xorsat_count_is_power_of_two():
    c = csplab.count("xorsat", 40, 0.8, seed=1)
    z = int(c["z"])
    assert c["method"] == "gf2"
    assert z & (z - 1) == 0
    assert c["log2_z"] == math.log2(z)


def test_dimacs_round_trip():
    text = csplab.export_dimacs("sat", 10, 2.0, seed=3)
    assert text.startswith("p cnf 10 ")
    assert csplab.count_dimacs(text)["z"] == csplab.count("sat", 10, 2.0, seed=3)["z"]


def test_estimators():
    psi = csplab.estimate_psi("sat", 10, 0.0, samples=5)
    assert psi["estimate"] == 1.0
    q = csplab.estimate_qn("sat", 10, 1.0, phi=0.5, samples=20, jobs=2)
    assert 0.0 <= q["proportion"] <= 1.0


def test_gamma_identities():
    assert abs(csplab.gamma("0x96", 3, 1, [0.3, 0.7]) - 0.5) < 1e-12
    assert abs(csplab.gamma("0x96", 3, 2, [0.25] * 4) - 0.25) < 1e-12


def test_scan_small():
    r = csplab.scan_predicates(3, pairs=2000, hessian_points=20)
    assert r["unresolved"] == 0
    assert all(s["status"] == "VIOLATED" for s in r["survivors"])


def test_errors_raise():
    with pytest.raises(csplab.CsplabError, match="density-out-of-range"):
        csplab.sample("sat", 5, 100.0)
    with pytest.raises(csplab.CsplabError):
        csplab.sample("gold", 10, 1.0, predicate="0x96", plant_mode="unplanted")


def test_cli_in_process():
    code, out, err = csplab.run_cli(["count", "--family", "sat", "--n", "10", "--alpha", "1"])
    assert code == 0 and err == ""
    assert '"subcommand":"count"' in out
