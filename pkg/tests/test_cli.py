import json

import pytest

from coarsegroups.cli import DEFAULT_SEED, SCHEMA_VERSION, main
from coarsegroups.faults import KNOWN

HALVING = "span{apex: Z, left: [[2]], right: [[1]]}"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def result(capsys, *argv):
    code, out = run(capsys, *argv)
    assert code == 0, out
    doc = json.loads(out)
    assert doc["schema_version"] == SCHEMA_VERSION and doc["verb"] == argv[0]
    return doc["result"]


def test_check_hom_doubling(capsys):
    r = result(capsys, "check-hom", "--source", "Z", "--target", "Z", "--matrix", "[[2]]",
               "--ideals", "finitary,finitary")
    assert r["coarse_equivalence"] is True


def test_qh_defect_abs(capsys):
    r = result(capsys, "qh-defect", "--map", "abs", "--radii", "100,200")
    assert r["verdict"] == "REJECTED"
    assert r["witnesses"]["200"] == {"defect": -400, "pair": [200, -200]}


def test_smallset(capsys):
    r = result(capsys, "smallset", "--set", "periodic{m:1, residues:[], except:[+1,+5]}")
    assert r["small"] is True and r["elements"] == [1, 5]


def test_other_verbs(capsys):
    assert result(capsys, "analyze-group", "--group", "Z^2 + Z/4")["free_rank"] == 2
    r = result(capsys, "classify", "--groups", "Z^2 + Z/6", "Z^2 + Z/35")
    assert r["verdict"] == "COARSELY_EQUIVALENT"
    r = result(capsys, "span-compose", "--first", HALVING, "--second", HALVING)
    assert r["rational"] == [["1/4"]]
    r = result(capsys, "span-equal", "--first", HALVING, "--second", HALVING)
    assert r["verdict"] == "EQUIVALENT"
    r = result(capsys, "ore", "--w-source", "Z", "--f-source", "Z", "--target", "Z", "--w", "[[2]]", "--f", "[[3]]")
    assert r["w_prime_ce"] is True
    r = result(capsys, "qh-section", "--map", "largest-even-below", "--radii", "50,100")
    assert r["assertion"] == "HOLDS"
    r = result(capsys, "asdim-witness", "--dim", "1", "--s", "3", "--window", "200")
    assert r["periodic"]["K_radius"] == 7


def test_seed_is_echoed_and_flags_go_anywhere(capsys):
    _, out = run(capsys, "analyze-group", "--group", "Z")
    assert json.loads(out)["seed"] == DEFAULT_SEED
    _, a = run(capsys, "--seed", "7", "analyze-group", "--group", "Z")
    _, b = run(capsys, "analyze-group", "--group", "Z", "--seed", "7")
    assert a == b and json.loads(a)["seed"] == 7


def test_text_format(capsys):
    code, out = run(capsys, "smallset", "--set", "periodic{m: 2, residues: [0]}", "--format", "text")
    assert code == 0 and "result.small: false" in out.splitlines()


@pytest.mark.parametrize("argv, code", [
    (["analyze-group", "--group", "Q"], 2),
    (["frobnicate"], 2),
    (["qh-defect", "--map", "sin"], 2),
    (["asdim-witness", "--dim", "3"], 3),
    (["ore", "--w-source", "Z", "--f-source", "Z", "--target", "Z", "--w", "[[0]]", "--f", "[[1]]"], 3),
    (["audit", "--inject-fault", "no.such.fault"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert main(argv) == code


@pytest.mark.parametrize("fault", KNOWN)
def test_injected_faults_exit_four_with_certificate(capsys, fault):
    code, out = run(capsys, "audit", "--seed", "42", "--samples", "10", "--inject-fault", fault)
    assert code == 4
    doc = json.loads(out)["result"]
    assert not doc["passed"] and doc["findings"]


def test_audit_is_clean_and_deterministic(capsys):
    code, a = run(capsys, "audit", "--seed", "42")
    assert code == 0 and json.loads(a)["result"]["passed"]
    _, b = run(capsys, "audit", "--seed", "42")
    assert a == b
    code, c = run(capsys, "audit", "--seed", "43", "--samples", "10")
    assert code == 0
