import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from interlevel.cli import main, parse_grid
from interlevel.pl_geometry import fixture_path, load_fixture


def run(*args, code=0):
    res = CliRunner().invoke(main, list(args))
    assert res.exit_code == code, res.output + res.stderr
    return res.stdout


def fx(name):
    return str(fixture_path(name))


def test_barcode_circle():
    out = json.loads(run("barcode", "--input", fx("circle")))
    assert out["schema_version"] == 1
    got = {(b["degree"], b["kind"], b["a"], b["b"]) for b in out["bars"]}
    assert got == {(0, "closed", "0/1", "1/1"), (0, "open", "0/1", "1/1")}


def test_barcode_text_and_svg():
    assert run("barcode", "--input", fx("block_peup"), "--format", "text").strip() == "H0 [0, 1)"
    svg = run("barcode", "--input", fx("block_pr"), "--format", "svg")
    assert svg.startswith("<svg") and "λ₀" in svg


def test_barcode_pn_input():
    out = json.loads(run("barcode", "--input", fx("pn_genus2_stacked")))
    assert {b["kind"] for b in out["bars"]} <= {"closed", "open"}


def test_blocks_and_hk():
    out = json.loads(run("blocks", "--input", fx("block_mixed")))
    assert any(b["kind"] == "torsion" for b in out["blocks"])
    hk = json.loads(run("hk", "--input", fx("block_pm"), "--grid", "0:1:1/2,0:1:1/2", "--degree", "0"))
    assert len(hk["rows"]) == 9


@pytest.mark.parametrize("name", ["circle", "torus", "block_mixed", "pn_weakdualstrict", "pn_genus2_nested"])
def test_verify_fixtures(name):
    assert json.loads(run("verify", "--input", fx(name)))["ok"]


def test_empty_complex(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"type": "pl", "vertices": [], "simplices": []}))
    out = json.loads(run("barcode", "--input", str(path)))
    assert out["bars"] == [] and out["torsion"] == []


def test_corrupted_winding(tmp_path):
    data = load_fixture("torus_circle").to_json()
    data["windings"][0][2] += 1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    out = json.loads(run("verify", "--input", str(path), code=1))
    assert not out["ok"]
    run("barcode", "--input", str(path), code=2)


def test_bad_input_exit_code(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    run("barcode", "--input", str(path), code=2)
    run("hk", "--input", fx("circle"), "--grid", "0:1", code=2)


def test_irregular_grid_points_are_skipped():
    res = CliRunner().invoke(main, ["verify", "--input", fx("circle"), "--grid", "0:1:1/2,0:1:1/2"])
    out = json.loads(res.stdout)
    assert res.exit_code == 0 and out["skipped"] == 9 and out["notices"]
    assert "skipped irregular point" in res.stderr


def test_perturb_zero_eps():
    out = json.loads(run("perturb", "--eps", "0", "--trials", "4"))
    assert out["failures"] == 0 and out["max_gap_drift"] == "0/1"


def test_perturb_on_input():
    out = json.loads(run("perturb", "--input", fx("pn_genus2_stacked"), "--trials", "3"))
    assert out["failures"] == 0


def test_uniform_shift_matches(tmp_path):
    data = load_fixture("sphere").to_json()
    base = json.loads(run("barcode", "--input", fx("sphere")))["bars"]
    for v in data["vertices"]:
        v["theta"] = str(Fraction(v["theta"]) + 5)
    path = tmp_path / "shifted.json"
    path.write_text(json.dumps(data))
    moved = json.loads(run("barcode", "--input", str(path)))["bars"]
    shift = lambda b: (b["degree"], b["kind"], Fraction(b["a"]) + 5, Fraction(b["b"]) + 5)
    assert sorted(map(shift, base)) == sorted((b["degree"], b["kind"], Fraction(b["a"]), Fraction(b["b"])) for b in moved)


def test_output_is_deterministic():
    a = run("blocks", "--input", fx("klein_circle"), "--seed", "3")
    b = run("blocks", "--input", fx("klein_circle"), "--seed", "3")
    assert a == b


def test_parse_grid():
    ss, ts = parse_grid("0:1:1/2,-1:0:1")
    assert [str(x) for x in ss] == ["0", "1/2", "1"] and [str(x) for x in ts] == ["-1", "0"]
