import json
import subprocess
import sys

import numpy as np
import pytest

from surfembed.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_surface(capsys):
    code, out, err = run(capsys, "surface", "3", "4", "plain")
    assert code == 0
    rep = json.loads(out)
    o = rep["outputs"]
    assert (o["genus"], o["boundary_count"], o["knot_type"], o["oracle"]) == (3, 1, [3, 4], "match")
    assert rep["command"] == "surface" and rep["version"]
    assert "genus 3" in err


def test_surface_minus_orbifold(capsys):
    code, out, _ = run(capsys, "surface", "2", "2", "minus", "--quiet")
    assert code == 0 and json.loads(out)["outputs"]["orbifold_type"] == "(0:4,4,2)"


def test_surface_mirror(capsys):
    code, out, _ = run(capsys, "surface", "3", "4", "plus", "--mirror", "--quiet")
    o = json.loads(out)["outputs"]
    assert o["oracle"] == "match" and o["tracer"]["homology_classes"][0] == [1, -1]


def test_degenerate(capsys):
    code, out, err = run(capsys, "surface", "1", "1", "minus")
    assert code == 3 and out == ""
    assert json.loads(err)["error"] == "DegenerateSpec"


@pytest.mark.parametrize(
    "argv",
    [["surface", "x", "1", "plain"], ["surface", "2", "3", "sideways"], ["classify", "1", "3", "3,3,3"], []],
)
def test_parse_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "UsageError"


@pytest.mark.parametrize(
    "g,n,sig,D",
    [("2", "6", "(0:6,6,3)", 4), ("1", "3", "(0:3,3,3)", 5), ("5", "8", "(0:8,8,4,2)", 6)],
)
def test_classify(capsys, g, n, sig, D):
    code, out, _ = run(capsys, "classify", g, n, sig, "--quiet")
    o = json.loads(out)["outputs"]
    assert code == 0 and o["dgf"] == D and o["rh"]["holds"]
    if n == "8":
        assert o["dhat"] == [6, 6]


def test_classify_rh_failure(capsys):
    code, out, err = run(capsys, "classify", "2", "6", "(0:6,6,2)")
    e = json.loads(err)
    assert code == 3 and e["rh_defect"] == "-1"


def test_classify_provenance_matches_library(capsys):
    from surfembed.classification import MapDatum, lower_bound, upper_bound

    _, out, _ = run(capsys, "classify", "4", "12", "(0:12,6,4)", "--quiet")
    rep = json.loads(out)
    d = MapDatum(4, 12, "(0:12,6,4)")
    assert rep["outputs"]["lower"]["provenance"] == list(lower_bound(d).provenance)
    assert rep["outputs"]["upper"]["provenance"] == list(upper_bound(d).provenance)
    assert set(lower_bound(d).provenance) <= set(rep["provenance"])


def test_classify_outside_range(capsys):
    code, out, _ = run(capsys, "classify", "2", "3", "(0:3,3,3,3)", "--quiet")
    o = json.loads(out)["outputs"]
    assert code == 0 and o["dgf"] is None and o["upper"] is None and o["dhat"] == [3, None]


def test_family(capsys):
    code, out, _ = run(capsys, "family", "2", "3", "--quiet")
    o = json.loads(out)["outputs"]
    assert code == 0 and (o["genus"], o["dgf"], o["signature"]) == (5, 6, "(0:8,8,4,2)")
    code, _, err = run(capsys, "family", "4", "3")
    assert code == 3 and json.loads(err)["error"] == "InvalidFamily"


def test_trace(capsys):
    code, out, _ = run(capsys, "trace", "3", "4", "plus", "--quiet")
    o = json.loads(out)["outputs"]
    assert o["band_count"] == 12 and o["euler_char"] == -9 and len(o["cycles"]) == 5


def test_realize(capsys, tmp_path):
    code, out, _ = run(capsys, "realize", "2", "4", "plain", "--resolution", "64", "--out", str(tmp_path), "--quiet")
    o = json.loads(out)["outputs"]
    assert code == 0 and o["ambient_dim"] == 4
    assert o["equivariance_residual"] < 1e-9 and o["min_separation"] > 0
    rows = (tmp_path / "points.txt").read_text().splitlines()
    assert len(rows) == o["samples"]
    assert len(rows[0].split()) == 3 + 5
    assert (tmp_path / "surface.obj").exists()


def test_realize_plus(capsys):
    code, out, _ = run(capsys, "realize", "3", "4", "plus", "--resolution", "64", "--quiet")
    assert code == 0 and json.loads(out)["outputs"]["ambient_dim"] == 6


def test_realize_corners(capsys, tmp_path):
    code, out, _ = run(capsys, "realize", "2", "3", "plain", "--resolution", "1", "--out", str(tmp_path), "--quiet")
    assert code == 0
    for line in (tmp_path / "points.txt").read_text().splitlines():
        x = np.array([float(t) for t in line.split()[3:]])
        assert abs(np.linalg.norm(x) - 1) < 1e-12


def test_realize_topological(capsys):
    code, out, _ = run(capsys, "realize", "4", "6", "plain", "--topological", "--resolution", "8", "--quiet")
    o = json.loads(out)["outputs"]
    assert code == 0 and o["ambient_dim"] == 4 and not o["smooth"]


def test_no_plan(capsys):
    code, out, err = run(capsys, "realize", "4", "6", "plain")
    assert code == 4 and json.loads(err)["error"] == "NoPlan"


def test_deterministic(capsys):
    a = run(capsys, "realize", "3", "4", "minus", "--resolution", "8", "--quiet")[1]
    b = run(capsys, "realize", "3", "4", "minus", "--resolution", "8", "--quiet")[1]
    assert a == b
    c = run(capsys, "classify", "1", "4", "(0:4,4,2)", "--quiet")[1]
    assert json.loads(c) == json.loads(json.dumps(json.loads(c)))


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "surfembed", "classify", "1", "3", "(0:3,3,3)", "--quiet"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0 and json.loads(res.stdout)["outputs"]["dgf"] == 5
