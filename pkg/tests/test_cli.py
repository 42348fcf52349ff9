import json
import subprocess
import sys

import pytest

from quiltlab.cli import run

HORIZONTAL = {"schema": "quiltlab/1", "space": {"n": 1}, "columns": [[1.0, 0.0]]}


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return write


def _out(capsys):
    return json.loads(capsys.readouterr().out)


def test_degenerate_composition_exits_one_with_kernel(files, capsys):
    lam = files("lam.json", HORIZONTAL)
    assert run(["compose", lam, lam]) == 1
    doc = _out(capsys)
    assert doc["kind"] == "failure"
    assert doc["witness"]["defect"] == 1
    assert doc["witness"]["kernel"] == [[1.0, 0.0]]


def test_transverse_composition(files, capsys):
    a = files("a.json", HORIZONTAL)
    b = files("b.json", {"space": {"n": 1}, "columns": [[0.0, 1.0]]})
    assert run(["compose", a, b]) == 0
    assert _out(capsys)["transverse"] is True


def test_maslov_prints_fractions(files, capsys):
    loop = files("loop.json", {"kind": "rotation", "frame": HORIZONTAL})
    half = files("half.json", {"kind": "rotation", "angle": 1.5707963267948966, "frame": HORIZONTAL})
    fixed = files("h.json", HORIZONTAL)
    assert run(["maslov", "--pair", loop, fixed]) == 0
    assert _out(capsys)["rs_index"] == "1"
    assert run(["maslov", "--pair", half, fixed]) == 0
    assert _out(capsys)["rs_index"] == "1/2"
    assert run(["maslov", "--pair", fixed, loop]) == 0
    assert _out(capsys)["rs_index"] == "-1"


def test_degree(files, capsys):
    a = files("a.json", {**HORIZONTAL, "k": 0, "N": 4})
    b = files("b.json", {"space": {"n": 1}, "columns": [[0.0, 1.0]], "k": 0, "N": 4})
    assert run(["degree", "--a", a, "--b", b]) == 0
    assert _out(capsys)["degree"] == 0
    assert run(["degree", "--a", b, "--b", a]) == 0
    assert _out(capsys)["degree"] == 1


def test_malformed_input_exits_two_with_pointer(files, capsys):
    bad = files("bad.json", {"space": {"n": 1}, "columns": [[1.0]]})
    assert run(["compose", bad, bad]) == 2
    assert "/columns" in capsys.readouterr().err


def test_ungraded_degree_input_is_malformed(files, capsys):
    a = files("a.json", HORIZONTAL)
    assert run(["degree", "--a", a, "--b", a]) == 2


def test_unknown_flag_exits_two(capsys):
    assert run(["verify", "--bogus"]) == 2
    assert run(["toric", "calc", "--n", "2", "--N", "3"]) == 2


def test_quilt_subcommands(files, capsys):
    from tests.test_quilt import SLOPE_THREE

    seq = files("seq.json", SLOPE_THREE)
    assert run(["quilt", "generators", seq]) == 0
    assert _out(capsys)["count"] == 3
    assert run(["quilt", "degrees", seq]) == 0
    d = _out(capsys)
    assert d["definition"] == d["alternative_a"] == d["alternative_b"] == 0
    assert run(["quilt", "homology", seq]) == 0
    assert _out(capsys)["total_rank"] == 3
    oracle = files("oracle.json", {"counts": [[0, 1, 1]]})
    assert run(["quilt", "homology", "--oracle", oracle, seq]) == 1
    assert "differ" in _out(capsys)["message"]


def test_quilt_compose_on_projective_sequence(files, capsys):
    seq = files(
        "cpn.json",
        {
            "provider": "cpn",
            "N": 2,
            "correspondences": [
                {"kind": "clifford", "m": 1, "n": 3},
                {"kind": "sigma", "levels": [2, 3], "n": 3},
                {"kind": "clifford", "m": 3, "transpose": True},
            ],
        },
    )
    assert run(["quilt", "compose", "--at", "1", seq]) == 0
    doc = _out(capsys)
    assert doc["before"] == doc["after"] == 8


def test_toric_calc(capsys):
    assert run(["toric", "calc", "--n", "2"]) == 0
    doc = _out(capsys)
    assert doc["ok"] and all(s["generators"] == 4 for s in doc["steps"])


def test_toric_tau(capsys):
    assert run(["toric", "tau", "--n", "4"]) == 0
    doc = _out(capsys)
    assert doc["tau"] == "1/5"
    assert {r["tau_reduced"] for r in doc["reduced"]} == {"1/5"}


def test_verify_single_suite_report(capsys):
    assert run(["verify", "--suite", "degprop", "--n-max", "3", "--instances", "500", "--seed", "7"]) == 0
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert doc["passed"] == doc["instances"] == 500
    assert "500/500" in captured.err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quiltlab", "toric", "tau", "--n", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["tau"] == "1/3"
