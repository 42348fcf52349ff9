import json

import numpy as np
import pytest

from quiltlab import jsonio, quilt
from quiltlab.grading import GradedLagrangian, grade
from quiltlab.jsonio import SchemaError
from quiltlab.symplinalg import random_lagrangian, subspace_distance


def test_frame_round_trip(rng):
    g = grade(random_lagrangian(2, rng), 3, 4)
    back = jsonio.load_frame(json.loads(jsonio.dumps(jsonio.dump_frame(g))))
    assert isinstance(back, GradedLagrangian)
    assert subspace_distance(back.frame, g.frame) < 1e-12
    assert back.theta == pytest.approx(g.theta)


def test_sequence_round_trip(rng):
    seq = quilt.random_sequence(rng, r_max=3, n_max=2, modulus=4)
    doc = jsonio.dump_torus_sequence(seq)
    back = jsonio.load_sequence(json.loads(jsonio.dumps(doc)))
    assert [g.points for g in quilt.intersection_points(back)] == pytest.approx(
        [g.points for g in quilt.intersection_points(seq)]
    ) or len(quilt.intersection_points(seq)) == 0


def test_dumps_is_canonical():
    text = jsonio.dumps({"b": 1, "a": [1, 2]})
    assert text == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'


@pytest.mark.parametrize(
    "doc,where",
    [
        ({"space": {"n": -1}, "columns": []}, "/space/n"),
        ({"space": {"n": 1}, "columns": [[1.0]]}, "/columns"),
        ({"space": {"n": 1}, "columns": [[1.0, 0.0]], "N": 3}, "/N"),
        ({"columns": [[1.0, 0.0]]}, "/"),
    ],
)
def test_frame_errors_carry_pointer(doc, where):
    with pytest.raises(SchemaError) as info:
        jsonio.load_frame(doc)
    assert info.value.pointer == where


def test_non_lagrangian_columns_rejected():
    with pytest.raises(SchemaError) as info:
        jsonio.load_frame({"space": {"n": 2}, "columns": [[1, 0, 0, 0], [0, 0, 1, 0]]})
    assert info.value.pointer == "/columns"


def test_sequence_errors_carry_pointer():
    doc = {
        "provider": "torus",
        "N": 2,
        "manifolds": [{"n": 0}, {"n": 1}],
        "correspondences": [{"direction": [[2], [0]]}, {"direction": [[1], [0]]}],
    }
    with pytest.raises(SchemaError) as info:
        jsonio.load_sequence(doc)
    assert info.value.pointer == "/correspondences/0/direction"


def test_cpn_sequence_loads():
    doc = {"provider": "cpn", "N": 2, "correspondences": [{"kind": "clifford", "m": 2}, {"kind": "clifford", "m": 2, "transpose": True}]}
    seq = jsonio.load_sequence(doc)
    assert len(seq.relations) == 2


def test_report_schema_accepts_suite_reports():
    from quiltlab.verify import run_suite

    rep = run_suite("contraction", seed=3, instances=5)
    jsonio.validate(json.loads(jsonio.dumps(rep)), jsonio.REPORT)


def test_invalid_json_file(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        jsonio.read(p)


def test_fraction_strings():
    from fractions import Fraction

    assert jsonio.fraction_str(Fraction(1, 2)) == "1/2"
    assert jsonio.fraction_str(Fraction(-3)) == "-3"
    assert jsonio.rounded(-0.0) == 0.0 and str(jsonio.rounded(-1e-15)) == "0.0"
    assert np.isclose(jsonio.rounded(0.1 + 0.2), 0.3)
