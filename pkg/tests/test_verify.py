import numpy as np
import pytest

from quiltlab import jsonio, verify


def test_suite_seeds_are_stable_and_distinct():
    a = verify.suite_seed(0, "maslov")
    assert a == verify.suite_seed(0, "maslov")
    assert a != verify.suite_seed(1, "maslov")
    assert a != verify.suite_seed(0, "degprop")
    assert 0 <= a < 2**63


def test_reports_reproducible():
    a = verify.run_suite("gradingcomp", seed=11, instances=20)
    b = verify.run_suite("gradingcomp", seed=11, instances=20)
    assert jsonio.dumps(verify.strip_timing(a)) == jsonio.dumps(verify.strip_timing(b))


def test_compose_at_reuses_quilt_sequences():
    assert verify.SUITES["compose-at"].seed_from == "quilt-degree"
    rep = verify.run_suite("compose-at", seed=0, instances=10)
    assert rep["seed"] == verify.suite_seed(0, "quilt-degree")
    other = verify.run_suite("quilt-degree", seed=0, instances=10)
    assert rep["summary"]["sequence_digest"] == other["summary"]["sequence_digest"]


def test_failures_are_capped_and_counted():
    out = verify.Outcome()
    for i in range(30):
        out.fail(i, "x", value=np.float64(0.5))
    assert out.failure_count == 30
    assert len(out.failures) == verify.MAX_WITNESSES
    assert out.failures[0]["witness"] == {"value": 0.5}


def test_unknown_suite():
    with pytest.raises(KeyError):
        verify.run_suite("nope")


def test_fixed_modulus_is_honoured():
    rep = verify.run_suite("degprop", seed=1, instances=10, N=6)
    assert rep["pass"] and rep["params"]["N"] == 6


def test_thread_cap_from_environment(monkeypatch):
    monkeypatch.setenv("QUILTLAB_THREADS", "3")
    assert verify.thread_cap() == 3
    monkeypatch.setenv("QUILTLAB_THREADS", "junk")
    assert verify.thread_cap() >= 1


def test_verify_all_subset_aggregates():
    rep = verify.verify_all(seed=2, suites=["contraction", "degree-routes"], instances=5)
    assert rep["pass"]
    assert [r["suite"] for r in rep["reports"]] == ["contraction", "degree-routes"]
    assert rep["instances"] == 10
