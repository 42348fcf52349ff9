"""Acceptance criteria, one test each, at the stated instance counts, tolerances and runtime budgets.

Each test logs a single PASS/FAIL line, gathered in the terminal summary.
Run as a script to print the lines directly.
"""

import json
import time

import pytest

from quiltlab import jsonio, verify

SEED = 20240917

# (criterion, suite, params, runtime budget in seconds or None, description)
CRITERIA = [
    (1, "composition", {"instances": 1000, "n_max": 4, "tol": 1e-8}, 10, "composition laws, distance < 1e-8"),
    (2, "immersion", {"instances": 1000, "degenerate": 200}, 10, "kernel dimension equals defect"),
    (3, "maslov", {"instances": 500, "n_max": 3}, 60, "crossing index equals winding, generator loop 1, half rotation 1/2"),
    (4, "degprop", {"instances": 500, "n_max": 3}, 120, "degree skewsymmetry, shift, additivity, diagonal"),
    (5, "insertdiag", {"instances": 300}, 60, "diagonal insertion (a) and (b)"),
    (6, "gradingcomp", {"instances": 300}, 120, "degree through triple equals composed degree"),
    (7, "contraction", {"instances": 100, "tol": 1e-8}, 10, "fiber contraction endpoints and invariance"),
    (8, "quilt-degree", {"instances": 300, "r_max": 4}, 120, "three degree formulas agree on lattice sequences"),
    (9, "compose-at", {"instances": 300, "r_max": 4}, None, "composition preserves generators and degrees"),
    (10, "kunneth", {"instances": 100}, None, "tensor splitting and torsion example"),
    (11, "toric", {"instances": 1000, "n_max": 6}, 180, "projective-space levels, constants, compositions, generators"),
]


def _check(number, suite, params, budget, what):
    start = time.perf_counter()
    rep = verify.run_suite(suite, SEED, **params)
    wall = time.perf_counter() - start
    in_time = budget is None or wall < budget
    ok = rep["pass"] and in_time and rep["instances"] > 0
    limit = f" < {budget}s" if budget is not None else ""
    line = (
        f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {suite}: {rep['passed']}/{rep['instances']} instances, "
        f"{rep['failure_count']} failures, {wall:.1f}s{limit}  ({what})"
    )
    return ok, line, rep, in_time


@pytest.mark.slow
@pytest.mark.parametrize("number,suite,params,budget,what", CRITERIA, ids=[f"c{c[0]}-{c[1]}" for c in CRITERIA])
def test_criterion(number, suite, params, budget, what, criterion_log):
    ok, line, rep, in_time = _check(number, suite, params, budget, what)
    criterion_log(line)
    print(line)
    assert rep["pass"], rep["failures"][:3]
    assert in_time, line
    assert ok


@pytest.mark.slow
def test_criterion_12_verify_all_reproducible(criterion_log):
    runs, walls = [], []
    for _ in range(2):
        start = time.perf_counter()
        runs.append(verify.verify_all(SEED))
        walls.append(time.perf_counter() - start)
    texts = [jsonio.dumps(verify.strip_timing(r)) for r in runs]
    identical = texts[0] == texts[1]
    reparsed = jsonio.dumps(verify.strip_timing(json.loads(jsonio.dumps(runs[0])))) == texts[0]
    fast = max(walls) < 600
    ok = identical and reparsed and fast and runs[0]["pass"]
    line = (
        f"criterion 12 {'PASS' if ok else 'FAIL'}  verify_all: {len(runs[0]['reports'])} suites, "
        f"{runs[0]['instances']} instances, runs {walls[0]:.0f}s/{walls[1]:.0f}s < 600s, "
        f"reports {'byte-identical' if identical else 'DIFFER'}"
    )
    criterion_log(line)
    print(line)
    assert runs[0]["pass"], runs[0]["failures"]
    assert identical and reparsed
    assert fast


if __name__ == "__main__":
    import sys

    results = [_check(*c) for c in CRITERIA]
    for _, line, _, _ in results:
        print(line, flush=True)
    sys.exit(0 if all(r[0] for r in results) else 1)
