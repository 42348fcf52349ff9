"""Smith normal form against sympy."""

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from quiltlab.smith import annihilator, invariant_factors, saturate, smith, solve_congruence


def _sympy_invariants(a: np.ndarray) -> tuple[int, ...]:
    if a.size == 0:
        return ()
    d = smith_normal_form(sympy.Matrix(a.tolist()), domain=sympy.ZZ)
    vals = [abs(int(d[i, i])) for i in range(min(d.shape))]
    return tuple(v for v in vals if v)


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_invariants_match_sympy(rows):
    a = np.array(rows, dtype=np.int64)
    assert invariant_factors(a) == _sympy_invariants(a)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_transforms_are_unimodular(rows):
    a = np.array(rows, dtype=np.int64)
    f = smith(a)
    assert np.array_equal(f.u @ a @ f.v, f.s)
    assert abs(sympy.Matrix(f.u.tolist()).det()) == 1
    assert abs(sympy.Matrix(f.v.tolist()).det()) == 1
    inv = f.invariants
    assert all(inv[i + 1] % inv[i] == 0 for i in range(len(inv) - 1))


def test_known_invariants():
    assert invariant_factors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == (2, 6, 12)
    assert invariant_factors([[0, 0], [0, 0]]) == ()


def test_saturation_and_annihilator():
    a = np.array([[2], [0]])
    assert invariant_factors(saturate(a)) == (1,)
    b = annihilator(np.array([[1], [1]]))
    assert np.array_equal(b @ np.array([1, 1]), [0])


def test_congruence_solutions_count():
    # 2 x = 0 mod 1 has the two solutions 0 and 1/2
    sols = solve_congruence(np.array([[2]]), np.array([0.0]))
    assert sorted(round(float(s[0]), 9) for s in sols) == [0.0, 0.5]


def test_congruence_with_free_direction_is_not_finite():
    assert solve_congruence(np.array([[1, -1], [2, -2]]), np.array([0.0, 0.0])) is None


@pytest.mark.parametrize("d", [1, 3, 5])
def test_congruence_diagonal(d):
    sols = solve_congruence(np.array([[d]]), np.array([0.25]))
    assert len(sols) == d
    for s in sols:
        assert abs((d * s[0] - 0.25) % 1.0) < 1e-9 or abs((d * s[0] - 0.25) % 1.0 - 1) < 1e-9
