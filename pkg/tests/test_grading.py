import numpy as np
import pytest

from quiltlab import corrlin, grading, maslov
from quiltlab.grading import GradingError, canonical_diagonal, degree, dual_graded, grade, product_graded, shift
from quiltlab.symplinalg import LagrangianFrame, dual, product, random_lagrangian, standard_space

SP1 = standard_space(1)
HORIZONTAL = LagrangianFrame(SP1, np.array([[1.0], [0.0]]))
VERTICAL = LagrangianFrame(SP1, np.array([[0.0], [1.0]]))


def test_frozen_line_degrees():
    a, b = grade(HORIZONTAL, 0, 4), grade(VERTICAL, 0, 4)
    assert degree(a, b) == 0
    assert degree(b, a) == 1


def test_rotation_transports_by_one():
    a = grade(HORIZONTAL, 0, 4)
    moved = grading.transport(a, maslov.rotation(HORIZONTAL))
    assert moved.theta == pytest.approx(a.theta + 1)


@pytest.mark.parametrize("n_mod", [2, 4, 6, 8])
def test_skew_shift_and_additivity(n_mod, rng):
    for n in (1, 2, 3):
        sp = standard_space(n)
        a, b = grading.random_graded(sp, n_mod, rng), grading.random_graded(sp, n_mod, rng)
        d = degree(a, b)
        assert (d + degree(b, a)) % n_mod == n % n_mod
        assert degree(a, shift(b, 3)) == (d + 3) % n_mod
        c, e = grading.random_graded(SP1, n_mod, rng), grading.random_graded(SP1, n_mod, rng)
        assert degree(product_graded(a, c), product_graded(b, e)) == (d + degree(c, e)) % n_mod


@pytest.mark.parametrize("n", [1, 2])
def test_diagonal_pairing(n, rng):
    sp = standard_space(n)
    a, b = grading.random_graded(sp, 4, rng), grading.random_graded(sp, 4, rng)
    diag = canonical_diagonal(sp, 4)
    assert degree(diag, product_graded(dual_graded(a), b)) == degree(a, b)


def test_closed_form_matches_crossings(rng):
    for _ in range(10):
        sp = standard_space(int(rng.integers(1, 4)))
        a, b = grading.random_graded(sp, 6, rng), grading.random_graded(sp, 6, rng)
        assert grading.degree_via_crossings(a, b, rng, stops=2) == degree(a, b)


def test_odd_modulus_rejected():
    with pytest.raises(GradingError):
        grade(HORIZONTAL, 0, 3)


def test_non_transverse_pair_rejected():
    a = grade(HORIZONTAL, 0, 2)
    with pytest.raises(grading.NotTransverse):
        degree(a, a)


def test_gradingcomp_identity(rng):
    v0, v1, v2 = standard_space(1), standard_space(2), standard_space(1)
    while True:
        c01 = grading.random_graded_correspondence(v0, v1, 4, rng)
        c12 = grading.random_graded_correspondence(v1, v2, 4, rng)
        if corrlin.is_embedded_linear(c01.corr, c12.corr):
            break
    l0 = grading.random_graded(v0, 4, rng)
    l2 = grading.random_graded(dual(v2), 4, rng)
    lhs, rhs = grading.gradingcomp(l0, c01, c12, l2)
    assert lhs == rhs


def test_insertdiag_both_clauses(rng):
    v0, v1, v2 = standard_space(1), standard_space(1), standard_space(1)
    c01 = grading.random_graded_correspondence(v0, v1, 4, rng)
    c12 = grading.random_graded_correspondence(v1, v2, 4, rng)
    l0 = grading.random_graded(v0, 4, rng)
    l2 = grading.random_graded(dual(v2), 4, rng)
    lhs, rhs = grading.insertdiag_a(l0, c01.graded, c12.graded, l2, v1)
    assert lhs == rhs
    w = standard_space(1)
    lam = grading.random_graded(product(dual(v0), w, v0), 4, rng)
    k = grading.random_graded(product(v0, dual(v0), w), 4, rng)
    lhs, rhs = grading.insertdiag_b(lam, k, v0)
    assert lhs == rhs


def test_graph_grading_of_identity_is_diagonal():
    g = grading.GradedSymplectic.identity(SP1, 4)
    gl = grading.graph_grading(g)
    diag = canonical_diagonal(SP1, 4)
    assert round(gl.theta - diag.theta) % 4 == 0


def test_random_lagrangian_frame_graded_close_to_principal(rng):
    lag = random_lagrangian(2, rng)
    g = grade(lag, 0, 2)
    assert abs(g.theta - grading.principal_theta(lag.ambient, lag.frame)) < 1e-9
