import numpy as np
import pytest

from quiltlab.symplinalg import (
    LAGRANGIAN,
    ISOTROPIC,
    SYMPLECTIC,
    LagrangianFrame,
    Subspace,
    SymplecticError,
    SymplecticSpace,
    classify,
    det2_phase,
    dual,
    is_symplectic_matrix,
    lagrangian_containing,
    lagrangian_defect,
    product,
    random_lagrangian,
    random_symplectic,
    standard_form,
    standard_space,
    subspace_distance,
    symp_complement,
)


def test_standard_form_blocks():
    w = standard_form(2)
    assert np.array_equal(w[:2, 2:], np.eye(2))
    assert np.array_equal(w[2:, :2], -np.eye(2))
    assert np.array_equal(w, -w.T)


def test_dual_negates_form():
    sp = standard_space(2)
    assert np.allclose(dual(sp).form, -sp.form)
    assert np.allclose(dual(dual(sp)).form, sp.form)


def test_product_dimension_and_factor_forms():
    a, b = standard_space(1), standard_space(2)
    p = product(dual(a), b)
    assert p.n == 3
    x = random_lagrangian(1, np.random.default_rng(1), dual(a))
    y = random_lagrangian(2, np.random.default_rng(2), b)
    frame = np.zeros((6, 3))
    frame[:2, :1] = x.frame
    frame[2:, 1:] = y.frame
    assert lagrangian_defect(p, frame) < 1e-12


def test_nonsymplectic_form_rejected():
    with pytest.raises((SymplecticError, ValueError)):
        SymplecticSpace(np.eye(2))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_random_symplectic_preserves_form(n, rng):
    s = random_symplectic(n, rng)
    assert is_symplectic_matrix(s, standard_space(n))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_lagrangian_is_lagrangian(n, rng):
    lag = random_lagrangian(n, rng)
    assert classify(lag) == LAGRANGIAN
    assert abs(abs(det2_phase(lag.ambient, lag.frame)) - 1) < 1e-12


def test_classification_of_small_subspaces():
    sp = standard_space(2)
    line = Subspace(sp, np.array([[1.0], [0], [0], [0]]))
    plane = Subspace(sp, np.array([[1.0, 0], [0, 0], [0, 1], [0, 0]]))
    assert classify(line) == ISOTROPIC
    assert classify(plane) == SYMPLECTIC
    assert subspace_distance(symp_complement(symp_complement(plane)), plane) < 1e-10


def test_lagrangian_containing_contains_isotropic(rng):
    sp = standard_space(3)
    lam = random_lagrangian(3, rng)
    iso = lam.frame[:, :2]
    out = lagrangian_containing(sp, iso, rng)
    assert classify(out) == LAGRANGIAN
    resid = iso - out.frame @ (out.frame.T @ iso)
    assert np.abs(resid).max() < 1e-10


def test_subspace_distance_is_basis_independent(rng):
    lag = random_lagrangian(2, rng)
    g = rng.standard_normal((2, 2)) + 3 * np.eye(2)
    other = LagrangianFrame(lag.ambient, lag.frame @ g)
    assert subspace_distance(lag, other) < 1e-12
    perp = LagrangianFrame(lag.ambient, standard_space(2).form @ lag.frame)
    assert subspace_distance(lag, perp) == pytest.approx(1.0)
