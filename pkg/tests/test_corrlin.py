import pytest

from quiltlab import corrlin
from quiltlab.symplinalg import (
    LagrangianFrame,
    POINT,
    dual,
    product,
    random_lagrangian,
    random_symplectic,
    standard_space,
    subspace_distance,
)


def _random_corr(n0, n1, rng):
    v0, v1 = standard_space(n0), standard_space(n1)
    amb = product(dual(v0), v1)
    return corrlin.LinearCorrespondence(v0, v1, random_lagrangian(amb.n, rng, amb))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_graph_composition_is_matrix_product(n, rng):
    sp = standard_space(n)
    a, b = random_symplectic(n, rng), random_symplectic(n, rng)
    rep = corrlin.compose(corrlin.graph(a, sp), corrlin.graph(b, sp))
    assert rep.transverse and rep.defect == 0
    assert subspace_distance(rep.composed.lag, corrlin.graph(b @ a, sp).lag) < 1e-10


def test_diagonal_is_two_sided_identity(rng):
    c = _random_corr(2, 1, rng)
    left = corrlin.compose(corrlin.diagonal(standard_space(2)), c).composed
    right = corrlin.compose(c, corrlin.diagonal(standard_space(1))).composed
    assert subspace_distance(left.lag, c.lag) < 1e-10
    assert subspace_distance(right.lag, c.lag) < 1e-10


def test_point_lagrangian_point_is_degenerate(rng):
    # composing a Lagrangian with its own transpose has kernel equal to the Lagrangian
    lam = random_lagrangian(2, rng)
    a = corrlin.lagrangian_as_correspondence(lam)
    b = corrlin.lagrangian_as_correspondence(lam, from_point=False)
    rep = corrlin.compose(a, b)
    assert not rep.transverse
    assert rep.defect == 2
    assert subspace_distance(rep.kernel.basis, lam.frame) < 1e-10
    assert not corrlin.is_embedded_linear(a, b)


def test_transverse_lagrangians_give_point(rng):
    lam = random_lagrangian(2, rng)
    mu = random_lagrangian(2, rng)
    rep = corrlin.compose(
        corrlin.lagrangian_as_correspondence(lam), corrlin.lagrangian_as_correspondence(mu, from_point=False)
    )
    assert rep.transverse
    assert rep.composed.source.n == 0 and rep.composed.target.n == 0


def test_transpose_is_involution(rng):
    c = _random_corr(1, 2, rng)
    tt = corrlin.transpose(corrlin.transpose(c))
    assert subspace_distance(tt.lag, c.lag) < 1e-12


def test_associativity(rng):
    x, y, z = _random_corr(1, 2, rng), _random_corr(2, 1, rng), _random_corr(1, 2, rng)
    left = corrlin.compose(corrlin.compose(x, y).composed, z).composed
    right = corrlin.compose(x, corrlin.compose(y, z).composed).composed
    assert subspace_distance(left.lag, right.lag) < 1e-9


def test_mismatched_middle_rejected(rng):
    with pytest.raises(corrlin.CompositionError):
        corrlin.compose(_random_corr(1, 2, rng), _random_corr(1, 1, rng))


def test_contraction_endpoints_and_invariance(rng):
    while True:
        c01, c12 = _random_corr(1, 1, rng), _random_corr(1, 1, rng)
        if corrlin.is_embedded_linear(c01, c12):
            break
    lag = corrlin.fiber_lagrangian(c01, c12)
    split = (1, 1, 1)
    assert subspace_distance(corrlin.contract_fiber(lag, 0.0, split), lag) < 1e-10
    base = corrlin.compose(c01, c12).composed.frame
    for t in (0.0, 0.3, 0.7, 1.0):
        moved = corrlin.contract_fiber(lag, t, split)
        assert isinstance(moved, LagrangianFrame)
        assert subspace_distance(corrlin.compose_fiber(moved, split), base) < 1e-9


def test_point_space_has_no_dimensions():
    assert POINT.n == 0 and POINT.dim == 0


def test_fiber_dimension_counts_defect(rng):
    lam = random_lagrangian(2, rng)
    rep = corrlin.compose(corrlin.lagrangian_as_correspondence(lam), corrlin.lagrangian_as_correspondence(lam, from_point=False))
    assert rep.fiber.k == rep.defect == 2
    c01, c12 = _random_corr(1, 2, rng), _random_corr(2, 1, rng)
    rep = corrlin.compose(c01, c12)
    assert rep.fiber.k == 1 + 1 + rep.defect
