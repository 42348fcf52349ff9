from fractions import Fraction

import numpy as np
import pytest

from quiltlab import maslov
from quiltlab.symplinalg import LagrangianFrame, random_lagrangian, standard_space

HORIZONTAL = LagrangianFrame(standard_space(1), np.array([[1.0], [0.0]]))


def test_generator_loop_has_index_one():
    assert maslov.rs_index(maslov.rotation(HORIZONTAL), HORIZONTAL) == Fraction(1)


def test_half_rotation_has_index_half():
    assert maslov.rs_index(maslov.rotation(HORIZONTAL, np.pi / 2), HORIZONTAL) == Fraction(1, 2)


def test_swapping_arguments_negates():
    assert maslov.rs_index(HORIZONTAL, maslov.rotation(HORIZONTAL)) == Fraction(-1)


def test_constant_pair_has_index_zero(rng):
    lag = random_lagrangian(2, rng)
    other = random_lagrangian(2, rng)
    assert maslov.rs_index(maslov.constant(lag), other) == 0


def test_reversed_path_negates(rng):
    path, _ = maslov.random_loop(2, rng)
    lag = random_lagrangian(2, rng)
    assert maslov.rs_index(maslov.reverse(path), lag) == -maslov.rs_index(path, lag)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_loops_match_winding(n, rng):
    for _ in range(5):
        path, expected = maslov.random_loop(n, rng)
        lag = random_lagrangian(n, rng)
        assert maslov.rs_index(path, lag) == expected
        assert round(maslov.winding_lift(path)) == expected


def test_concatenation_adds(rng):
    lag = random_lagrangian(1, rng)
    a = maslov.rotation(HORIZONTAL)
    both = maslov.concat(a, a)
    assert maslov.rs_index(both, lag) == 2 * maslov.rs_index(a, lag)


def test_product_path_adds(rng):
    a, _ = maslov.random_loop(1, rng)
    b, _ = maslov.random_loop(1, rng)
    la, lb = random_lagrangian(1, rng), random_lagrangian(1, rng)
    from quiltlab.symplinalg import product_frame

    joint = maslov.rs_index(maslov.product_path(a, b), product_frame(la, lb))
    assert joint == maslov.rs_index(a, la) + maslov.rs_index(b, lb)


def test_diagonalizer_separates_phases_merged_by_one_combination(rng):
    from scipy.optimize import brentq
    from scipy.stats import ortho_group

    def combo(phi):
        return np.cos(phi) + np.sqrt(2.0) * np.sin(phi) + np.e * np.sin(2 * phi) / 2

    # a second phase where the first-stage combination takes the same value
    p1 = 0.3
    p2 = brentq(lambda t: combo(t) - combo(p1), 1.2, 2.9)
    phases = np.array([p1, p2, -2.0, 2.5])
    q = ortho_group.rvs(4, random_state=1)
    s = q @ np.diag(np.exp(1j * phases)) @ q.T
    p = maslov._real_orthogonal_diagonalizer(s)
    d = p.T @ s @ p
    assert np.abs(d - np.diag(np.diag(d))).max() < 1e-10
    assert sorted(np.angle(np.diag(d))) == pytest.approx(sorted(phases))
