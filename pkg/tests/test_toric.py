from fractions import Fraction
from math import comb

import numpy as np
import pytest
import sympy

from quiltlab import complexes, toric


def _barycenter_level(n: int) -> Fraction:
    """Common value of all moments, including the dependent one, at the simplex barycenter."""
    mu = sympy.symbols(f"mu0:{n}")
    eqs = [sympy.Eq(m, 1 - sum(mu)) for m in mu]
    sol = sympy.solve(eqs, mu, dict=True)[0]
    return Fraction(str(sol[mu[0]]))


def _reduced_edge(k: int, n: int) -> Fraction:
    """Edge length of the reduced simplex once the moments ``k..n`` are fixed at the Clifford level."""
    c = sympy.Rational(1, n + 1)
    mu = sympy.symbols(f"mu1:{n + 1}")
    fixed = {mu[j - 1]: c for j in range(k, n + 1)}
    # vertex on the first free axis: every other free moment zero, dependent moment zero
    others = {mu[j]: 0 for j in range(1, k - 1)}
    free = mu[0]
    expr = (1 - sum(mu)).subs({**fixed, **others})
    return Fraction(str(sympy.solve(sympy.Eq(expr, 0), free)[0]))


@pytest.mark.parametrize("n", range(1, 7))
def test_clifford_level_matches_symbolic_barycenter(n):
    rel = toric.clifford(n)
    assert set(rel.moment_values) == {_barycenter_level(n)} == {Fraction(1, n + 1)}


@pytest.mark.parametrize("n", range(2, 7))
def test_reduced_scales_match_symbolic_polytope(n):
    for k in range(2, n + 1):
        red = toric.reduced_space_scale(k, n)
        assert red["scale"] == _reduced_edge(k, n)
        assert red["tau_reduced"] == red["tau_ambient"] == Fraction(1, n + 1)


def test_tau_values():
    assert [toric.tau(n) for n in (1, 2, 3)] == [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)]


def test_moment_of_clifford_points(rng):
    for n in (2, 4):
        z = toric.clifford_point(n, rng.random(n))
        for j in range(n + 1):
            assert toric.moment(z, j) == pytest.approx(np.pi / (n + 1), abs=1e-12)


@pytest.mark.parametrize("k,n", [(2, 2), (2, 3), (3, 3), (2, 4)])
def test_sigma_samples_lie_on_relation(k, n, rng):
    s = toric.sigma(k, n)
    rel = s.relation()
    for _ in range(20):
        u, z = s.sample(rng)
        assert s.contains(u, z) and rel.contains(u, z)


def test_sigma_lagrangian_only_with_reduced_scale(rng):
    s = toric.sigma(2, 3)
    good, smin = s.lagrangian_defect(rng, 30)
    bad, _ = s.lagrangian_defect(rng, 5, source_scale=Fraction(1))
    assert good < 1e-8 and smin > 1e-6
    assert bad > 1e-3


@pytest.mark.parametrize("n", [2, 3])
def test_clifford_composition_identified(n, rng):
    tn = toric.clifford(n)
    for k in range(2, n + 1):
        c = toric.compose_toric(toric.clifford(k - 1, n), toric.sigma(k, n).relation(), rng, 100, known=[tn])
        assert c.embedded and c.identified_as == tn.name


def test_split_composition_identified(rng):
    n = 3
    split = toric.product_relation(toric.clifford(1, n), toric.clifford(n - 1, n))
    c = toric.compose_toric(toric.sigma(2, n).relation(), toric.sigma_single(1, n).relation().transpose(), rng, 100, known=[split])
    assert c.embedded and c.identified_as == split.name


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_clifford_generators_binomial(n):
    gens = toric.perturbed_generators(n)
    assert len(gens) == 2**n
    assert toric.index_distribution(gens) == [comb(n, i) for i in range(n + 1)]
    assert all((g.degree - g.index) % 2 == 0 for g in gens)
    assert complexes.total_rank(complexes.homology(toric.zero_complex(gens))) == 2**n


def test_calc_chain_small():
    rep = toric.calc_chain(2)
    assert rep["ok"]
    assert [s["generators"] for s in rep["steps"]] == [4] * len(rep["steps"])


def test_sigma_requires_valid_range():
    with pytest.raises(toric.ToricError):
        toric.sigma(1, 3)


def test_inconsistent_relation_rejected():
    with pytest.raises(toric.ToricError):
        toric.ToricRelation(
            toric.POINT_SPACE,
            toric.ToricSpace(1, Fraction(1)),
            ((Fraction(1),), (Fraction(2),)),
            (Fraction(1, 2), Fraction(1, 3)),
            (),
        )
