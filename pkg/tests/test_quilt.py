import numpy as np
import pytest

from quiltlab import complexes, jsonio, quilt
from quiltlab.torus import (
    LatticeCorrespondence,
    LatticeError,
    TorusManifold,
    diagonal_correspondence,
    random_lattice_correspondence,
    torus_distance,
)

SLOPE_THREE = {
    "provider": "torus",
    "N": 4,
    "manifolds": [{"n": 0}, {"n": 1}],
    "correspondences": [
        {"direction": [[1], [0]], "offset": [0.1, 0.2], "k": 0},
        {"direction": [[1], [3]], "offset": [0.0, 0.0], "k": 0},
    ],
}


@pytest.fixture
def slope_three():
    return jsonio.load_sequence(SLOPE_THREE)


def test_frozen_generators(slope_three):
    gens = quilt.intersection_points(slope_three)
    xs = sorted(g.points[1][0] for g in gens)
    assert xs == pytest.approx([1 / 15, 6 / 15, 11 / 15])
    assert all(g.points[1][1] == pytest.approx(0.2) for g in gens)
    assert [g.degree for g in gens] == [0, 0, 0]


def test_three_degree_routes_agree(slope_three, rng):
    assert quilt.all_degrees(slope_three, rng) == (0, 0, 0)


def test_fold_contains_every_generator(slope_three):
    folded = quilt.fold(slope_three)
    for g in quilt.intersection_points(slope_three):
        assert folded.contains(g.points)


@pytest.mark.parametrize("position", [0, 1, 2])
def test_diagonal_insertion_is_bijective(slope_three, position):
    before = quilt.intersection_points(slope_three)
    ins = quilt.insert_diagonal(slope_three, position)
    ok, msg = quilt.check_bijection(before, quilt.intersection_points(ins), quilt.insert_diagonal_map(slope_three, position))
    assert ok, msg


def test_compose_at_preserves_generators(rng):
    checked = 0
    for _ in range(40):
        seq = quilt.random_sequence(rng, r_max=4, n_max=2, modulus=2)
        gens = quilt.intersection_points(seq)
        for j in range(1, seq.length):
            try:
                res = quilt.compose_at(seq, j)
            except quilt.NotEmbedded:
                continue
            after = quilt.intersection_points(res.sequence)
            ok, msg = quilt.check_bijection(gens, after, res.mapping)
            assert ok, msg
            assert sorted(g.degree for g in gens) == sorted(g.degree for g in after)
            checked += 1
    assert checked > 10


def test_kunneth_split_counts_and_degrees(rng):
    seq, j = quilt.random_split_sequence(rng, modulus=4)
    ks = quilt.kunneth_split(seq, j)
    gens = quilt.intersection_points(seq)
    gl, gr = quilt.intersection_points(ks.left), quilt.intersection_points(ks.right)
    assert len(gens) == len(gl) * len(gr)
    for g, (p, q) in zip(gens, ks.pairs(gens, gl, gr)):
        assert g.degree == (gl[p].degree + gr[q].degree) % 4


def test_non_primitive_direction_rejected():
    with pytest.raises(LatticeError):
        LatticeCorrespondence(TorusManifold(0), TorusManifold(1), np.array([[2], [0]]))


def test_non_lagrangian_direction_rejected():
    with pytest.raises(LatticeError):
        LatticeCorrespondence(TorusManifold(1), TorusManifold(0), np.array([[1, 0], [0, 1]]))


def test_random_lattice_correspondence_contains_its_offset(rng):
    c = random_lattice_correspondence(TorusManifold(1), TorusManifold(2), rng)
    assert c.contains(c.offset)
    assert c.contains(c.offset + c.direction[:, 0] * 0.37)


def test_diagonal_membership():
    d = diagonal_correspondence(TorusManifold(1))
    assert d.contains(np.array([0.3, 0.4, 1.3, -0.6]))
    assert not d.contains(np.array([0.3, 0.4, 0.35, 0.4]))
    assert torus_distance(np.array([0.99]), np.array([0.01])) == pytest.approx(0.02)


def _parallel(offset):
    doc = dict(SLOPE_THREE)
    doc["correspondences"] = [SLOPE_THREE["correspondences"][0], {"direction": [[1], [0]], "offset": offset, "k": 0}]
    return jsonio.load_sequence(doc)


def test_disjoint_parallel_lines_have_no_generators():
    assert quilt.intersection_points(_parallel([0.0, 0.0])) == []


def test_overlapping_lines_reported_as_not_transverse():
    with pytest.raises(quilt.NotTransverse):
        quilt.intersection_points(_parallel([0.0, 0.2]))


def test_zero_oracle_homology(slope_three):
    cx = quilt.build_complex(slope_three)
    h = complexes.homology(cx)
    assert complexes.total_rank(h) == 3
    assert h[0].betti == 3
