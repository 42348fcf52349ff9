import numpy as np
import pytest

from quiltlab import complexes
from quiltlab.complexes import ComplexError, GradedChainComplex, homology, tensor, total_rank
from quiltlab.verify import torsion_example


def test_times_two_has_torsion():
    a, _ = torsion_example()
    h = homology(a)
    assert h[1].torsion == (2,)
    assert total_rank(h) == 0


def test_torsion_times_free_gives_two_copies():
    a, f = torsion_example()
    h = homology(tensor(a, f))
    assert sorted(t for x in h.values() for t in x.torsion) == [2, 2]
    assert total_rank(h) == 0


def test_free_ranks_multiply():
    f = GradedChainComplex(("x", "y", "z"), (0, 1, 1), np.zeros((3, 3), dtype=np.int64), 2)
    g = GradedChainComplex(("u", "v"), (0, 0), np.zeros((2, 2), dtype=np.int64), 2)
    h = homology(tensor(f, g))
    assert total_rank(h) == 6
    assert h[0].betti == 2 and h[1].betti == 4


def test_acyclic_pair():
    c = GradedChainComplex(("a", "b"), (0, 1), np.array([[0, 0], [1, 0]]), 2)
    assert total_rank(homology(c)) == 0


def test_differential_must_square_to_zero():
    d = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(ComplexError):
        complexes.validate(GradedChainComplex(("a", "b", "c"), (0, 1, 2), d, 4))


def test_oracle_with_wrong_degree_rejected():
    with pytest.raises(ComplexError):
        complexes.from_oracle(["a", "b"], [0, 0], 2, complexes.dict_oracle({("a", "b"): 1}))


def test_oracle_assembly():
    cx = complexes.from_oracle(["a", "b"], [0, 1], 2, complexes.dict_oracle({("a", "b"): 3}))
    assert cx.differential.tolist() == [[0, 0], [3, 0]]
    assert homology(cx)[1].torsion == (3,)
