"""Z_N-graded free chain complexes with integer differentials.

The differential is stored as ``D[target, source]`` and raises degree by one
modulo ``N``.  Counts are supplied by an oracle; they are validated rather
than trusted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Hashable, Mapping, Sequence

import numpy as np

from .smith import rank_mod2, smith

Oracle = Callable[[Hashable, Hashable], int]


class ComplexError(ValueError):
    """Raised when a differential violates degree or square-zero constraints."""

    def __init__(self, message: str, witness: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.witness = witness or {}


@dataclass(frozen=True)
class GradedChainComplex:
    generators: tuple[Hashable, ...]
    degrees: tuple[int, ...]
    differential: np.ndarray
    modulus: int
    closed: bool = True

    def __post_init__(self) -> None:
        k = len(self.generators)
        if len(self.degrees) != k:
            raise ComplexError("one degree per generator required")
        d = np.asarray(self.differential, dtype=np.int64).reshape(k, k)
        object.__setattr__(self, "differential", d)
        object.__setattr__(self, "degrees", tuple(int(x) % self.modulus for x in self.degrees))
        validate(self)

    @property
    def size(self) -> int:
        return len(self.generators)

    def in_degree(self, deg: int) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == deg % self.modulus]


def validate(cx: GradedChainComplex) -> None:
    """Check degree one and ``D @ D == 0`` over the integers and mod 2."""
    d = cx.differential
    for tgt, src in zip(*np.nonzero(d)):
        if (cx.degrees[src] + 1 - cx.degrees[tgt]) % cx.modulus:
            raise ComplexError(
                "differential does not raise degree by one",
                {"source": repr(cx.generators[src]), "target": repr(cx.generators[tgt]), "count": int(d[tgt, src])},
            )
    if not cx.closed:
        return
    sq = d @ d
    bad = np.argwhere(sq != 0)
    if bad.size:
        tgt, src = bad[0]
        raise ComplexError(
            "differential does not square to zero",
            {"source": repr(cx.generators[src]), "target": repr(cx.generators[tgt]), "value": int(sq[tgt, src])},
        )
    # over the integers this is implied; kept separate since mod 2 is the only claim for oracle counts
    if np.any(sq % 2):
        raise ComplexError("differential does not square to zero mod 2")


def zero_oracle(_a: Hashable, _b: Hashable) -> int:
    return 0


def matrix_oracle(generators: Sequence[Hashable], matrix: np.ndarray) -> Oracle:
    idx = {g: i for i, g in enumerate(generators)}
    m = np.asarray(matrix, dtype=np.int64)

    def oracle(src: Hashable, tgt: Hashable) -> int:
        return int(m[idx[tgt], idx[src]])

    return oracle


def dict_oracle(counts: Mapping[tuple[Hashable, Hashable], int]) -> Oracle:
    """Oracle from ``{(source, target): count}``; absent pairs count zero."""
    table = dict(counts)
    return lambda src, tgt: int(table.get((src, tgt), 0))


def load_oracle(path: str | Path, generators: Sequence[Hashable]) -> Oracle:
    """Oracle from JSON: ``{"matrix": [[...]]}`` indexed ``[target][source]`` or ``{"counts": [[i, j, c], ...]}`` by generator index."""
    doc = json.loads(Path(path).read_text())
    if "matrix" in doc:
        return matrix_oracle(generators, np.array(doc["matrix"], dtype=np.int64))
    table = {(generators[int(i)], generators[int(j)]): int(c) for i, j, c in doc.get("counts", [])}
    return dict_oracle(table)


def from_oracle(
    generators: Sequence[Hashable], degrees: Sequence[int], modulus: int, oracle: Oracle | str = "zero"
) -> GradedChainComplex:
    """Assemble a complex by querying the oracle on every degree-adjacent pair."""
    if oracle == "zero":
        oracle = zero_oracle
    k = len(generators)
    d = np.zeros((k, k), dtype=np.int64)
    degs = [int(x) % modulus for x in degrees]
    for j in range(k):
        for i in range(k):
            if (degs[j] + 1 - degs[i]) % modulus == 0:
                d[i, j] = int(oracle(generators[j], generators[i]))
            else:
                c = int(oracle(generators[j], generators[i]))
                if c:
                    raise ComplexError(
                        "oracle reports a count between generators whose degrees differ by other than one",
                        {"source": repr(generators[j]), "target": repr(generators[i]), "count": c},
                    )
    return GradedChainComplex(tuple(generators), tuple(degs), d, modulus)


@dataclass(frozen=True)
class DegreeHomology:
    betti: int
    torsion: tuple[int, ...]

    def as_dict(self) -> dict[str, Any]:
        return {"betti": self.betti, "torsion": list(self.torsion)}


def _block(cx: GradedChainComplex, deg: int) -> np.ndarray:
    """Matrix of the differential from degree ``deg`` to ``deg + 1``."""
    rows = cx.in_degree(deg + 1)
    cols = cx.in_degree(deg)
    return cx.differential[np.ix_(rows, cols)]


def homology(cx: GradedChainComplex) -> dict[int, DegreeHomology]:
    """Integer cohomology per degree in ``Z_N`` from Smith forms of the degree blocks."""
    out: dict[int, DegreeHomology] = {}
    ranks: dict[int, tuple[int, tuple[int, ...]]] = {}
    for deg in range(cx.modulus):
        b = _block(cx, deg)
        inv = smith(b).invariants if b.size else ()
        ranks[deg] = (len(inv), inv)
    for deg in range(cx.modulus):
        dim = len(cx.in_degree(deg))
        out_rank = ranks[deg][0]
        in_rank, in_inv = ranks[(deg - 1) % cx.modulus]
        out[deg] = DegreeHomology(betti=dim - out_rank - in_rank, torsion=tuple(x for x in in_inv if x > 1))
    return out


def homology_mod2(cx: GradedChainComplex) -> dict[int, int]:
    out = {}
    for deg in range(cx.modulus):
        dim = len(cx.in_degree(deg))
        out[deg] = dim - rank_mod2(_block(cx, deg)) - rank_mod2(_block(cx, deg - 1))
    return out


def total_rank(h: Mapping[int, DegreeHomology]) -> int:
    return sum(x.betti for x in h.values())


def tensor(a: GradedChainComplex, b: GradedChainComplex) -> GradedChainComplex:
    """Tensor product with ``D(x ⊗ y) = Dx ⊗ y + (-1)^{|x|} x ⊗ Dy``."""
    if a.modulus != b.modulus:
        raise ComplexError("modulus mismatch")
    gens = tuple((x, y) for x in a.generators for y in b.generators)
    degs = tuple((dx + dy) % a.modulus for dx in a.degrees for dy in b.degrees)
    sign = np.diag([(-1) ** (d % 2) for d in a.degrees]).astype(np.int64)
    d = np.kron(a.differential, np.eye(b.size, dtype=np.int64)) + np.kron(sign, b.differential)
    return GradedChainComplex(gens, degs, d, a.modulus)


def permuted(cx: GradedChainComplex, order: Sequence[int]) -> GradedChainComplex:
    order = list(order)
    d = cx.differential[np.ix_(order, order)]
    return GradedChainComplex(tuple(cx.generators[i] for i in order), tuple(cx.degrees[i] for i in order), d, cx.modulus)


def sign_conjugated(cx: GradedChainComplex, signs: Sequence[int]) -> GradedChainComplex:
    s = np.diag(np.asarray(signs, dtype=np.int64))
    return GradedChainComplex(cx.generators, cx.degrees, s @ cx.differential @ s, cx.modulus)


def to_json(cx: GradedChainComplex) -> dict[str, Any]:
    return {
        "generators": [repr(g) for g in cx.generators],
        "degrees": list(cx.degrees),
        "differential": cx.differential.tolist(),
        "N": cx.modulus,
    }
