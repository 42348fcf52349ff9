"""Flat symplectic tori and their affine Lagrangian subtori.

A torus ``R^{2n} / Z^{2n}`` carries the standard form in native ``(x, y)``
coordinates.  A Lagrangian correspondence between two tori is an affine
subtorus ``offset + span(direction)`` of ``source^- x target`` whose integer
direction matrix is saturated and whose span is Lagrangian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .corrlin import LinearCorrespondence
from .smith import annihilator, invariant_factors
from .symplinalg import (
    LagrangianFrame,
    SymplecticError,
    SymplecticSpace,
    dual,
    lagrangian_defect,
    orthonormalize,
    product,
    standard_space,
)

MEMBERSHIP_TOL = 1e-9


class LatticeError(SymplecticError):
    """Raised for direction matrices that are not saturated Lagrangian lattices."""


@dataclass(frozen=True)
class TorusManifold:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise LatticeError("negative dimension")

    @property
    def space(self) -> SymplecticSpace:
        return standard_space(self.n)

    @property
    def dim(self) -> int:
        return 2 * self.n


POINT_TORUS = TorusManifold(0)


def torus_provider(n: int) -> TorusManifold:
    return TorusManifold(int(n))


def reduce_mod1(x: NDArray) -> NDArray[np.float64]:
    """Representative in ``[0, 1)`` with values within tolerance of 1 folded to 0."""
    y = np.mod(np.asarray(x, dtype=float), 1.0)
    y[np.abs(y - 1.0) < MEMBERSHIP_TOL] = 0.0
    return y


def torus_distance(a: NDArray, b: NDArray) -> float:
    """Sup-norm distance on ``R^m / Z^m``."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float) + 0.5, 1.0) - 0.5
    return float(np.abs(d).max()) if d.size else 0.0


def _integer_matrix(a: NDArray | Sequence[Sequence[int]], rows: int) -> NDArray[np.int64]:
    arr = np.asarray(a)
    if arr.size == 0:
        return np.zeros((rows, 0), dtype=np.int64)
    if not np.allclose(arr, np.round(arr)):
        raise LatticeError("direction matrix must be integral")
    return np.round(arr).astype(np.int64).reshape(rows, -1)


@dataclass(frozen=True)
class LatticeCorrespondence:
    """Affine subtorus ``offset + span(direction)`` of ``source^- x target``."""

    source: TorusManifold
    target: TorusManifold
    direction: NDArray[np.int64]
    offset: NDArray[np.float64] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        m = self.source.dim + self.target.dim
        a = _integer_matrix(self.direction, m)
        k = self.source.n + self.target.n
        if a.shape[1] != k:
            raise LatticeError(f"direction needs {k} columns, got {a.shape[1]}")
        if k and (len(invariant_factors(a)) != k or any(d != 1 for d in invariant_factors(a))):
            raise LatticeError("direction matrix is not primitive (rank deficient or not saturated)")
        amb = self.ambient
        if k and lagrangian_defect(amb, orthonormalize(a.astype(float))) > 1e-9:
            raise LatticeError("span of the direction matrix is not Lagrangian")
        off = np.zeros(m) if self.offset is None else np.asarray(self.offset, dtype=float).reshape(m)
        object.__setattr__(self, "direction", a)
        object.__setattr__(self, "offset", reduce_mod1(off))

    @property
    def ambient(self) -> SymplecticSpace:
        return product(dual(self.source.space), self.target.space)

    @property
    def tangent(self) -> LagrangianFrame:
        return LagrangianFrame(self.ambient, orthonormalize(self.direction.astype(float)), check=False)

    def linear(self) -> LinearCorrespondence:
        return LinearCorrespondence(self.source.space, self.target.space, self.tangent)

    def contains(self, point: NDArray, tol: float = 1e-7) -> bool:
        """Membership of ``(x_source, x_target)``."""
        return subtorus_contains(self.direction, self.offset, point, tol)

    def shifted(self, delta: NDArray) -> "LatticeCorrespondence":
        return LatticeCorrespondence(self.source, self.target, self.direction, self.offset + np.asarray(delta, dtype=float))

    def transpose(self) -> "LatticeCorrespondence":
        s = self.source.dim
        rows = np.r_[s : len(self.offset), 0:s]
        return LatticeCorrespondence(self.target, self.source, self.direction[rows], self.offset[rows])


def subtorus_contains(direction: NDArray, offset: NDArray, point: NDArray, tol: float = 1e-7) -> bool:
    """Membership in ``offset + span(direction)`` via the annihilator of a saturated direction lattice."""
    z = np.asarray(point, dtype=float) - np.asarray(offset, dtype=float)
    b = annihilator(direction) if np.size(direction) else np.eye(len(z), dtype=np.int64)
    if b.size == 0:
        return True
    return torus_distance(b @ z, np.zeros(b.shape[0])) < tol


def correspondence_from_lattice(
    source: TorusManifold, target: TorusManifold, direction: NDArray, offset: NDArray | None = None
) -> LatticeCorrespondence:
    return LatticeCorrespondence(source, target, np.asarray(direction), None if offset is None else np.asarray(offset, dtype=float))


def lagrangian_subtorus(manifold: TorusManifold, direction: NDArray, offset: NDArray | None = None) -> LatticeCorrespondence:
    """A Lagrangian subtorus viewed as a correspondence from the point."""
    return correspondence_from_lattice(POINT_TORUS, manifold, direction, offset)


def diagonal_correspondence(manifold: TorusManifold) -> LatticeCorrespondence:
    eye = np.eye(manifold.dim, dtype=np.int64)
    return LatticeCorrespondence(manifold, manifold, np.vstack([eye, eye]))


def to_standard_integer(source: TorusManifold, target: TorusManifold) -> NDArray[np.int64]:
    """Signed permutation carrying native coordinates of ``source^- x target`` to standard ones."""
    t = product(dual(source.space), target.space).to_std
    return np.round(t).astype(np.int64)


def _unimodular(k: int, rng: np.random.Generator, steps: int = 3) -> NDArray[np.int64]:
    u = np.eye(k, dtype=np.int64)
    for _ in range(steps):
        if k < 2:
            break
        i, j = rng.choice(k, size=2, replace=False)
        e = np.eye(k, dtype=np.int64)
        e[i, j] = int(rng.integers(-1, 2))
        u = u @ e
    if k:
        p = rng.permutation(k)
        u = u[:, p]
    return u


def random_integer_symplectic(d: int, rng: np.random.Generator, steps: int = 3, bound: int = 1) -> NDArray[np.int64]:
    """Product of random integer shears and unimodular block maps in ``Sp(2d, Z)``."""
    s = np.eye(2 * d, dtype=np.int64)
    for _ in range(steps):
        kind = int(rng.integers(0, 3))
        g = np.eye(2 * d, dtype=np.int64)
        if kind == 2:
            u = _unimodular(d, rng)
            uinv = np.round(np.linalg.inv(u)).astype(np.int64)
            g[:d, :d] = u
            g[d:, d:] = uinv.T
        else:
            sym = rng.integers(-bound, bound + 1, size=(d, d))
            sym = np.triu(sym) + np.triu(sym, 1).T
            if kind == 0:
                g[:d, d:] = sym
            else:
                g[d:, :d] = sym
        s = s @ g
    return s


def random_lattice_correspondence(
    source: TorusManifold, target: TorusManifold, rng: np.random.Generator, steps: int = 3, offset: bool = True
) -> LatticeCorrespondence:
    """Random correspondence ``T^{-1} S [I; 0]`` for integral symplectic ``S``."""
    d = source.n + target.n
    if d == 0:
        return LatticeCorrespondence(source, target, np.zeros((0, 0), dtype=np.int64))
    s = random_integer_symplectic(d, rng, steps)
    t = to_standard_integer(source, target)
    a = t.T @ s[:, :d]  # T is a signed permutation, so its inverse is its transpose
    off = rng.random(2 * d) if offset else None
    return LatticeCorrespondence(source, target, a, off)


def generator_system(
    correspondences: Sequence[LatticeCorrespondence], translations: Sequence[NDArray]
) -> tuple[NDArray[np.int64], NDArray[np.float64], list[int]]:
    """Integer system ``C (x, s) = b mod Z`` whose solutions are the generalized intersection points.

    Unknowns are the points ``x_j`` followed by the lattice coordinates ``s_j``
    of every correspondence.  Returns ``C``, ``b`` and the offsets of each
    ``x_j`` in the unknown vector.
    """
    r1 = len(correspondences)
    dims = [c.source.dim for c in correspondences]
    x_off = [0]
    for d in dims:
        x_off.append(x_off[-1] + d)
    s_off = [x_off[-1]]
    for c in correspondences:
        s_off.append(s_off[-1] + c.direction.shape[1])
    rows = sum(c.source.dim + c.target.dim for c in correspondences)
    cmat = np.zeros((rows, s_off[-1]), dtype=np.int64)
    b = np.zeros(rows)
    r = 0
    for j, c in enumerate(correspondences):
        da, db = c.source.dim, c.target.dim
        nxt = (j + 1) % r1
        cmat[r : r + da, x_off[j] : x_off[j] + da] += np.eye(da, dtype=np.int64)
        cmat[r + da : r + da + db, x_off[nxt] : x_off[nxt] + db] += np.eye(db, dtype=np.int64)
        cmat[r : r + da + db, s_off[j] : s_off[j + 1]] -= c.direction
        b[r : r + da] = c.offset[:da] - np.asarray(translations[j], dtype=float).reshape(da)
        b[r + da : r + da + db] = c.offset[da:]
        r += da + db
    return cmat, b, x_off
