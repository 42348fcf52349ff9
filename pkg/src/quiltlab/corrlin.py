"""Linear Lagrangian correspondences and their geometric composition."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from .symplinalg import (
    LagrangianFrame,
    SymplecticError,
    SymplecticSpace,
    Subspace,
    block_diag_frames,
    dual,
    intersect_spans,
    is_symplectic_matrix,
    null_space,
    numerical_rank,
    orthonormalize,
    product,
    same_space,
)

TRANSVERSE_TOL = 1e-7


class CompositionError(ValueError):
    """Raised when correspondences cannot be composed as requested."""


@dataclass(frozen=True)
class LinearCorrespondence:
    """A Lagrangian subspace of ``dual(source) x target``."""

    source: SymplecticSpace
    target: SymplecticSpace
    lag: LagrangianFrame

    def __post_init__(self) -> None:
        if self.lag.ambient.dim != self.source.dim + self.target.dim:
            raise SymplecticError("frame does not live in dual(source) x target")

    @classmethod
    def from_frame(cls, source: SymplecticSpace, target: SymplecticSpace, frame: NDArray) -> "LinearCorrespondence":
        return cls(source, target, LagrangianFrame(product(dual(source), target), frame))

    @property
    def frame(self) -> NDArray[np.float64]:
        return self.lag.frame

    @property
    def ambient(self) -> SymplecticSpace:
        return self.lag.ambient

    def split_rows(self) -> tuple[NDArray, NDArray]:
        d0 = self.source.dim
        return self.frame[:d0], self.frame[d0:]


def graph(s: NDArray, sp: SymplecticSpace) -> LinearCorrespondence:
    """Correspondence ``{(v, S v)}`` of a linear symplectomorphism."""
    s = np.asarray(s, dtype=float)
    if not is_symplectic_matrix(s, sp):
        raise SymplecticError("matrix is not symplectic")
    return LinearCorrespondence.from_frame(sp, sp, np.vstack([np.eye(sp.dim), s]))


def diagonal(sp: SymplecticSpace) -> LinearCorrespondence:
    return graph(np.eye(sp.dim), sp)


def transpose(c: LinearCorrespondence) -> LinearCorrespondence:
    top, bottom = c.split_rows()
    amb = product(dual(c.target), c.source)
    return LinearCorrespondence(c.target, c.source, LagrangianFrame(amb, np.vstack([bottom, top]), check=False))


def lagrangian_as_correspondence(lag: LagrangianFrame, from_point: bool = True) -> LinearCorrespondence:
    """View a Lagrangian of ``V`` as ``pt -> V`` (or ``V -> pt`` with ``from_point=False``)."""
    from .symplinalg import POINT

    if from_point:
        return LinearCorrespondence(POINT, lag.ambient, LagrangianFrame(product(dual(POINT), lag.ambient), lag.frame, check=False))
    sp = lag.ambient
    return LinearCorrespondence(sp, POINT, LagrangianFrame(product(dual(sp), POINT), lag.frame, check=False))


@dataclass(frozen=True)
class CompositionReport:
    """Fiber product data of two correspondences over their middle space.

    ``fiber`` lives in ``V0 x V1 x V1 x V2``.  ``kernel`` is the subspace of
    ``V1`` whose dimension measures failure of transversality; ``defect`` is
    that dimension computed independently from the projections to ``V1``.
    """

    transverse: bool
    kernel: Subspace
    defect: int
    composed: LinearCorrespondence
    min_singular: float
    fiber_columns: NDArray[np.float64] = field(repr=False)
    fiber_factors: tuple[SymplecticSpace, ...] = field(repr=False)

    @cached_property
    def fiber(self) -> Subspace:
        return Subspace(product(*self.fiber_factors), orthonormalize(self.fiber_columns))


def _check_composable(c01: LinearCorrespondence, c12: LinearCorrespondence) -> None:
    if not same_space(c01.target, c12.source):
        raise CompositionError("target of the first correspondence differs from source of the second")


def kernel_first(c01: LinearCorrespondence, c12: LinearCorrespondence) -> NDArray[np.float64]:
    """Vectors ``v`` of the middle space with ``(0, v)`` in the first and ``(v, 0)`` in the second."""
    a0, a1 = c01.split_rows()
    b1, b2 = c12.split_rows()
    # columns of a frame are independent, so these products have full column rank
    p = orthonormalize(a1 @ null_space(a0))
    q = orthonormalize(b1 @ null_space(b2))
    return intersect_spans(p, q)


def defect_second(c01: LinearCorrespondence, c12: LinearCorrespondence) -> int:
    """Dimension of the symplectic complement of the sum of the two projections to the middle space."""
    _, a1 = c01.split_rows()
    b1, _ = c12.split_rows()
    return a1.shape[0] - numerical_rank(np.hstack([a1, b1]), tol=1e-9)


def compose(c01: LinearCorrespondence, c12: LinearCorrespondence) -> CompositionReport:
    _check_composable(c01, c12)
    a0, a1 = c01.split_rows()
    b1, b2 = c12.split_rows()
    dim1 = a1.shape[0]
    k01 = a1.shape[1]
    c = np.hstack([a1, -b1])
    if dim1:
        sv = np.linalg.svd(c, compute_uv=False)
        smin = float(sv[dim1 - 1]) if sv.size >= dim1 else 0.0
    else:
        smin = np.inf
    transverse = smin > TRANSVERSE_TOL
    coeffs = null_space(c, tol=1e-9)
    fiber = np.vstack([a0 @ coeffs[:k01], a1 @ coeffs[:k01], b1 @ coeffs[k01:], b2 @ coeffs[k01:]])
    image = np.vstack([a0 @ coeffs[:k01], b2 @ coeffs[k01:]])
    target_dim = c01.source.n + c12.target.n
    if image.shape[0]:
        u, s, _ = np.linalg.svd(image, full_matrices=True)
        composed_frame = u[:, :target_dim]
    else:
        composed_frame = np.zeros((0, 0))
    amb = product(dual(c01.source), c12.target)
    composed = LinearCorrespondence(c01.source, c12.target, LagrangianFrame(amb, composed_frame))
    kernel = kernel_first(c01, c12)
    mid = c01.target
    return CompositionReport(
        transverse=bool(transverse),
        kernel=Subspace(mid, kernel),
        defect=defect_second(c01, c12),
        composed=composed,
        min_singular=smin,
        fiber_columns=fiber,
        fiber_factors=(c01.source, mid, mid, c12.target),
    )


def is_embedded_linear(c01: LinearCorrespondence, c12: LinearCorrespondence) -> bool:
    """At the linear level embeddedness reduces to transversality of the fiber product."""
    return compose(c01, c12).transverse


def fiber_space(v0: SymplecticSpace, v1: SymplecticSpace, v2: SymplecticSpace) -> SymplecticSpace:
    """``dual(V0) x V1 x dual(V1) x V2``."""
    return product(dual(v0), v1, dual(v1), v2)


def fiber_lagrangian(c01: LinearCorrespondence, c12: LinearCorrespondence) -> LagrangianFrame:
    """Product Lagrangian ``L01 x L12`` in :func:`fiber_space`."""
    _check_composable(c01, c12)
    amb = fiber_space(c01.source, c01.target, c12.target)
    return LagrangianFrame(amb, block_diag_frames(c01.frame, c12.frame), check=False)


def _split_dims(lag: LagrangianFrame, split: tuple[int, int, int] | None) -> tuple[int, int, int]:
    if split is not None:
        return split
    facs = lag.ambient.factors
    if len(facs) != 4:
        raise CompositionError("pass split=(n0, n1, n2) for spaces that are not four-fold products")
    return facs[0].n, facs[1].n, facs[3].n


def diagonal_part(lag: LagrangianFrame, split: tuple[int, int, int] | None = None) -> tuple[NDArray, NDArray]:
    """Orthonormal coefficients of ``lag ∩ (V0 x Δ x V2)`` and of its complement inside ``lag``."""
    n0, n1, n2 = _split_dims(lag, split)
    f = lag.frame
    b = f[2 * n0 : 2 * n0 + 2 * n1]
    c = f[2 * n0 + 2 * n1 : 2 * n0 + 4 * n1]
    inside = null_space(b - c, tol=1e-9)
    if inside.shape[1] != n0 + n2:
        raise CompositionError(
            f"fiber is not transverse to the diagonal: intersection has dimension {inside.shape[1]}, expected {n0 + n2}"
        )
    outside = null_space(inside.T) if inside.shape[1] else np.eye(f.shape[1])
    return inside, outside


def contract_fiber(lag: LagrangianFrame, t: float, split: tuple[int, int, int] | None = None) -> LagrangianFrame:
    """Contraction of a fiber Lagrangian onto its split form, keeping its composition fixed.

    ``t = 0`` returns ``lag``; ``t = 1`` returns ``L02 x A`` arranged in
    ``V0 x V1 x V1 x V2`` where ``A`` is the antidiagonal ``{(v, -v)}``.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    n0, n1, n2 = _split_dims(lag, split)
    inside, outside = diagonal_part(lag, (n0, n1, n2))
    return LagrangianFrame(lag.ambient, _contraction_columns(lag.frame, inside, outside, n0, n1, 1.0 - t))


def _contraction_columns(f: NDArray, inside: NDArray, outside: NDArray, n0: int, n1: int, s: float) -> NDArray:
    d0, d1 = 2 * n0, 2 * n1
    g = f @ inside
    h = f @ outside
    g = g.copy()
    g[d0 : d0 + 2 * d1] *= s
    a, b, c, d = h[:d0], h[d0 : d0 + d1], h[d0 + d1 : d0 + 2 * d1], h[d0 + 2 * d1 :]
    v = (b - c) / 2
    mean = (b + c) / 2
    h2 = np.vstack([s * a, v + s * s * mean, -v + s * s * mean, s * d])
    return np.hstack([g, h2])


def contraction_frames(lag: LagrangianFrame, ts: NDArray, split: tuple[int, int, int] | None = None) -> NDArray[np.float64]:
    """Batched (unorthonormalized) frames of the contraction at parameters ``ts``."""
    n0, n1, n2 = _split_dims(lag, split)
    inside, outside = diagonal_part(lag, (n0, n1, n2))
    return np.stack([_contraction_columns(lag.frame, inside, outside, n0, n1, 1.0 - float(t)) for t in np.atleast_1d(ts)])


def compose_fiber(lag: LagrangianFrame, split: tuple[int, int, int] | None = None) -> NDArray[np.float64]:
    """Frame of the composed Lagrangian ``{(x0, x2) : (x0, v, v, x2) in lag}``."""
    n0, n1, n2 = _split_dims(lag, split)
    inside, _ = diagonal_part(lag, (n0, n1, n2))
    g = lag.frame @ inside
    return orthonormalize(np.vstack([g[: 2 * n0], g[2 * n0 + 4 * n1 :]]))
