"""Graded Lagrangian subspaces and the degree map.

A graded Lagrangian is a frame together with a real number ``theta`` such
that ``exp(2 pi i theta) = det(X + iY)^2`` for the unitary frame ``X + iY``.
The grading class modulo ``N`` is ``theta mod N``.  Transport of a grading
along a path adds the continuous change of ``arg det^2 / 2 pi``.

The shift action is ``shift(a, c).theta = a.theta - c`` so that
``degree(a, shift(b, c)) = c + degree(a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
from numpy.typing import NDArray

from . import corrlin, maslov
from .corrlin import CompositionError, LinearCorrespondence
from .symplinalg import (
    LagrangianFrame,
    SymplecticError,
    SymplecticSpace,
    block_diag_frames,
    det2_phase,
    dual,
    is_symplectic_matrix,
    min_kahler_sine,
    permutation_rows,
    permute,
    product,
    random_lagrangian,
    same_space,
    subspace_distance,
)

LIFT_TOL = 1e-6
DEGREE_RESIDUAL = 1e-6
DEGREE_EPS = 1e-3


class GradingError(ValueError):
    pass


class NotTransverse(GradingError):
    pass


def check_modulus(n_mod: int) -> int:
    if not isinstance(n_mod, (int, np.integer)) or n_mod <= 0 or n_mod % 2:
        raise GradingError(f"modulus must be a positive even integer, got {n_mod}")
    return int(n_mod)


def principal_theta(sp: SymplecticSpace, frame: NDArray) -> float:
    """``arg det(X + iY)^2 / 2 pi`` in ``(-1/2, 1/2]``."""
    return float(np.angle(det2_phase(sp, frame)) / (2 * np.pi))


@dataclass(frozen=True)
class GradedLagrangian:
    frame: LagrangianFrame
    theta: float
    modulus: int

    def __post_init__(self) -> None:
        check_modulus(self.modulus)
        ph = det2_phase(self.frame.ambient, self.frame.frame)
        if abs(np.exp(2j * np.pi * self.theta) - ph) > 1e-8:
            raise GradingError("theta is not a lift of the frame's det^2 phase")

    @property
    def ambient(self) -> SymplecticSpace:
        return self.frame.ambient

    @property
    def grading_class(self) -> float:
        return float(np.mod(self.theta, self.modulus))


def _snap(sp: SymplecticSpace, frame: NDArray, theta: float) -> float:
    """Nearest exact lift to a numerically transported value."""
    p = principal_theta(sp, frame)
    k = theta - p
    kr = round(k)
    if abs(k - kr) > LIFT_TOL * 1e3:
        raise GradingError(f"transported phase misses the frame's phase by {abs(k - kr):.3g}")
    return p + kr


def graded(frame: LagrangianFrame, theta: float, n_mod: int) -> GradedLagrangian:
    """Graded Lagrangian with ``theta`` rounded onto the nearest lift of the frame."""
    return GradedLagrangian(frame, _snap(frame.ambient, frame.frame, theta), check_modulus(n_mod))


def grade(frame: LagrangianFrame, k: int, n_mod: int) -> GradedLagrangian:
    """The lift ``principal + k``; ``k = 0..N-1`` enumerate the grading classes."""
    check_modulus(n_mod)
    return GradedLagrangian(frame, principal_theta(frame.ambient, frame.frame) + int(k), n_mod)


def orientation_grading(sp: SymplecticSpace, basis: NDArray, n_mod: int = 2) -> GradedLagrangian:
    """Grading determined by an ordered basis: ``theta = arg det(U) / pi``.

    For ``N = 2`` this identifies gradings with orientations; reversing the
    orientation of the basis shifts ``theta`` by one.
    """
    basis = np.asarray(basis, dtype=float)
    f = sp.to_std @ basis
    q, r = np.linalg.qr(f)
    q = q * np.sign(np.diag(r))
    n = sp.n
    d = np.linalg.det(q[:n] + 1j * q[n:]) if n else 1.0
    theta = float(np.angle(d) / np.pi)
    return GradedLagrangian(LagrangianFrame(sp, basis), theta, check_modulus(n_mod))


def orientation_sign(g: GradedLagrangian, basis: NDArray) -> int:
    """``+1`` if ``basis`` is oriented compatibly with the grading class mod 2, else ``-1``."""
    ref = orientation_grading(g.ambient, basis, g.modulus)
    return 1 if round(g.theta - ref.theta) % 2 == 0 else -1


def shift(a: GradedLagrangian, c: int) -> GradedLagrangian:
    return GradedLagrangian(a.frame, a.theta - int(c), a.modulus)


def dual_graded(a: GradedLagrangian) -> GradedLagrangian:
    return GradedLagrangian(LagrangianFrame(dual(a.ambient), a.frame.frame, check=False), -a.theta, a.modulus)


def product_graded(*items: GradedLagrangian) -> GradedLagrangian:
    if not items:
        raise GradingError("empty product")
    mods = {g.modulus for g in items}
    if len(mods) != 1:
        raise GradingError(f"modulus mismatch {sorted(mods)}")
    sp = product(*[g.ambient for g in items])
    frame = LagrangianFrame(sp, block_diag_frames(*[g.frame.frame for g in items]), check=False)
    return GradedLagrangian(frame, float(sum(g.theta for g in items)), items[0].modulus)


def permute_graded(a: GradedLagrangian, order: Sequence[int]) -> GradedLagrangian:
    """Reorder atomic factors; the det^2 phase and hence ``theta`` are unchanged."""
    rows = permutation_rows(a.ambient, order)
    frame = LagrangianFrame(permute(a.ambient, order), a.frame.frame[rows], check=False)
    return GradedLagrangian(frame, a.theta, a.modulus)


def rotate_factors(a: GradedLagrangian, k: int) -> GradedLagrangian:
    """Move the first ``k`` atomic factors to the end."""
    m = len(a.ambient.factors)
    return permute_graded(a, list(range(k, m)) + list(range(k)))


def atom_count(sp: SymplecticSpace) -> int:
    return len(sp.factors)


def transport(a: GradedLagrangian, path: maslov.LagrangianPath) -> GradedLagrangian:
    """Continue a grading along a path starting at its frame."""
    start = path.frames([0.0])[0]
    if subspace_distance(start, a.frame.frame) > 1e-8:
        raise GradingError("path does not start at the graded frame")
    end = LagrangianFrame(path.ambient, path.frames([1.0])[0])
    return graded(end, a.theta + maslov.winding_lift(path), a.modulus)


def _require_pair(a: GradedLagrangian, b: GradedLagrangian) -> SymplecticSpace:
    if a.modulus != b.modulus:
        raise GradingError(f"modulus mismatch {a.modulus} vs {b.modulus}")
    if not same_space(a.ambient, b.ambient, tol=1e-10):
        raise GradingError("graded Lagrangians live in different spaces")
    if a.ambient.n and min_kahler_sine(a.frame, b.frame) <= corrlin.TRANSVERSE_TOL:
        raise NotTransverse("underlying Lagrangians are not transverse")
    return a.ambient


def positive_angles(sp: SymplecticSpace, fa: NDArray, fb: NDArray) -> NDArray[np.float64]:
    """Angles in ``(0, pi)`` of the positive rotation carrying ``a`` onto a transverse ``b``."""
    _, beta = maslov.geodesic_data(sp, fa, fb)
    return np.where(beta > 0, beta, beta + np.pi)


def degree(a: GradedLagrangian, b: GradedLagrangian) -> int:
    """Degree of a transverse graded pair in ``Z_N``.

    The positive rotation of ``a`` onto ``b`` through angles in ``(0, pi)``
    accounts for ``sum(angles)/pi`` of the phase difference; the remaining
    integer counts full half-turns through ``a``, each contributing ``-1``.
    """
    sp = _require_pair(a, b)
    if sp.n == 0:
        return int(np.mod(-round(b.theta - a.theta), a.modulus))
    alpha = positive_angles(sp, a.frame.frame, b.frame.frame)
    m = b.theta - a.theta - float(alpha.sum()) / np.pi
    mr = round(m)
    if abs(m - mr) > DEGREE_RESIDUAL:
        raise GradingError(f"phase residual {abs(m - mr):.3g} exceeds tolerance")
    return int(np.mod(-mr, a.modulus))


def degree_path(
    a: GradedLagrangian,
    b: GradedLagrangian,
    rng: np.random.Generator | None = None,
    stops: int = 0,
    eps: float = DEGREE_EPS,
) -> maslov.LagrangianPath:
    """A path from ``a`` to ``b`` whose det^2 lift realizes ``b.theta - a.theta``.

    It starts with the positive arc ``e^{sJ} a`` for ``s`` in ``[0, eps]``, then
    visits ``stops`` random Lagrangians along principal rotations, and ends with
    a rotation carrying the extra half-turns needed to hit ``b.theta``.
    """
    sp = a.ambient
    rng = np.random.default_rng(rng)
    segs = [maslov.rotation(a.frame, eps)]
    cur = segs[0].frames([1.0])[0]
    theta = a.theta + maslov.winding_lift(segs[0])
    for _ in range(stops):
        nxt = random_lagrangian(sp.n, rng, sp).frame
        wind = rng.integers(-1, 2, size=sp.n)
        seg = maslov.geodesic(sp, cur, nxt, wind)
        theta += maslov.winding_lift(seg)
        segs.append(seg)
        cur = nxt
    _, beta = maslov.geodesic_data(sp, cur, b.frame.frame)
    need = b.theta - theta - float(beta.sum()) / np.pi
    m = round(need)
    if abs(need - m) > 1e-5:
        raise GradingError(f"phase residual {abs(need - m):.3g} while building a degree path")
    wind = np.zeros(sp.n, dtype=int)
    if stops:
        parts = rng.multinomial(abs(m), np.ones(sp.n) / sp.n)
        wind = np.sign(m) * parts
    else:
        wind[0] = m
    segs.append(maslov.geodesic(sp, cur, b.frame.frame, wind))
    return maslov.concat(*segs)


def degree_via_crossings(
    a: GradedLagrangian,
    b: GradedLagrangian,
    rng: np.random.Generator | int | None = None,
    stops: int = 0,
) -> int:
    """Degree as minus the interior crossing count of a graded path against ``a``."""
    sp = _require_pair(a, b)
    if sp.n == 0:
        return degree(a, b)
    path = degree_path(a, b, np.random.default_rng(rng), stops)
    return int(np.mod(-maslov.rs_index_interior(path, a.frame), a.modulus))


_DIAGONAL_CACHE: dict[tuple[bytes, bytes], float] = {}


def _space_key(sp: SymplecticSpace) -> tuple[bytes, bytes]:
    return (np.ascontiguousarray(sp.form).tobytes(), np.ascontiguousarray(sp.to_std).tobytes())


def diagonal_transport_path(sp: SymplecticSpace, aux: LagrangianFrame) -> maslov.LagrangianPath:
    """Path from ``aux^- x aux`` to the diagonal of ``sp^- x sp``.

    First rotate the left factor by ``e^{Jt}``, ``t`` in ``[0, pi/2]``, then
    move along ``{(t x + J y, x + t J y) : x, y in aux}``, ``t`` in ``[0, 1]``.
    """
    j = sp.complex_structure
    f = aux.frame
    amb = product(dual(sp), sp)
    dim, n = sp.dim, sp.n

    def first(ts: NDArray) -> NDArray:
        out = np.zeros((ts.size, 2 * dim, 2 * n))
        c = np.cos(ts * np.pi / 2)[:, None, None]
        s = np.sin(ts * np.pi / 2)[:, None, None]
        out[:, :dim, :n] = c * f + s * (j @ f)
        out[:, dim:, n:] = f
        return out

    def second(ts: NDArray) -> NDArray:
        out = np.zeros((ts.size, 2 * dim, 2 * n))
        t = ts[:, None, None]
        jf = j @ f
        out[:, :dim, :n] = t * f
        out[:, :dim, n:] = jf
        out[:, dim:, :n] = f
        out[:, dim:, n:] = t * jf
        return out

    return maslov.concat(maslov.LagrangianPath(amb, first), maslov.LagrangianPath(amb, second))


def canonical_diagonal(sp: SymplecticSpace, n_mod: int, aux: LagrangianFrame | None = None) -> GradedLagrangian:
    """Canonical grading of the diagonal in ``sp^- x sp``."""
    check_modulus(n_mod)
    amb = product(dual(sp), sp)
    eye = np.eye(sp.dim)
    diag = LagrangianFrame(amb, np.vstack([eye, eye]) / np.sqrt(2))
    if sp.n == 0:
        return GradedLagrangian(diag, 0.0, n_mod)
    key = _space_key(sp)
    if aux is None and key in _DIAGONAL_CACHE:
        return GradedLagrangian(diag, _DIAGONAL_CACHE[key], n_mod)
    lag = aux if aux is not None else LagrangianFrame(sp, sp.from_std @ np.vstack([np.eye(sp.n), np.zeros((sp.n, sp.n))]))
    start = product_graded(dual_graded(grade(lag, 0, n_mod)), grade(lag, 0, n_mod))
    end = transport(start, diagonal_transport_path(sp, lag))
    theta = _snap(amb, diag.frame, end.theta)
    if aux is None:
        _DIAGONAL_CACHE[key] = theta
    return GradedLagrangian(diag, theta, n_mod)


@dataclass(frozen=True)
class GradedCorrespondence:
    corr: LinearCorrespondence
    graded: GradedLagrangian

    def __post_init__(self) -> None:
        if subspace_distance(self.corr.lag, self.graded.frame) > 1e-8:
            raise GradingError("grading does not belong to the correspondence")

    @classmethod
    def of(cls, corr: LinearCorrespondence, theta_or_k: float | int, n_mod: int, exact: bool = False) -> "GradedCorrespondence":
        if exact:
            return cls(corr, GradedLagrangian(corr.lag, float(theta_or_k), n_mod))
        return cls(corr, grade(corr.lag, int(theta_or_k), n_mod))

    @property
    def modulus(self) -> int:
        return self.graded.modulus


def transpose_graded(c: GradedCorrespondence) -> GradedCorrespondence:
    """Transposed correspondence; the reordering together with the duals gives ``-theta``."""
    t = corrlin.transpose(c.corr)
    return GradedCorrespondence(t, GradedLagrangian(t.lag, -c.graded.theta, c.modulus))


def compose_graded(a: GradedCorrespondence, b: GradedCorrespondence, property_sign: int = 1) -> GradedCorrespondence:
    """Grading induced on the composition of two transversely composable correspondences.

    The product grading is carried along the fiber contraction to its split
    end, where it factors as the composed Lagrangian times the antidiagonal;
    the antidiagonal factor is then traded for its degree against the dual
    canonical diagonal.
    """
    if a.modulus != b.modulus:
        raise GradingError("modulus mismatch")
    rep = corrlin.compose(a.corr, b.corr)
    if not rep.transverse:
        raise CompositionError(f"composition is not transverse (kernel dimension {rep.kernel.k})")
    v0, v1, v2 = a.corr.source, a.corr.target, b.corr.target
    split = (v0.n, v1.n, v2.n)
    fib = corrlin.fiber_lagrangian(a.corr, b.corr)
    theta = a.graded.theta + b.graded.theta
    if v1.n:
        path = maslov.LagrangianPath(fib.ambient, lambda ts: corrlin.contraction_frames(fib, ts, split))
        theta += maslov.winding_lift(path)
        end = path.frames([1.0])[0]
    else:
        end = fib.frame
    composed = rep.composed
    anti_sp = product(v1, dual(v1))
    eye = np.eye(v1.dim)
    anti = LagrangianFrame(anti_sp, np.vstack([eye, -eye]) / np.sqrt(2)) if v1.dim else LagrangianFrame(anti_sp, np.zeros((0, 0)))
    theta11 = principal_theta(anti_sp, anti.frame)
    # the split end of the contraction equals (composed x antidiagonal) after reordering factors
    theta_end = _snap(fib.ambient, end, theta)
    theta02 = _snap(composed.ambient, composed.frame, theta_end - theta11)
    d11 = degree(GradedLagrangian(anti, theta11, a.modulus), dual_graded(canonical_diagonal(v1, a.modulus))) if v1.n else 0
    out = GradedLagrangian(composed.lag, theta02 + property_sign * d11, a.modulus)
    return GradedCorrespondence(composed, out)


@dataclass(frozen=True)
class GradedSymplectic:
    """A symplectic matrix with a path from the identity, stored as a batched function."""

    ambient: SymplecticSpace
    matrix: NDArray[np.float64]
    path: Callable[[NDArray], NDArray[np.float64]] = field(repr=False)
    modulus: int = 2

    def __post_init__(self) -> None:
        check_modulus(self.modulus)
        ends = self.path(np.array([0.0, 1.0]))
        if not np.allclose(ends[0], np.eye(self.ambient.dim), atol=1e-9):
            raise GradingError("path must start at the identity")
        if not np.allclose(ends[1], self.matrix, atol=1e-8 * max(1.0, np.abs(self.matrix).max())):
            raise GradingError("path must end at the matrix")
        for s in self.path(np.linspace(0.0, 1.0, 9)):
            if not is_symplectic_matrix(s, self.ambient):
                raise SymplecticError("path leaves the symplectic group")

    @classmethod
    def exponential(cls, sp: SymplecticSpace, generator: NDArray, n_mod: int) -> "GradedSymplectic":
        """``t -> expm(t X)`` for an infinitesimally symplectic ``X``."""
        x = np.asarray(generator, dtype=float)
        w, v = np.linalg.eig(x)
        vinv = np.linalg.inv(v)

        def path(ts: NDArray) -> NDArray:
            e = np.exp(np.asarray(ts)[:, None] * w[None, :])
            return np.real(np.einsum("ij,mj,jk->mik", v, e, vinv))

        return cls(sp, sla.expm(x), path, n_mod)

    @classmethod
    def identity(cls, sp: SymplecticSpace, n_mod: int) -> "GradedSymplectic":
        eye = np.eye(sp.dim)
        return cls(sp, eye, lambda ts: np.broadcast_to(eye, (len(ts),) + eye.shape).copy(), n_mod)


def graph_grading(g: GradedSymplectic) -> GradedLagrangian:
    """Grading of ``graph(matrix)`` obtained from the canonical diagonal along the graph of the path."""
    sp = g.ambient
    diag = canonical_diagonal(sp, g.modulus)
    amb = diag.ambient
    eye = np.eye(sp.dim)

    def fn(ts: NDArray) -> NDArray:
        s = g.path(np.asarray(ts))
        return np.concatenate([np.broadcast_to(eye, s.shape), s], axis=1)

    path = maslov.LagrangianPath(amb, fn)
    return transport(diag, path)


def graded_graph(g: GradedSymplectic) -> GradedCorrespondence:
    c = corrlin.graph(g.matrix, g.ambient)
    return GradedCorrespondence(c, graph_grading(g))


def random_graded(sp: SymplecticSpace, n_mod: int, rng: np.random.Generator) -> GradedLagrangian:
    return grade(random_lagrangian(sp.n, rng, sp), int(rng.integers(0, n_mod)), n_mod)


def random_graded_correspondence(v0: SymplecticSpace, v1: SymplecticSpace, n_mod: int, rng: np.random.Generator) -> GradedCorrespondence:
    amb = product(dual(v0), v1)
    lag = random_lagrangian(amb.n, rng, amb)
    corr = LinearCorrespondence(v0, v1, lag)
    return GradedCorrespondence(corr, grade(lag, int(rng.integers(0, n_mod)), n_mod))


def as_point_correspondence(g: GradedLagrangian, from_point: bool = True) -> GradedCorrespondence:
    corr = corrlin.lagrangian_as_correspondence(g.frame, from_point)
    return GradedCorrespondence(corr, GradedLagrangian(corr.lag, g.theta, g.modulus))


def insertdiag_a(
    l0: GradedLagrangian,
    l01: GradedLagrangian,
    l12: GradedLagrangian,
    l2: GradedLagrangian,
    v1: SymplecticSpace,
) -> tuple[int, int]:
    """Both sides of the diagonal-insertion identity for a noncyclic chain.

    ``l0`` in ``V0``, ``l01`` in ``V0^- x V1``, ``l12`` in ``V1^- x V2``, ``l2`` in ``V2^-``.
    """
    lhs = degree(product_graded(l0, l12), product_graded(dual_graded(l01), dual_graded(l2)))
    diag = canonical_diagonal(v1, l0.modulus)
    rhs = degree(product_graded(l0, diag, l2), product_graded(dual_graded(l01), dual_graded(l12)))
    return lhs, rhs


def insertdiag_b(lam: GradedLagrangian, k: GradedLagrangian, v0: SymplecticSpace) -> tuple[int, int]:
    """Both sides of the cyclic diagonal-insertion identity.

    ``lam`` in ``V0^- x W x V0`` and ``k`` in ``V0 x V0^- x W``; the transposition
    moves the leading ``V0`` block to the end.
    """
    a0 = atom_count(v0)
    diag = canonical_diagonal(v0, lam.modulus)
    lhs = degree(product_graded(lam, diag), rotate_factors(product_graded(k, dual_graded(diag)), a0))
    rhs = degree(lam, rotate_factors(k, a0))
    return lhs, rhs


def gradingcomp(
    l0: GradedLagrangian,
    c01: GradedCorrespondence,
    c12: GradedCorrespondence,
    l2: GradedLagrangian,
) -> tuple[int, int]:
    """Degree through the triple versus degree through the composed correspondence.

    ``l0`` in ``V0`` and ``l2`` in ``V2^-``.
    """
    c02 = compose_graded(c01, c12)
    lhs = degree(product_graded(l0, c12.graded), product_graded(dual_graded(c01.graded), dual_graded(l2)))
    rhs = degree(product_graded(l0, l2), dual_graded(c02.graded))
    return lhs, rhs
