"""Cyclic sequences of Lagrangian correspondences between flat tori.

Generators are the tuples ``(x_0, ..., x_r)`` with
``(x_j + tau_j, x_{j+1})`` in the ``j``-th correspondence, where ``tau_j`` is a
translation perturbing the ``j``-th torus.  Translations have identity
differential, so every generator of a sequence carries the same tangent data
and hence the same degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from . import complexes, grading, maslov
from .corrlin import CompositionError
from .grading import (
    GradedCorrespondence,
    GradedLagrangian,
    GradingError,
    NotTransverse,
    atom_count,
    canonical_diagonal,
    degree,
    dual_graded,
    principal_theta,
    product_graded,
    rotate_factors,
)
from .smith import saturate, smith, solve_congruence
from .symplinalg import LagrangianFrame, block_diag_frames, dual, null_space, numerical_rank, random_lagrangian, transverse
from .torus import (
    LatticeCorrespondence,
    POINT_TORUS,
    TorusManifold,
    diagonal_correspondence,
    random_lattice_correspondence,
    reduce_mod1,
    subtorus_contains,
    torus_distance,
)

MATCH_TOL = 1e-7


class QuiltError(ValueError):
    """Raised for malformed sequences or failed generator bijections."""


class NotEmbedded(CompositionError):
    """Composition of neighbouring correspondences is not embedded."""

    def __init__(self, message: str, witness: dict[str, Any]) -> None:
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class GradedSubtorus:
    """A lattice correspondence with a grading of its (constant) tangent space."""

    corr: LatticeCorrespondence
    theta: float
    modulus: int

    def __post_init__(self) -> None:
        GradedLagrangian(self.corr.tangent, self.theta, self.modulus)

    @classmethod
    def of(cls, corr: LatticeCorrespondence, k: int, modulus: int) -> "GradedSubtorus":
        g = grading.grade(corr.tangent, k, modulus)
        return cls(corr, g.theta, modulus)

    @classmethod
    def lifted(cls, corr: LatticeCorrespondence, theta: float, modulus: int) -> "GradedSubtorus":
        """Snap a numerically obtained ``theta`` onto the tangent frame's nearest lift."""
        return cls(corr, grading.graded(corr.tangent, theta, modulus).theta, modulus)

    @property
    def graded(self) -> GradedLagrangian:
        return GradedLagrangian(self.corr.tangent, self.theta, self.modulus)

    @property
    def graded_correspondence(self) -> GradedCorrespondence:
        return GradedCorrespondence(self.corr.linear(), self.graded)


@dataclass(frozen=True)
class CyclicSequence:
    manifolds: tuple[TorusManifold, ...]
    correspondences: tuple[GradedSubtorus, ...]
    widths: tuple[float, ...] = ()
    perturbations: tuple[NDArray[np.float64], ...] = ()
    modulus: int = 2
    tau: float = 0.0

    def __post_init__(self) -> None:
        r1 = len(self.manifolds)
        if r1 < 1:
            raise QuiltError("a cyclic sequence needs at least one manifold")
        if len(self.correspondences) != r1:
            raise QuiltError(f"{r1} manifolds need {r1} correspondences, got {len(self.correspondences)}")
        widths = tuple(float(w) for w in self.widths) or (1.0,) * r1
        if len(widths) != r1 or any(w <= 0 for w in widths):
            raise QuiltError("widths must be positive, one per manifold")
        perts = tuple(np.asarray(p, dtype=float).reshape(m.dim) for p, m in zip(self.perturbations, self.manifolds))
        if not perts:
            perts = tuple(np.zeros(m.dim) for m in self.manifolds)
        if len(perts) != r1:
            raise QuiltError("one perturbation per manifold required")
        for j, c in enumerate(self.correspondences):
            nxt = self.manifolds[(j + 1) % r1]
            if c.corr.source != self.manifolds[j] or c.corr.target != nxt:
                raise QuiltError(f"correspondence {j} does not map manifold {j} to manifold {(j + 1) % r1}")
            if c.modulus != self.modulus:
                raise QuiltError(f"correspondence {j} has modulus {c.modulus}, sequence has {self.modulus}")
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "perturbations", perts)

    @property
    def length(self) -> int:
        return len(self.manifolds)

    def with_widths(self, widths: Sequence[float]) -> "CyclicSequence":
        return CyclicSequence(self.manifolds, self.correspondences, tuple(widths), self.perturbations, self.modulus, self.tau)

    def rotated(self, k: int) -> "CyclicSequence":
        """Relabel so that manifold ``k`` becomes manifold 0."""
        k %= self.length
        order = list(range(k, self.length)) + list(range(k))
        return CyclicSequence(
            tuple(self.manifolds[i] for i in order),
            tuple(self.correspondences[i] for i in order),
            tuple(self.widths[i] for i in order),
            tuple(self.perturbations[i] for i in order),
            self.modulus,
            self.tau,
        )


@dataclass(frozen=True)
class Generator:
    points: tuple[tuple[float, ...], ...]
    degree: int

    def point(self, j: int) -> NDArray[np.float64]:
        return np.asarray(self.points[j], dtype=float)

    def key(self, digits: int = 7) -> tuple:
        return tuple(tuple(round(v, digits) % 1.0 for v in p) for p in self.points)


def _as_points(xs: Sequence[NDArray]) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in reduce_mod1(x)) for x in xs)


def matches(seq: CyclicSequence, points: Sequence[NDArray], tol: float = MATCH_TOL) -> bool:
    """Check every matching condition of a candidate tuple."""
    r1 = seq.length
    for j, c in enumerate(seq.correspondences):
        x = np.asarray(points[j], dtype=float) + seq.perturbations[j]
        y = np.asarray(points[(j + 1) % r1], dtype=float)
        if not c.corr.contains(np.concatenate([x, y]), tol):
            return False
    return True


def _raw_solutions(seq: CyclicSequence) -> list[list[NDArray]]:
    from .torus import generator_system

    corrs = [c.corr for c in seq.correspondences]
    cmat, b, x_off = generator_system(corrs, seq.perturbations)
    sols = solve_congruence(cmat, b)
    if sols is None:
        k = cmat.shape[1] - numerical_rank(cmat.astype(float))
        raise NotTransverse(f"generalized intersection is not transverse: solution set has dimension {k}")
    out = []
    for s in sols:
        out.append([s[x_off[j] : x_off[j + 1]] for j in range(seq.length)])
    return out


def intersection_points(seq: CyclicSequence, with_degrees: bool = True) -> list[Generator]:
    """All generalized intersection points of a transversely perturbed sequence."""
    raw = _raw_solutions(seq)
    deg = generator_degree(seq) if (with_degrees and raw) else 0
    gens = []
    for xs in raw:
        if not matches(seq, xs):
            raise QuiltError(f"solver returned a tuple violating the matching conditions: {_as_points(xs)}")
        gens.append(Generator(_as_points(xs), deg))
    gens.sort(key=lambda g: g.key())
    return gens


def product_lagrangian(seq: CyclicSequence) -> GradedLagrangian:
    """Product of all graded correspondences in ``V0^- x V1 x V1^- x ... x Vr^- x V0``."""
    return product_graded(*[c.graded for c in seq.correspondences])


def transposed_diagonal(seq: CyclicSequence) -> GradedLagrangian:
    """Product of dual canonical diagonals, reordered to match :func:`product_lagrangian`."""
    items = [dual_graded(canonical_diagonal(m.space, seq.modulus)) for m in seq.manifolds]
    return rotate_factors(product_graded(*items), atom_count(seq.manifolds[0].space))


def generator_degree(seq: CyclicSequence, gen: Generator | None = None) -> int:
    """Degree of a generator against the canonically graded transposed diagonal."""
    return degree(product_lagrangian(seq), transposed_diagonal(seq))


def _graph_chart(amb, k_frame: NDArray) -> tuple[NDArray, NDArray]:
    c = amb.complex_structure @ k_frame
    return c, np.hstack([c, k_frame])


def _chart_coordinates(basis: NDArray, frame: NDArray, n: int) -> NDArray:
    coeffs = np.linalg.solve(basis, frame)
    x, y = coeffs[:n], coeffs[n:]
    if np.linalg.cond(x) > 1e10:
        raise NotTransverse("Lagrangian is not transverse to the transposed diagonal")
    return y @ np.linalg.inv(x)


def generator_degree_alt_a(seq: CyclicSequence, gen: Generator | None = None, rng: np.random.Generator | None = None) -> int:
    """Degree via deformation to a split tuple of Lagrangian subspaces.

    The product Lagrangian is moved along a straight line in the graph chart
    over a complement of the transposed diagonal, so the path never meets it,
    to a random product ``L0'' x L1' x L1'' x ... x Lr'' x L0'``.  The grading
    is split over the factors and the degree becomes a sum of pair degrees.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    big = product_lagrangian(seq)
    dt = transposed_diagonal(seq)
    amb = big.ambient
    n = amb.n
    if n == 0:
        return degree(big, dt)
    c, basis = _graph_chart(amb, dt.frame.frame)
    a0 = _chart_coordinates(basis, big.frame.frame, n)
    spaces = [m.space for m in seq.manifolds]
    for _ in range(50):
        pieces: list[tuple[LagrangianFrame, LagrangianFrame]] = []
        for sp in spaces:
            pieces.append((random_lagrangian(sp.n, rng, sp), random_lagrangian(sp.n, rng, dual(sp))))
        order = [pieces[0][1]]
        for j in range(1, len(spaces)):
            order.extend([pieces[j][0], pieces[j][1]])
        order.append(pieces[0][0])
        target = block_diag_frames(*[p.frame for p in order])
        try:
            a1 = _chart_coordinates(basis, target, n)
        except NotTransverse:
            continue
        break
    else:
        raise GradingError("no split target transverse to the transposed diagonal")
    kf = dt.frame.frame

    def frames(ts: NDArray) -> NDArray:
        ts = np.asarray(ts, dtype=float)
        a = (1.0 - ts)[:, None, None] * a0[None] + ts[:, None, None] * a1[None]
        return c[None] + kf[None] @ a

    path = maslov.LagrangianPath(amb, frames)
    theta_end = big.theta + maslov.winding_lift(path)
    theta_end = grading._snap(amb, frames(np.array([1.0]))[0], theta_end)
    thetas = [principal_theta(p.ambient, p.frame) for p in order]
    residual = theta_end - sum(thetas)
    thetas[-1] += residual
    graded_pieces = [GradedLagrangian(p, t, seq.modulus) for p, t in zip(order, thetas)]
    # graded_pieces = [L0'', L1', L1'', ..., Lr'', L0']
    primes = [graded_pieces[-1]] + [graded_pieces[2 * j - 1] for j in range(1, len(spaces))]
    seconds = [graded_pieces[0]] + [graded_pieces[2 * j] for j in range(1, len(spaces))]
    total = sum(degree(p, dual_graded(s)) for p, s in zip(primes, seconds))
    return int(total % seq.modulus)


def insert_diagonal(seq: CyclicSequence, position: int) -> CyclicSequence:
    """Insert a canonically graded diagonal after manifold ``position``.

    ``position = r + 1`` appends the diagonal as the last correspondence,
    ending at manifold 0.  The copy of manifold ``position`` inherits its
    perturbation, so generators map by duplicating a point.
    """
    r1 = seq.length
    if not 0 <= position <= r1:
        raise QuiltError(f"position must lie in [0, {r1}]")
    mans = list(seq.manifolds)
    corrs = list(seq.correspondences)
    widths = list(seq.widths)
    perts = list(seq.perturbations)
    if position == r1:
        m = mans[0]
        diag = _graded_diagonal(m, seq.modulus)
        last = corrs[-1]
        corrs[-1] = GradedSubtorus(LatticeCorrespondence(last.corr.source, m, last.corr.direction, last.corr.offset), last.theta, last.modulus)
        return CyclicSequence(
            tuple(mans + [m]), tuple(corrs + [diag]), tuple(widths + [widths[0]]), tuple(perts + [np.zeros(m.dim)]), seq.modulus, seq.tau
        )
    m = mans[position]
    diag = _graded_diagonal(m, seq.modulus)
    mans.insert(position + 1, m)
    corrs.insert(position, diag)
    widths.insert(position + 1, widths[position])
    perts.insert(position + 1, perts[position])
    perts[position] = np.zeros(m.dim)
    return CyclicSequence(tuple(mans), tuple(corrs), tuple(widths), tuple(perts), seq.modulus, seq.tau)


def insert_diagonal_map(seq: CyclicSequence, position: int) -> Callable[[Generator], tuple[tuple[float, ...], ...]]:
    """Generator bijection induced by :func:`insert_diagonal`."""

    def fn(g: Generator) -> tuple[tuple[float, ...], ...]:
        pts = list(g.points)
        if position == seq.length:
            return tuple(pts + [pts[0]])
        pts.insert(position + 1, pts[position])
        return tuple(pts)

    return fn


def _graded_diagonal(m: TorusManifold, modulus: int) -> GradedSubtorus:
    corr = diagonal_correspondence(m)
    can = canonical_diagonal(m.space, modulus)
    return GradedSubtorus.lifted(corr, can.theta, modulus)


@dataclass(frozen=True)
class Folded:
    """The pair ``(L_(0), L_(1))`` in ``M0^- x M1 x M2^- x ...`` with their gradings.

    ``first`` collects the even correspondences and ``second`` the odd ones
    reordered so that the trailing ``M0`` comes first; generators are the
    intersection points of ``first`` with the dual of ``second``.  The
    directions and offsets describe both as subtori of the product torus.
    """

    sequence: CyclicSequence
    first: GradedLagrangian
    second: GradedLagrangian
    first_direction: NDArray[np.int64]
    first_offset: NDArray[np.float64]
    second_direction: NDArray[np.int64]
    second_offset: NDArray[np.float64]

    def to_point(self, points: Sequence[Sequence[float]]) -> NDArray[np.float64]:
        return np.concatenate([np.asarray(p, dtype=float) for p in points])

    def contains(self, points: Sequence[Sequence[float]], tol: float = MATCH_TOL) -> bool:
        """Whether a tuple of points lies on both folded subtori, perturbations included."""
        z = self.to_point(points)
        even, odd = _parity_shifts(self.sequence)
        return subtorus_contains(self.first_direction, self.first_offset, z + even, tol) and subtorus_contains(
            self.second_direction, self.second_offset, z + odd, tol
        )

    def transverse(self) -> bool:
        return transverse(self.first.frame, dual_graded(self.second).frame) if self.first.ambient.n else True


def _parity_shifts(seq: CyclicSequence) -> tuple[NDArray, NDArray]:
    even = [p if j % 2 == 0 else np.zeros_like(p) for j, p in enumerate(seq.perturbations)]
    odd = [np.zeros_like(p) if j % 2 == 0 else p for j, p in enumerate(seq.perturbations)]
    return np.concatenate(even), np.concatenate(odd)


def _stack(parts: Sequence[LatticeCorrespondence]) -> tuple[NDArray[np.int64], NDArray[np.float64]]:
    rows = sum(p.direction.shape[0] for p in parts)
    cols = sum(p.direction.shape[1] for p in parts)
    a = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for p in parts:
        h, w = p.direction.shape
        a[r : r + h, c : c + w] = p.direction
        r, c = r + h, c + w
    return a, np.concatenate([p.offset for p in parts])


def fold(seq: CyclicSequence) -> Folded:
    """Fold an even-length sequence into a pair of Lagrangians of ``M0^- x M1 x M2^- x ...``."""
    if seq.length % 2:
        raise QuiltError("fold requires even length; insert a diagonal first")
    corrs = seq.correspondences
    evens = [corrs[j] for j in range(0, seq.length, 2)]
    odds = [corrs[j] for j in range(1, seq.length, 2)]
    first = product_graded(*[c.graded for c in evens])
    second = product_graded(*[c.graded for c in odds])
    m = len(second.ambient.factors)
    second = rotate_factors(second, m - atom_count(seq.manifolds[0].space))
    a0, p0 = _stack([c.corr for c in evens])
    a1, p1 = _stack([c.corr for c in odds])
    # odd correspondences cover M1..Mr then M0; rotate M0 to the front
    d0 = seq.manifolds[0].dim
    total = a1.shape[0]
    rows = np.r_[total - d0 : total, 0 : total - d0]
    return Folded(seq, first, second, a0, p0, a1[rows], p1[rows])


def generator_degree_alt_b(seq: CyclicSequence, gen: Generator | None = None) -> int:
    """Degree of the folded pair, after appending a diagonal to odd-length sequences."""
    s = seq if seq.length % 2 == 0 else insert_diagonal(seq, seq.length)
    f = fold(s)
    return degree(f.first, dual_graded(f.second))


def all_degrees(seq: CyclicSequence, rng: np.random.Generator | None = None) -> tuple[int, int, int]:
    return generator_degree(seq), generator_degree_alt_a(seq, rng=rng), generator_degree_alt_b(seq)


@dataclass(frozen=True)
class CompositionResult:
    sequence: CyclicSequence
    position: int
    mapping: Callable[[Generator], tuple[tuple[float, ...], ...]] = field(repr=False)


def _embedded_lattice_composition(
    a: LatticeCorrespondence, b: LatticeCorrespondence
) -> tuple[NDArray[np.int64], NDArray[np.float64]]:
    """Direction and offset of ``a o b`` when the composition is embedded; raises :class:`NotEmbedded` otherwise."""
    n_mid = a.target.dim
    da = a.source.dim
    ka, kb = a.direction.shape[1], b.direction.shape[1]
    a_top, a_bot = a.direction[:da], a.direction[da:]
    b_top, b_bot = b.direction[:n_mid], b.direction[n_mid:]
    g = np.hstack([a_bot, -b_top]).astype(np.int64)
    rhs = b.offset[:n_mid] - a.offset[da:]
    rank = numerical_rank(g.astype(float)) if g.size else 0
    if rank < n_mid:
        kernel = n_mid - rank
        raise NotEmbedded(
            f"fiber product is not transverse: kernel dimension {kernel}", {"kernel_dimension": int(kernel)}
        )
    if n_mid:
        inv = smith(g).invariants
        comps = int(np.prod(inv))
        if comps != 1:
            raise NotEmbedded(f"fiber product has {comps} components", {"components": comps, "invariant_factors": list(inv)})
        x0 = np.linalg.lstsq(g.astype(float), rhs, rcond=None)[0]
        k_int = _integer_kernel(g)
    else:
        x0 = np.zeros(ka + kb)
        k_int = np.eye(ka + kb, dtype=np.int64)
    p = np.zeros((da + b.target.dim, ka + kb), dtype=np.int64)
    p[:da, :ka] = a_top
    p[da:, ka:] = b_bot
    pk = p @ k_int
    d = k_int.shape[1]
    if numerical_rank(pk.astype(float)) < d:
        u = null_space(pk.astype(float))[:, 0]
        raise NotEmbedded(
            "projection of the fiber product is not injective",
            {"kernel_direction": (k_int @ u).tolist()},
        )
    inv = smith(pk).invariants if d else ()
    if any(x != 1 for x in inv):
        bad = max(inv)
        raise NotEmbedded(
            f"projection of the fiber product is {bad}-to-one onto its image",
            {"multiplicity": int(np.prod(inv)), "invariant_factors": list(inv)},
        )
    offset = np.concatenate([a.offset[:da] + a_top @ x0[:ka], b.offset[n_mid:] + b_bot @ x0[ka:]])
    return pk, offset


def _integer_kernel(g: NDArray[np.int64]) -> NDArray[np.int64]:
    sf = smith(g)
    v = np.asarray(sf.v, dtype=object)
    return np.asarray(v[:, sf.rank :], dtype=np.int64)


def compose_at(seq: CyclicSequence, j: int) -> CompositionResult:
    """Replace the two correspondences meeting at manifold ``j`` by their graded composition."""
    r1 = seq.length
    if r1 < 2:
        raise QuiltError("composition needs a sequence of length at least 2")
    j %= r1
    if j == 0:
        rot = seq.rotated(1)
        inner = compose_at(rot, r1 - 1)

        def mapping0(g: Generator) -> tuple[tuple[float, ...], ...]:
            pts = list(g.points)
            return tuple(pts[1:])

        return CompositionResult(inner.sequence, 0, mapping0)
    ca, cb = seq.correspondences[j - 1], seq.correspondences[j]
    # the translation of manifold j moves into the second correspondence
    b_shift = cb.corr.shifted(np.concatenate([-seq.perturbations[j], np.zeros(cb.corr.target.dim)]))
    direction, offset = _embedded_lattice_composition(ca.corr, b_shift)
    new_corr = LatticeCorrespondence(ca.corr.source, cb.corr.target, direction, offset)
    gc = grading.compose_graded(ca.graded_correspondence, cb.graded_correspondence)
    new_graded = GradedSubtorus.lifted(new_corr, gc.graded.theta, seq.modulus)
    mans = list(seq.manifolds)
    corrs = list(seq.correspondences)
    widths = list(seq.widths)
    perts = list(seq.perturbations)
    del mans[j], widths[j], perts[j]
    corrs[j - 1] = new_graded
    del corrs[j]
    new_seq = CyclicSequence(tuple(mans), tuple(corrs), tuple(widths), tuple(perts), seq.modulus, seq.tau)

    def mapping(g: Generator) -> tuple[tuple[float, ...], ...]:
        pts = list(g.points)
        del pts[j]
        return tuple(pts)

    return CompositionResult(new_seq, j, mapping)


def check_bijection(
    before: Sequence[Generator], after: Sequence[Generator], mapping: Callable[[Generator], tuple]
) -> tuple[bool, str]:
    """Verify that ``mapping`` sends ``before`` bijectively onto ``after`` preserving degrees."""
    if len(before) != len(after):
        return False, f"generator counts differ: {len(before)} vs {len(after)}"
    remaining = list(after)
    for g in before:
        image = np.concatenate([np.asarray(p, dtype=float) for p in mapping(g)]) if g.points else np.zeros(0)
        hit = None
        for i, h in enumerate(remaining):
            flat = np.concatenate([np.asarray(p, dtype=float) for p in h.points]) if h.points else np.zeros(0)
            if flat.shape == image.shape and torus_distance(flat, image) < 1e-6:
                hit = i
                break
        if hit is None:
            return False, f"image of generator {g.points} is not a generator"
        if remaining[hit].degree != g.degree:
            return False, f"degree changes from {g.degree} to {remaining[hit].degree} at {g.points}"
        remaining.pop(hit)
    return True, "ok"


@dataclass(frozen=True)
class KunnethSplit:
    left: CyclicSequence
    right: CyclicSequence
    position: int

    def split(self, g: Generator) -> tuple[tuple[tuple[float, ...], ...], tuple[tuple[float, ...], ...]]:
        pts = g.points
        j = self.position
        return tuple(pts[: j + 1]), (pts[0],) + tuple(pts[j + 1 :])

    def pairs(self, gens: Sequence[Generator], left: Sequence[Generator], right: Sequence[Generator]) -> list[tuple[int, int]]:
        """Index pairs ``(i, k)`` with generator ``g`` splitting into ``left[i]`` and ``right[k]``."""
        lk = {g.key(): i for i, g in enumerate(left)}
        rk = {g.key(): i for i, g in enumerate(right)}
        out = []
        for g in gens:
            a, b = self.split(g)
            ka = Generator(a, 0).key()
            kb = Generator(b, 0).key()
            if ka not in lk or kb not in rk:
                raise QuiltError(f"generator {g.points} does not split into factor generators")
            out.append((lk[ka], rk[kb]))
        return out


def kunneth_split(seq: CyclicSequence, j: int) -> KunnethSplit:
    """Split a sequence starting at the point at a product correspondence ``L_j x L_{j+1}``."""
    if seq.manifolds[0] != POINT_TORUS:
        raise QuiltError("splitting requires manifold 0 to be the point")
    r1 = seq.length
    if not 1 <= j < r1:
        raise QuiltError(f"split position must lie in [1, {r1 - 1}]")
    c = seq.correspondences[j]
    src, tgt = c.corr.source, c.corr.target
    a = c.corr.direction
    top, bot = a[: src.dim], a[src.dim :]
    if numerical_rank(top.astype(float)) != src.n or numerical_rank(bot.astype(float)) != tgt.n:
        raise QuiltError(f"correspondence {j} is not a product of Lagrangians")
    left_dir = saturate(top) if src.n else np.zeros((src.dim, 0), dtype=np.int64)
    right_dir = saturate(bot) if tgt.n else np.zeros((tgt.dim, 0), dtype=np.int64)
    left_c = LatticeCorrespondence(src, POINT_TORUS, left_dir, c.corr.offset[: src.dim])
    right_c = LatticeCorrespondence(POINT_TORUS, tgt, right_dir, c.corr.offset[src.dim :])
    th_left = principal_theta(left_c.ambient, left_c.tangent.frame)
    left_g = GradedSubtorus(left_c, th_left, seq.modulus)
    right_g = GradedSubtorus.lifted(right_c, c.theta - th_left, seq.modulus)
    left = CyclicSequence(
        seq.manifolds[: j + 1],
        seq.correspondences[:j] + (left_g,),
        seq.widths[: j + 1],
        seq.perturbations[: j + 1],
        seq.modulus,
        seq.tau,
    )
    right = CyclicSequence(
        (POINT_TORUS,) + seq.manifolds[j + 1 :],
        (right_g,) + seq.correspondences[j + 1 :],
        (seq.widths[0],) + seq.widths[j + 1 :],
        (np.zeros(0),) + seq.perturbations[j + 1 :],
        seq.modulus,
        seq.tau,
    )
    return KunnethSplit(left, right, j)


def build_complex(
    seq: CyclicSequence, oracle: complexes.Oracle | str = "zero", gens: Sequence[Generator] | None = None
) -> complexes.GradedChainComplex:
    gens = list(gens) if gens is not None else intersection_points(seq)
    return complexes.from_oracle(gens, [g.degree for g in gens], seq.modulus, oracle)


def random_sequence(
    rng: np.random.Generator,
    r_max: int = 4,
    n_max: int = 2,
    modulus: int = 2,
    max_generators: int = 64,
    point_start: bool = False,
    length: int | None = None,
) -> CyclicSequence:
    """A random transversely perturbed lattice sequence with a bounded number of generators."""
    for _ in range(200):
        r1 = length if length is not None else int(rng.integers(1, r_max + 2))
        dims = [int(rng.integers(0, n_max + 1)) for _ in range(r1)]
        if point_start:
            dims[0] = 0
        if sum(dims) == 0:
            dims[-1] = 1
            if r1 == 1 and point_start:
                continue
        mans = tuple(TorusManifold(d) for d in dims)
        corrs = []
        for j in range(r1):
            c = random_lattice_correspondence(mans[j], mans[(j + 1) % r1], rng, steps=int(rng.integers(1, 4)))
            corrs.append(GradedSubtorus.of(c, int(rng.integers(0, modulus)), modulus))
        perts = tuple(rng.random(m.dim) for m in mans)
        widths = tuple(float(w) for w in rng.uniform(0.5, 2.0, r1))
        seq = CyclicSequence(mans, tuple(corrs), widths, perts, modulus)
        try:
            raw = _raw_solutions(seq)
        except NotTransverse:
            continue
        if 0 < len(raw) <= max_generators:
            return seq
    raise QuiltError("could not sample a transverse sequence")


def _block_product(a: LatticeCorrespondence, b: LatticeCorrespondence) -> LatticeCorrespondence:
    """``a x b`` for ``a: M -> pt`` and ``b: pt -> M'`` as a correspondence ``M -> M'``."""
    da, db = a.direction, b.direction
    direction = np.zeros((da.shape[0] + db.shape[0], da.shape[1] + db.shape[1]), dtype=np.int64)
    direction[: da.shape[0], : da.shape[1]] = da
    direction[da.shape[0] :, da.shape[1] :] = db
    return LatticeCorrespondence(a.source, b.target, direction, np.concatenate([a.offset, b.offset]))


def random_split_sequence(
    rng: np.random.Generator, modulus: int = 2, max_generators: int = 64
) -> tuple[CyclicSequence, int]:
    """A random sequence starting at the point whose correspondence at the returned index is split."""
    for _ in range(200):
        r1 = int(rng.integers(3, 6))
        j = int(rng.integers(1, r1 - 1))
        mans = tuple([POINT_TORUS] + [TorusManifold(int(rng.integers(1, 3))) for _ in range(r1 - 1)])
        corrs = []
        for k in range(r1):
            if k == j:
                a = random_lattice_correspondence(mans[j], POINT_TORUS, rng)
                b = random_lattice_correspondence(POINT_TORUS, mans[j + 1], rng)
                c = _block_product(a, b)
            else:
                c = random_lattice_correspondence(mans[k], mans[(k + 1) % r1], rng)
            corrs.append(GradedSubtorus.of(c, int(rng.integers(0, modulus)), modulus))
        perts = tuple(rng.random(m.dim) for m in mans)
        seq = CyclicSequence(mans, tuple(corrs), (), perts, modulus)
        try:
            raw = _raw_solutions(seq)
        except NotTransverse:
            continue
        if 0 < len(raw) <= max_generators:
            return seq, j
    raise QuiltError("could not sample a transverse split sequence")
