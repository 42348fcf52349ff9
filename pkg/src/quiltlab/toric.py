"""Torus-invariant Lagrangians and correspondences in complex projective spaces.

Every object here is described in action-angle coordinates of the standard
torus action: a point of ``CP^m`` away from the coordinate hyperplanes has
moments ``mu_1..mu_m`` (in units of pi) and angles ``phi_1..phi_m`` (in turns,
relative to ``z_0``).  A Lagrangian relation is cut out by rational linear
equations on the moments and integral linear equations on the angles, which
makes composition, generator enumeration and identification exact.  The
Fubini-Study form is evaluated separately in affine charts, so the
action-angle model is checked against the actual Kahler geometry at samples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from . import grading, maslov
from .complexes import GradedChainComplex, from_oracle
from .smith import smith
from .symplinalg import standard_space

Rational = Fraction
ANGLE_TOL = 1e-9


class ToricError(ValueError):
    """Raised for invalid toric data or failed verifications, with an optional witness."""

    def __init__(self, message: str, witness: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.witness = witness or {}


# exact rational linear algebra


def _rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    m = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return len(_rref(rows, ncols)[1])


def _kernel(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    red, piv = _rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in zip(red, piv):
            v[c] = -r[f]
        out.append(v)
    return out


def _left_kernel(cols_block: Sequence[Sequence[Fraction]], nrows: int, ncols: int) -> list[list[Fraction]]:
    """Row vectors ``y`` with ``y @ block == 0`` for a ``nrows x ncols`` block."""
    transposed = [[cols_block[i][j] for i in range(nrows)] for j in range(ncols)]
    return _kernel(transposed, nrows)


# spaces and points


@dataclass(frozen=True)
class ToricSpace:
    """``CP^m`` whose lines have area ``scale * pi``; ``m = 0`` is the point."""

    m: int
    scale: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.m < 0 or self.scale <= 0:
            raise ToricError("invalid projective space")
        object.__setattr__(self, "scale", Fraction(self.scale))

    @property
    def clifford_level(self) -> Fraction:
        return self.scale / (self.m + 1)

    @property
    def monotonicity(self) -> Fraction:
        """Line area over its Chern number, in units of pi."""
        return self.scale / (self.m + 1)

    def point(self, mu: NDArray, phi: NDArray) -> NDArray[np.complex128]:
        """Unit homogeneous coordinates with the given moments and angles."""
        mu = np.asarray(mu, dtype=float)
        c = float(self.scale)
        mu0 = c - mu.sum()
        if mu0 <= 0 or np.any(mu <= 0):
            raise ToricError("moments outside the open moment simplex")
        return np.concatenate([[math.sqrt(mu0 / c)], np.sqrt(mu / c) * np.exp(2j * np.pi * np.asarray(phi, dtype=float))])

    def action_angle(self, z: NDArray) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        z = np.asarray(z, dtype=complex)
        nz = float(np.vdot(z, z).real)
        if nz == 0 or abs(z[0]) == 0:
            raise ToricError("point outside the chart z0 != 0")
        mu = float(self.scale) * np.abs(z[1:]) ** 2 / nz
        phi = np.mod(np.angle(z[1:] / z[0]) / (2 * np.pi), 1.0)
        return mu, phi

    def chart(self, z: NDArray) -> NDArray[np.float64]:
        """Real coordinates ``(Re w, Im w)`` of ``w = z[1:] / z[0]``."""
        z = np.asarray(z, dtype=complex)
        w = z[1:] / z[0]
        return np.concatenate([w.real, w.imag])

    def chart_form(self, w_real: NDArray) -> NDArray[np.float64]:
        """Scaled Fubini-Study form at a chart point as a real ``2m x 2m`` matrix."""
        m = self.m
        w = w_real[:m] + 1j * w_real[m:]
        s = 1.0 + float(np.vdot(w, w).real)
        h = (s * np.eye(m) - np.outer(w.conj(), w)) / s**2
        basis = np.vstack([np.eye(m), 1j * np.eye(m)]).astype(complex)
        # omega(u, v) = (i/2) sum h_jk (u_j conj(v_k) - v_j conj(u_k))
        a = basis @ h @ basis.conj().T
        return float(self.scale) * np.real(0.5j * (a - a.T))

    def chart_jacobian(self, mu: NDArray, phi: NDArray) -> NDArray[np.float64]:
        """Derivative of the chart coordinates with respect to ``(mu, phi)``."""
        mu = np.asarray(mu, dtype=float)
        mu0 = float(self.scale) - mu.sum()
        w = np.sqrt(mu / mu0) * np.exp(2j * np.pi * np.asarray(phi, dtype=float))
        dmu = w[:, None] * (np.diag(1.0 / (2 * mu)) + 1.0 / (2 * mu0))
        dphi = np.diag(2j * np.pi * w)
        d = np.hstack([dmu, dphi])
        return np.vstack([d.real, d.imag])


POINT_SPACE = ToricSpace(0)


def projective_space(n: int, scale: Fraction | int = 1) -> ToricSpace:
    return ToricSpace(n, Fraction(scale))


@dataclass(frozen=True)
class ProjectivePoint:
    """Unit homogeneous coordinates with the first nonzero entry real positive."""

    coords: tuple[complex, ...]

    @classmethod
    def of(cls, z: Sequence[complex]) -> "ProjectivePoint":
        z = np.asarray(z, dtype=complex)
        nz = np.linalg.norm(z)
        if nz == 0:
            raise ToricError("zero vector is not a projective point")
        z = z / nz
        k = int(np.flatnonzero(np.abs(z) > 1e-14)[0])
        z = z * (abs(z[k]) / z[k])
        return cls(tuple(complex(x) for x in z))

    @property
    def array(self) -> NDArray[np.complex128]:
        return np.asarray(self.coords, dtype=complex)

    def close_to(self, other: "ProjectivePoint", tol: float = 1e-9) -> bool:
        a, b = self.array, other.array
        return len(a) == len(b) and abs(abs(np.vdot(a, b)) - 1.0) < tol


def moment(z: Sequence[complex] | ProjectivePoint, j: int, scale: Fraction | float = 1) -> float:
    """``pi * scale * |z_j|^2 / |z|^2``."""
    a = z.array if isinstance(z, ProjectivePoint) else np.asarray(z, dtype=complex)
    nz = float(np.vdot(a, a).real)
    if nz == 0:
        raise ToricError("zero vector is not a projective point")
    if not 0 <= j < len(a):
        raise ToricError(f"coordinate index {j} out of range")
    return float(np.pi * float(scale) * abs(a[j]) ** 2 / nz)


# relations


@dataclass(frozen=True)
class ToricRelation:
    """Torus-invariant Lagrangian in ``source^- x target`` given by action-angle equations.

    Variables are ``(mu_source, mu_target)`` and ``(phi_source, phi_target)``.
    ``moment_rows @ mu == moment_values`` exactly and ``angle_rows @ phi`` is
    integral.
    """

    source: ToricSpace
    target: ToricSpace
    moment_rows: tuple[tuple[Fraction, ...], ...]
    moment_values: tuple[Fraction, ...]
    angle_rows: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self) -> None:
        k = self.width
        mrows = tuple(tuple(Fraction(x) for x in r) for r in self.moment_rows)
        arows = tuple(tuple(int(x) for x in r) for r in self.angle_rows)
        if any(len(r) != k for r in mrows + tuple(tuple(map(Fraction, r)) for r in arows)):
            raise ToricError("equation width does not match the spaces")
        object.__setattr__(self, "moment_rows", mrows)
        object.__setattr__(self, "moment_values", tuple(Fraction(v) for v in self.moment_values))
        object.__setattr__(self, "angle_rows", arows)
        rm = _rank(mrows, k)
        ra = _rank([tuple(map(Fraction, r)) for r in arows], k)
        if rm + ra != k:
            raise ToricError(f"{self.name or 'relation'} has dimension {2 * k - rm - ra}, expected {k}")
        if _rref(mrows, k)[0] and not self._consistent():
            raise ToricError("moment equations are inconsistent")
        signs = [-1] * self.source.m + [1] * self.target.m
        km = _kernel(mrows, k)
        ka = _kernel([tuple(map(Fraction, r)) for r in arows], k)
        for u in km:
            for v in ka:
                if sum(s * a * b for s, a, b in zip(signs, u, v)) != 0:
                    raise ToricError(f"{self.name or 'relation'} is not Lagrangian")

    def _consistent(self) -> bool:
        k = self.width
        aug = [list(r) + [v] for r, v in zip(self.moment_rows, self.moment_values)]
        return _rank(aug, k + 1) == _rank(self.moment_rows, k)

    @property
    def width(self) -> int:
        return self.source.m + self.target.m

    def transpose(self) -> "ToricRelation":
        ms = self.source.m

        def swap(r: Sequence) -> tuple:
            return tuple(r[ms:]) + tuple(r[:ms])

        name = f"{self.name}^t" if self.name else ""
        return ToricRelation(
            self.target,
            self.source,
            tuple(swap(r) for r in self.moment_rows),
            self.moment_values,
            tuple(swap(r) for r in self.angle_rows),
            name,
        )

    def contains_action_angle(self, mu: NDArray, phi: NDArray, tol: float = 1e-9) -> bool:
        mu = np.asarray(mu, dtype=float)
        phi = np.asarray(phi, dtype=float)
        for r, v in zip(self.moment_rows, self.moment_values):
            if abs(float(np.dot([float(x) for x in r], mu)) - float(v)) > tol:
                return False
        for r in self.angle_rows:
            t = float(np.dot(r, phi))
            if abs(t - round(t)) > tol:
                return False
        return True

    def contains(self, z_source: NDArray, z_target: NDArray, tol: float = 1e-9) -> bool:
        mus, phs = self.source.action_angle(z_source) if self.source.m else (np.zeros(0), np.zeros(0))
        mut, pht = self.target.action_angle(z_target) if self.target.m else (np.zeros(0), np.zeros(0))
        return self.contains_action_angle(np.concatenate([mus, mut]), np.concatenate([phs, pht]), tol)

    def tangent_chart(self, mu: NDArray, phi: NDArray) -> NDArray[np.float64]:
        """Tangent frame in chart coordinates of ``source x target`` at an action-angle point."""
        k = self.width
        km = np.array([[float(x) for x in v] for v in _kernel(self.moment_rows, k)]).reshape(-1, k)
        ka = np.array([[float(x) for x in v] for v in _kernel([tuple(map(Fraction, r)) for r in self.angle_rows], k)]).reshape(-1, k)
        cols = [np.concatenate([v, np.zeros(k)]) for v in km] + [np.concatenate([np.zeros(k), v]) for v in ka]
        jac = _joint_jacobian(self.source, self.target, mu, phi)
        return jac @ np.array(cols).T if cols else np.zeros((2 * k, 0))

    def ambient_form(self, z_source: NDArray, z_target: NDArray) -> NDArray[np.float64]:
        """``(-omega_source) + omega_target`` in chart coordinates."""
        blocks = []
        if self.source.m:
            blocks.append(-self.source.chart_form(self.source.chart(z_source)))
        if self.target.m:
            blocks.append(self.target.chart_form(self.target.chart(z_target)))
        from scipy.linalg import block_diag

        return block_diag(*blocks) if blocks else np.zeros((0, 0))


def _joint_jacobian(a: ToricSpace, b: ToricSpace, mu: NDArray, phi: NDArray) -> NDArray[np.float64]:
    """Chart derivative of ``(z_a, z_b)`` with respect to ``(mu_a, mu_b, phi_a, phi_b)``."""
    ma, mb = a.m, b.m
    k = ma + mb
    out = np.zeros((2 * k, 2 * k))
    if ma:
        ja = a.chart_jacobian(mu[:ma], phi[:ma])
        out[: 2 * ma, :ma] = ja[:, :ma]
        out[: 2 * ma, k : k + ma] = ja[:, ma:]
    if mb:
        jb = b.chart_jacobian(mu[ma:], phi[ma:])
        out[2 * ma :, ma:k] = jb[:, :mb]
        out[2 * ma :, k + ma :] = jb[:, mb:]
    return out


def _unit(k: int, i: int, v: int | Fraction = 1) -> tuple:
    r = [0] * k
    r[i] = v
    return tuple(r)


def clifford(m: int, ambient_n: int | None = None) -> ToricRelation:
    """Clifford torus of ``CP^m`` as a correspondence from the point.

    With ``ambient_n`` the space carries the reduced scale ``(m+1)/(n+1)``, so
    its Clifford level is ``1/(n+1)`` in units of pi.
    """
    n = m if ambient_n is None else ambient_n
    sp = ToricSpace(m, Fraction(m + 1, n + 1))
    level = sp.clifford_level
    rows = tuple(_unit(m, i, 1) for i in range(m))
    return ToricRelation(POINT_SPACE, sp, rows, (level,) * m, (), f"T^{m}_Cl")


def clifford_point(m: int, angles: NDArray, ambient_n: int | None = None) -> NDArray[np.complex128]:
    n = m if ambient_n is None else ambient_n
    sp = ToricSpace(m, Fraction(m + 1, n + 1))
    return sp.point(np.full(m, float(sp.clifford_level)), np.asarray(angles, dtype=float))


@dataclass(frozen=True)
class MomentFiberCorrespondence:
    """Reduction of ``CP^n`` at the level ``pi/(n+1)`` of the moments in ``levels``.

    The source is ``CP^{n-|levels|}`` in the complementary coordinates (``z_0``
    first) with the reduced scale ``(n+1-|levels|)/(n+1)``.
    """

    levels: frozenset[int]
    n: int
    level: Fraction = field(init=False)

    def __post_init__(self) -> None:
        levels = frozenset(int(j) for j in self.levels)
        if not levels or not levels <= set(range(1, self.n + 1)):
            raise ToricError(f"levels must be a nonempty subset of 1..{self.n}")
        if len(levels) == self.n:
            raise ToricError("reducing at every moment leaves a point; use the Clifford torus")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "level", Fraction(1, self.n + 1))

    @property
    def complement(self) -> list[int]:
        return [i for i in range(1, self.n + 1) if i not in self.levels]

    @property
    def source(self) -> ToricSpace:
        k = self.n + 1 - len(self.levels)
        return ToricSpace(k - 1, Fraction(k, self.n + 1))

    @property
    def target(self) -> ToricSpace:
        return ToricSpace(self.n, Fraction(1))

    def relation(self) -> ToricRelation:
        comp = self.complement
        ms = len(comp)
        k = ms + self.n
        mrows: list[tuple] = []
        vals: list[Fraction] = []
        arows: list[tuple] = []
        for j in sorted(self.levels):
            mrows.append(_unit(k, ms + j - 1))
            vals.append(self.level)
        for i, c in enumerate(comp):
            r = [0] * k
            r[i] = 1
            r[ms + c - 1] = -1
            mrows.append(tuple(r))
            vals.append(Fraction(0))
            arows.append(tuple(r))
        name = "Sigma_(" + ",".join(str(j) for j in sorted(self.levels)) + ")"
        return ToricRelation(self.source, self.target, tuple(mrows), tuple(vals), tuple(arows), name)

    def sample(self, rng: np.random.Generator) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
        """A point of the correspondence built directly from its level-set description."""
        comp = [0] + self.complement
        k = len(comp)
        u = rng.normal(size=k) + 1j * rng.normal(size=k)
        u *= math.sqrt(k / (self.n + 1)) / np.linalg.norm(u)
        z = np.zeros(self.n + 1, dtype=complex)
        z[comp] = u
        first = min(self.levels)
        for j in self.levels:
            phase = 1.0 if j == first else np.exp(2j * np.pi * rng.random())
            z[j] = phase / math.sqrt(self.n + 1)
        return u, z

    def _local(self, u: NDArray, z: NDArray) -> Callable[[NDArray], tuple[NDArray, NDArray]]:
        comp = [0] + self.complement
        k = len(comp)
        radius = math.sqrt(k / (self.n + 1))
        ur = np.concatenate([u.real, u.imag])
        q, _ = np.linalg.qr(np.column_stack([ur, np.eye(2 * k)]))
        sphere = q[:, 1 : 2 * k]
        movers = sorted(self.levels)[1:]

        def param(p: NDArray) -> tuple[NDArray, NDArray]:
            v = ur + sphere @ p[: 2 * k - 1]
            v = radius * v / np.linalg.norm(v)
            uu = v[:k] + 1j * v[k:]
            zz = np.array(z, dtype=complex)
            zz[comp] = uu
            for j, psi in zip(movers, p[2 * k - 1 :]):
                zz[j] *= np.exp(2j * np.pi * psi)
            return uu, zz

        return param

    def tangent_chart(self, u: NDArray, z: NDArray, step: float = 1e-6) -> NDArray[np.float64]:
        """Tangent frame in chart coordinates from the defining parametrization, by central differences."""
        src, tgt = self.source, self.target
        param = self._local(np.asarray(u, dtype=complex), np.asarray(z, dtype=complex))
        dim = 2 * self.n - len(self.levels)
        cols = []
        for i in range(dim):
            e = np.zeros(dim)
            e[i] = step
            a, b = param(e), param(-e)
            cols.append(np.concatenate([src.chart(a[0]) - src.chart(b[0]), tgt.chart(a[1]) - tgt.chart(b[1])]) / (2 * step))
        return np.array(cols).T

    def lagrangian_defect(
        self, rng: np.random.Generator, samples: int = 100, source_scale: Fraction | None = None
    ) -> tuple[float, float]:
        """Largest normalized value of ``(-omega_source) + omega_target`` on sampled tangent frames.

        ``source_scale`` overrides the reduced scale, which shows that only the
        reduced scale makes the correspondence Lagrangian.  Also returns the
        smallest normalized singular value of the frames.
        """
        src = self.source if source_scale is None else ToricSpace(self.source.m, Fraction(source_scale))
        tgt = self.target
        worst, smin = 0.0, np.inf
        for _ in range(samples):
            u, z = self.sample(rng)
            t = self.tangent_chart(u, z)
            from scipy.linalg import block_diag

            form = block_diag(-src.chart_form(src.chart(u)), tgt.chart_form(tgt.chart(z)))
            tn = t / np.linalg.norm(t, axis=0)
            worst = max(worst, float(np.abs(tn.T @ form @ tn).max()))
            smin = min(smin, float(np.linalg.svd(tn, compute_uv=False)[-1]))
        return worst, smin

    def contains(self, z_source: NDArray, z_target: NDArray, tol: float = 1e-9) -> bool:
        """Membership straight from the definition: level conditions plus reduction."""
        z = np.asarray(z_target, dtype=complex)
        if any(abs(moment(z, j) - np.pi / (self.n + 1)) > tol for j in self.levels):
            return False
        red = ProjectivePoint.of(z[[0] + self.complement])
        return red.close_to(ProjectivePoint.of(z_source), tol)


def sigma(k: int, n: int) -> MomentFiberCorrespondence:
    """Reduction at the moments ``k..n``, a correspondence ``CP^{k-1} -> CP^n``."""
    if not 2 <= k <= n:
        raise ToricError(f"need 2 <= k <= n, got k={k}, n={n}")
    return MomentFiberCorrespondence(frozenset(range(k, n + 1)), n)


def sigma_single(j: int, n: int) -> MomentFiberCorrespondence:
    """Reduction at the single moment ``j``, a correspondence ``CP^{n-1} -> CP^n``."""
    return MomentFiberCorrespondence(frozenset({j}), n)


def product_relation(a: ToricRelation, b: ToricRelation) -> ToricRelation:
    """``a x b`` for Lagrangians ``a`` of the source and ``b`` of the target (both from the point)."""
    if a.source.m or b.source.m:
        raise ToricError("product expects two Lagrangians given as correspondences from the point")
    ma, mb = a.target.m, b.target.m
    mrows = tuple(tuple(r) + (0,) * mb for r in a.moment_rows) + tuple((0,) * ma + tuple(r) for r in b.moment_rows)
    arows = tuple(tuple(r) + (0,) * mb for r in a.angle_rows) + tuple((0,) * ma + tuple(r) for r in b.angle_rows)
    # the first factor sits in the dual of its space, which flips nothing in these equations
    return ToricRelation(a.target, b.target, mrows, a.moment_values + b.moment_values, arows, f"{a.name} x {b.name}")


def reduced_space_scale(k: int, n: int) -> dict[str, Fraction]:
    """Scale of the reduced ``CP^{k-1}`` and monotonicity constants from polytope data.

    The moment polytope of ``CP^m`` with scale ``c`` is the simplex
    ``{mu >= 0, sum mu <= c}``; an edge has lattice length ``c``, so a line has
    area ``c * pi`` and Chern number ``m + 1``.  Values are in units of pi.
    """
    if not 1 <= k <= n:
        raise ToricError(f"need 1 <= k <= n, got k={k}, n={n}")
    scale = Fraction(k, n + 1)
    reduced_vertices = [tuple([Fraction(0)] * (k - 1))] + [
        tuple(scale if i == j else Fraction(0) for i in range(k - 1)) for j in range(k - 1)
    ]
    ambient_vertices = [tuple([Fraction(0)] * n)] + [tuple(Fraction(1) if i == j else Fraction(0) for i in range(n)) for j in range(n)]
    edge = _edge_length(reduced_vertices) if k > 1 else scale
    ambient_edge = _edge_length(ambient_vertices)
    return {
        "scale": scale,
        "tau_reduced": edge / k,
        "tau_ambient": ambient_edge / (n + 1),
    }


def _edge_length(vertices: Sequence[tuple[Fraction, ...]]) -> Fraction:
    """Lattice length of the edge between the first two vertices of a simplex."""
    d = [b - a for a, b in zip(vertices[0], vertices[1])]
    g = Fraction(0)
    for x in d:
        g = Fraction(math.gcd(g.numerator * x.denominator, x.numerator * g.denominator), g.denominator * x.denominator) if g else abs(x)
    return g


def tau(n: int) -> Fraction:
    """Monotonicity constant of ``CP^n`` in units of pi."""
    return reduced_space_scale(n, n)["tau_ambient"]


# composition


@dataclass(frozen=True)
class Elimination:
    relation: ToricRelation
    embedded: bool
    reason: str
    middle_moment: tuple[Fraction, ...] | None


def compose_relations(a: ToricRelation, b: ToricRelation) -> Elimination:
    """Composition ``a o b`` by exact elimination of the middle variables."""
    if a.target != b.source:
        raise ToricError("relations are not composable")
    ma, mm, mb = a.source.m, a.target.m, b.target.m
    width = ma + mm + mb

    def lift_a(r: Sequence) -> list:
        return list(r) + [0] * mb

    def lift_b(r: Sequence) -> list:
        return [0] * ma + list(r)

    mrows = [lift_a(r) for r in a.moment_rows] + [lift_b(r) for r in b.moment_rows]
    mvals = list(a.moment_values) + list(b.moment_values)
    arows = [lift_a(r) for r in a.angle_rows] + [lift_b(r) for r in b.angle_rows]
    rank_m = _rank(mrows, width)
    rank_a = _rank([list(map(Fraction, r)) for r in arows], width)
    expected = 2 * (ma + mb)
    actual = 2 * width - rank_m - rank_a
    transverse = actual == ma + mb and rank_m == len(_rref(a.moment_rows, ma + mm)[1]) + len(_rref(b.moment_rows, mm + mb)[1])
    transverse = transverse and rank_a == _rank([list(map(Fraction, r)) for r in a.angle_rows], ma + mm) + _rank(
        [list(map(Fraction, r)) for r in b.angle_rows], mm + mb
    )
    if not transverse:
        return Elimination(a, False, f"fiber product has dimension {actual}, expected {ma + mb}", None)
    del expected
    mid = list(range(ma, ma + mm))
    outer = [c for c in range(width) if c not in mid]
    # moments: combinations of rows free of middle variables
    block = [[Fraction(r[c]) for c in mid] for r in mrows]
    ys = _left_kernel(block, len(mrows), mm) if mm else [_unit(len(mrows), i, Fraction(1)) for i in range(len(mrows))]
    new_m = []
    new_v = []
    for y in ys:
        row = [sum(Fraction(y[i]) * Fraction(mrows[i][c]) for i in range(len(mrows))) for c in outer]
        new_m.append(tuple(row))
        new_v.append(sum(Fraction(y[i]) * Fraction(mvals[i]) for i in range(len(mrows))))
    red, piv = _rref(new_m, len(outer))
    # reduce to an independent set of rows
    aug = [list(r) + [v] for r, v in zip(new_m, new_v)]
    aug_red, _ = _rref(aug, len(outer) + 1)
    new_m = [tuple(r[:-1]) for r in aug_red if any(x != 0 for x in r[:-1])]
    new_v = [r[-1] for r in aug_red if any(x != 0 for x in r[:-1])]
    # middle moments must be determined by the outer ones for injectivity
    mid_rank = _rank(block, mm) if mm else 0
    # angles: unimodular row operations isolating the middle columns
    e = np.array([[int(r[c]) for c in range(width)] for r in arows], dtype=np.int64).reshape(len(arows), width)
    em = e[:, mid]
    if mm and e.size:
        sf = smith(em)
        u = np.asarray(sf.u, dtype=object)
        ue = (u @ e.astype(object)).astype(np.int64)
        keep = ue[sf.rank :][:, outer]
        invs = sf.invariants
        angle_rank = sf.rank
    else:
        keep = e[:, outer] if e.size else np.zeros((0, len(outer)), dtype=np.int64)
        invs = ()
        angle_rank = 0
    new_a = [tuple(int(x) for x in r) for r in keep if np.any(r)]
    rel = ToricRelation(a.source, b.target, tuple(new_m), tuple(new_v), tuple(new_a), f"{a.name} o {b.name}")
    if mid_rank < mm:
        return Elimination(rel, False, f"middle moments free in {mm - mid_rank} directions: projection not injective", None)
    if angle_rank < mm or any(d != 1 for d in invs):
        mult = int(np.prod([d for d in invs])) if angle_rank == mm else 0
        return Elimination(rel, False, f"middle angles not uniquely determined (multiplicity {mult or 'infinite'})", None)
    return Elimination(rel, True, "embedded", None)


def same_relation(a: ToricRelation, b: ToricRelation) -> bool:
    """Equality of the cut-out sets: equal rational row spans, equal values, equal saturated angle lattices."""
    if a.source != b.source or a.target != b.target:
        return False
    k = a.width
    ra = _rref([list(r) + [v] for r, v in zip(a.moment_rows, a.moment_values)], k + 1)[0]
    rb = _rref([list(r) + [v] for r, v in zip(b.moment_rows, b.moment_values)], k + 1)[0]
    if ra != rb:
        return False
    aa = _rref([list(map(Fraction, r)) for r in a.angle_rows], k)[0]
    ab = _rref([list(map(Fraction, r)) for r in b.angle_rows], k)[0]
    if aa != ab:
        return False
    for rel in (a, b):
        if rel.angle_rows and any(d != 1 for d in smith(np.array(rel.angle_rows, dtype=np.int64)).invariants):
            return False
    return True


def _solve_moments(rows: Sequence[Sequence[Fraction]], vals: Sequence[Fraction], k: int) -> list[Fraction]:
    aug = [list(r) + [v] for r, v in zip(rows, vals)]
    red, piv = _rref(aug, k + 1)
    if k in piv:
        raise ToricError("moment equations are inconsistent")
    if len(piv) < k:
        raise ToricError(f"moments are not determined ({k - len(piv)} free directions)")
    out = [Fraction(0)] * k
    for r, c in zip(red, piv):
        out[c] = r[-1]
    return out


def _torus_kernel(rows: NDArray[np.int64], k: int) -> NDArray[np.int64]:
    """Integer basis of the kernel lattice; the solution set of ``rows @ phi in Z`` is connected iff all invariant factors are one."""
    if rows.size == 0:
        return np.eye(k, dtype=np.int64)
    sf = smith(rows)
    if any(d != 1 for d in sf.invariants):
        raise ToricError("angle equations have a disconnected solution set")
    return np.asarray(np.asarray(sf.v, dtype=object)[:, sf.rank :], dtype=np.int64)


@dataclass(frozen=True)
class ToricComposition:
    relation: ToricRelation
    embedded: bool
    identified_as: str | None
    samples: int
    min_singular: float
    lagrangian_defect: float
    witness: dict[str, Any]


def _fiber_samples(a: ToricRelation, b: ToricRelation, rng: np.random.Generator, count: int):
    ma, mm, mb = a.source.m, a.target.m, b.target.m
    width = ma + mm + mb

    def lift_a(r: Sequence) -> list:
        return list(r) + [0] * mb

    def lift_b(r: Sequence) -> list:
        return [0] * ma + list(r)

    mrows = [lift_a(r) for r in a.moment_rows] + [lift_b(r) for r in b.moment_rows]
    mvals = list(a.moment_values) + list(b.moment_values)
    mu = np.array([float(x) for x in _solve_moments(mrows, mvals, width)])
    arows = np.array([lift_a(r) for r in a.angle_rows] + [lift_b(r) for r in b.angle_rows], dtype=np.int64).reshape(-1, width)
    kern = _torus_kernel(arows, width)
    for _ in range(count):
        phi = np.mod(kern @ rng.random(kern.shape[1]), 1.0)
        yield mu, phi


def compose_toric(
    a: ToricRelation, b: ToricRelation, rng: np.random.Generator | None = None, samples: int = 1000,
    known: Sequence[ToricRelation] = (),
) -> ToricComposition:
    """Compose two relations and verify the result at sampled fiber-product points.

    At each sample the tangent spaces are evaluated in affine charts, the fiber
    product is checked to be transverse by a rank test on the middle space, the
    composed point is checked against the eliminated relation and the middle
    point is recovered from the composed point to confirm injectivity.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    elim = compose_relations(a, b)
    ma, mm = a.source.m, a.target.m
    ident = next((k.name for k in known if same_relation(elim.relation, k)), None)
    if not elim.embedded:
        return ToricComposition(elim.relation, False, ident, 0, 0.0, float("nan"), {"reason": elim.reason})
    smin = np.inf
    defect = 0.0
    for mu, phi in _fiber_samples(a, b, rng, samples):
        mu_a, mu_b = mu[: ma + mm], mu[ma:]
        ph_a, ph_b = phi[: ma + mm], phi[ma:]
        ta = a.tangent_chart(mu_a, ph_a)
        tb = b.tangent_chart(mu_b, ph_b)
        if mm:
            mid = np.hstack([ta[2 * ma :], -tb[: 2 * mm]])
            s = float(np.linalg.svd(mid, compute_uv=False)[2 * mm - 1]) if mid.shape[1] >= 2 * mm else 0.0
            smin = min(smin, s)
            if s < 1e-7:
                return ToricComposition(elim.relation, False, ident, samples, s, defect, {"mu": mu.tolist(), "phi": phi.tolist()})
        za = _points(a.source, mu[:ma], phi[:ma])
        zm = _points(a.target, mu[ma : ma + mm], phi[ma : ma + mm])
        zb = _points(b.target, mu[ma + mm :], phi[ma + mm :])
        for rel, zs, zt in ((a, za, zm), (b, zm, zb)):
            t = rel.tangent_chart(*_aa(rel, zs, zt))
            if t.size:
                form = rel.ambient_form(zs, zt)
                defect = max(defect, float(np.abs(t.T @ form @ t).max() / max(1.0, np.abs(t).max() ** 2)))
        if not elim.relation.contains(za, zb, 1e-8):
            return ToricComposition(elim.relation, False, ident, samples, smin, defect, {"composed_point_off_relation": phi.tolist()})
        rec = _recover_middle(a, b, mu, phi)
        if rec is None or np.abs(np.mod(rec - phi[ma : ma + mm] + 0.5, 1.0) - 0.5).max() > 1e-8:
            return ToricComposition(elim.relation, False, ident, samples, smin, defect, {"non_injective_at": phi.tolist()})
    if defect > 1e-8:
        raise ToricError(f"Fubini-Study form does not vanish on sampled tangent spaces (defect {defect:.3g})")
    return ToricComposition(elim.relation, True, ident, samples, float(smin), defect, {})


def _points(sp: ToricSpace, mu: NDArray, phi: NDArray) -> NDArray[np.complex128]:
    return sp.point(mu, phi) if sp.m else np.ones(1, dtype=complex)


def _aa(rel: ToricRelation, zs: NDArray, zt: NDArray) -> tuple[NDArray, NDArray]:
    mus, phs = rel.source.action_angle(zs) if rel.source.m else (np.zeros(0), np.zeros(0))
    mut, pht = rel.target.action_angle(zt) if rel.target.m else (np.zeros(0), np.zeros(0))
    return np.concatenate([mus, mut]), np.concatenate([phs, pht])


def _recover_middle(a: ToricRelation, b: ToricRelation, mu: NDArray, phi: NDArray) -> NDArray | None:
    """Middle angles solved from the outer angles alone; ``None`` if not unique."""
    ma, mm, mb = a.source.m, a.target.m, b.target.m
    if mm == 0:
        return np.zeros(0)
    width = ma + mm + mb
    rows = [list(r) + [0] * mb for r in a.angle_rows] + [[0] * ma + list(r) for r in b.angle_rows]
    e = np.array(rows, dtype=np.int64).reshape(-1, width)
    mid = list(range(ma, ma + mm))
    outer = [c for c in range(width) if c not in mid]
    em = e[:, mid]
    sf = smith(em)
    if sf.rank < mm or any(d != 1 for d in sf.invariants):
        return None
    u = np.asarray(sf.u, dtype=object).astype(float)
    v = np.asarray(sf.v, dtype=object).astype(float)
    rhs = -(u @ (e[:, outer].astype(float) @ phi[outer]))
    y = rhs[:mm]
    return np.mod(v @ y, 1.0)


# sequences and generators


@dataclass(frozen=True)
class ToricSequence:
    """Cyclic sequence of torus-invariant relations starting and ending at the point."""

    relations: tuple[ToricRelation, ...]
    modulus: int = 2
    tau: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        rels = self.relations
        if not rels:
            raise ToricError("empty sequence")
        for j, r in enumerate(rels):
            nxt = rels[(j + 1) % len(rels)]
            if r.target != nxt.source:
                raise ToricError(f"relation {j} does not end where relation {(j + 1) % len(rels)} starts")

    @property
    def spaces(self) -> list[ToricSpace]:
        return [r.source for r in self.relations]

    @property
    def names(self) -> list[str]:
        return [r.name for r in self.relations]


@dataclass(frozen=True)
class ToricGenerator:
    points: tuple[tuple[complex, ...], ...]
    angles: tuple[Fraction, ...]
    index: int
    degree: int


@dataclass(frozen=True)
class CosineMorse:
    """``sum_i w_i cos(2 pi theta_i)``; critical points are ``{0, 1/2}^d``."""

    weights: tuple[int, ...]

    def value(self, theta: NDArray) -> float:
        return float(np.sum(np.asarray(self.weights) * np.cos(2 * np.pi * np.asarray(theta))))

    def hessian(self, theta: NDArray) -> NDArray[np.float64]:
        return np.diag(-((2 * np.pi) ** 2) * np.asarray(self.weights) * np.cos(2 * np.pi * np.asarray(theta)))

    def gradient(self, theta: NDArray) -> NDArray[np.float64]:
        return -2 * np.pi * np.asarray(self.weights) * np.sin(2 * np.pi * np.asarray(theta))

    def critical_points(self) -> list[tuple[Fraction, ...]]:
        return [tuple(p) for p in itertools.product((Fraction(0), Fraction(1, 2)), repeat=len(self.weights))]


@dataclass(frozen=True)
class CleanIntersection:
    """Generalized intersection of a toric sequence: fixed moments and a coordinate subtorus of angles."""

    sequence: ToricSequence
    moments: tuple[tuple[Fraction, ...], ...]
    classes: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.classes)

    def angles(self, theta: Sequence[float]) -> list[NDArray[np.float64]]:
        out = [np.zeros(sp.m) for sp in self.sequence.spaces]
        for t, cls in zip(theta, self.classes):
            for j, i in cls:
                out[j][i] = float(t)
        return out

    def points(self, theta: Sequence[float]) -> list[NDArray[np.complex128]]:
        return [_points(sp, np.array([float(x) for x in mu]), ph) for sp, mu, ph in zip(self.sequence.spaces, self.moments, self.angles(theta))]


def clean_intersection(seq: ToricSequence) -> CleanIntersection:
    """Solve the matching conditions in action-angle coordinates.

    Moments must be uniquely determined and the angle equations must identify
    coordinates pairwise, so that the solution set is a coordinate subtorus;
    each class of identified angles is one coordinate of it.
    """
    spaces = seq.spaces
    offs = [0]
    for sp in spaces:
        offs.append(offs[-1] + sp.m)
    width = offs[-1]
    r1 = len(spaces)
    mrows, mvals, arows = [], [], []
    for j, rel in enumerate(seq.relations):
        nxt = (j + 1) % r1
        cols = list(range(offs[j], offs[j + 1])) + list(range(offs[nxt], offs[nxt + 1]))
        for r, v in zip(rel.moment_rows, rel.moment_values):
            row = [Fraction(0)] * width
            for c, x in zip(cols, r):
                row[c] += x
            mrows.append(row)
            mvals.append(v)
        for r in rel.angle_rows:
            row = [0] * width
            for c, x in zip(cols, r):
                row[c] += int(x)
            arows.append(row)
    mu = _solve_moments(mrows, mvals, width)
    for j, sp in enumerate(spaces):
        block = mu[offs[j] : offs[j + 1]]
        if sp.m and (any(x <= 0 for x in block) or sum(block) >= sp.scale):
            raise ToricError(f"moments of manifold {j} leave the open moment simplex")
    parent = list(range(width))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for row in arows:
        nz = [(c, x) for c, x in enumerate(row) if x]
        if not nz:
            continue
        if len(nz) != 2 or nz[0][1] != -nz[1][1] or abs(nz[0][1]) != 1:
            raise ToricError("angle equations are not coordinate identifications", {"row": row})
        parent[find(nz[0][0])] = find(nz[1][0])
    groups: dict[int, list[tuple[int, int]]] = {}
    for j in range(r1):
        for i in range(spaces[j].m):
            groups.setdefault(find(offs[j] + i), []).append((j, i))
    classes = tuple(tuple(g) for _, g in sorted(groups.items(), key=lambda kv: kv[1][0]))
    moments = tuple(tuple(mu[offs[j] : offs[j + 1]]) for j in range(r1))
    return CleanIntersection(seq, moments, classes)


def _hessian_degree(hess: NDArray[np.float64], n_mod: int) -> int:
    """Degree of the zero section against the graph of a small multiple of a Hessian."""
    d = hess.shape[0]
    if d == 0:
        return 0
    sp = standard_space(d)
    base = np.vstack([np.eye(d), np.zeros((d, d))])
    g0 = grading.orientation_grading(sp, base, n_mod)
    eps = 0.1 / max(1.0, float(np.abs(hess).max()))

    def frames(ts: NDArray) -> NDArray:
        ts = np.asarray(ts, dtype=float)
        return np.stack([np.vstack([np.eye(d), t * eps * hess]) for t in ts])

    path = maslov.LagrangianPath(sp, frames)
    g1 = grading.transport(g0, path)
    return grading.degree(g0, g1)


def perturbed_generators(
    seq: ToricSequence | int, morse: CosineMorse | None = None, n_mod: int = 2
) -> list[ToricGenerator]:
    """Generators after a Morse perturbation of the clean intersection torus.

    An integer ``n`` stands for the Clifford pair in ``CP^n``.  The default
    function restricts ``sum cos(2 pi phi)`` over all angle coordinates of all
    components, which weights each intersection coordinate by its class size.
    Degrees come from the linearized perturbed pair at each critical point.
    """
    if isinstance(seq, (int, np.integer)):
        t = clifford(int(seq))
        seq = ToricSequence((t, t.transpose()), n_mod)
    ci = clean_intersection(seq)
    f = morse if morse is not None else CosineMorse(tuple(len(c) for c in ci.classes))
    if len(f.weights) != ci.dimension:
        raise ToricError(f"Morse function has {len(f.weights)} variables, intersection has dimension {ci.dimension}")
    gens = []
    for theta in f.critical_points():
        th = np.array([float(x) for x in theta])
        if np.abs(f.gradient(th)).max() > 1e-9:
            raise ToricError("critical point list contains a regular point", {"theta": [str(x) for x in theta]})
        hess = f.hessian(th)
        eig = np.linalg.eigvalsh(hess) if hess.size else np.zeros(0)
        if eig.size and np.abs(eig).min() < 1e-9:
            raise ToricError("degenerate critical point", {"theta": [str(x) for x in theta]})
        index = int((eig < 0).sum())
        pts = ci.points(th)
        gens.append(
            ToricGenerator(
                tuple(tuple(complex(x) for x in p) for p in pts), tuple(theta), index, _hessian_degree(hess, n_mod)
            )
        )
    for g in gens:
        if not _matches(seq, g):
            raise ToricError("generator violates a matching condition", {"angles": [str(x) for x in g.angles]})
    return gens


def _matches(seq: ToricSequence, g: ToricGenerator) -> bool:
    r1 = len(seq.relations)
    for j, rel in enumerate(seq.relations):
        zs = np.asarray(g.points[j])
        zt = np.asarray(g.points[(j + 1) % r1])
        if not rel.contains(zs, zt, 1e-8):
            return False
    return True


def index_distribution(gens: Sequence[ToricGenerator]) -> list[int]:
    d = max((g.index for g in gens), default=0)
    out = [0] * (d + 1)
    for g in gens:
        out[g.index] += 1
    return out


def degree_multiset(gens: Sequence[ToricGenerator]) -> list[int]:
    return sorted(g.degree for g in gens)


def compose_at(seq: ToricSequence, j: int) -> tuple[ToricSequence, Elimination]:
    """Compose the relations meeting at space ``j`` (``1 <= j < length``)."""
    r1 = len(seq.relations)
    if not 1 <= j < r1:
        raise ToricError(f"position must lie in [1, {r1 - 1}]")
    el = compose_relations(seq.relations[j - 1], seq.relations[j])
    if not el.embedded:
        raise ToricError(f"composition at {j} is not embedded: {el.reason}")
    rels = list(seq.relations)
    rels[j - 1] = el.relation
    del rels[j]
    return ToricSequence(tuple(rels), seq.modulus, seq.tau), el


def drop_point(g: ToricGenerator, j: int) -> tuple[tuple[complex, ...], ...]:
    pts = list(g.points)
    del pts[j]
    return tuple(pts)


def match_generators(
    before: Sequence[ToricGenerator], after: Sequence[ToricGenerator], mapping: Callable[[ToricGenerator], tuple]
) -> tuple[bool, str]:
    if len(before) != len(after):
        return False, f"generator counts differ: {len(before)} vs {len(after)}"
    used: set[int] = set()
    for g in before:
        img = mapping(g)
        hit = None
        for i, h in enumerate(after):
            if i in used or len(h.points) != len(img):
                continue
            if all(
                len(p) == len(q) and (len(p) <= 1 or ProjectivePoint.of(p).close_to(ProjectivePoint.of(q), 1e-8))
                for p, q in zip(img, h.points)
            ):
                hit = i
                break
        if hit is None:
            return False, f"image of generator at angles {[str(x) for x in g.angles]} is not a generator"
        if after[hit].degree != g.degree:
            return False, f"degree changes from {g.degree} to {after[hit].degree}"
        used.add(hit)
    return True, "ok"


def kunneth_split(seq: ToricSequence, j: int) -> tuple[ToricSequence, ToricSequence]:
    """Split at a relation ``j`` that is a product of Lagrangians of its source and target."""
    rel = seq.relations[j]
    ms = rel.source.m
    left_m, left_v, right_m, right_v = [], [], [], []
    for r, v in zip(rel.moment_rows, rel.moment_values):
        if any(r[ms:]) and any(r[:ms]):
            raise ToricError(f"relation {j} couples source and target moments")
        if any(r[:ms]):
            left_m.append(tuple(r[:ms]))
            left_v.append(v)
        else:
            right_m.append(tuple(r[ms:]))
            right_v.append(v)
    left_a, right_a = [], []
    for r in rel.angle_rows:
        if any(r[ms:]) and any(r[:ms]):
            raise ToricError(f"relation {j} couples source and target angles")
        (left_a if any(r[:ms]) else right_a).append(tuple(r[:ms]) if any(r[:ms]) else tuple(r[ms:]))
    left_rel = ToricRelation(rel.source, POINT_SPACE, tuple(left_m), tuple(left_v), tuple(left_a), f"{rel.name}[left]")
    right_rel = ToricRelation(POINT_SPACE, rel.target, tuple(right_m), tuple(right_v), tuple(right_a), f"{rel.name}[right]")
    if seq.relations[0].source.m:
        raise ToricError("splitting requires the sequence to start at the point")
    left = ToricSequence(seq.relations[:j] + (left_rel,), seq.modulus, seq.tau)
    right = ToricSequence((right_rel,) + seq.relations[j + 1 :], seq.modulus, seq.tau)
    return left, right


def zero_complex(gens: Sequence[ToricGenerator], n_mod: int = 2) -> GradedChainComplex:
    """Complex on the generators with the zero differential supplied as an oracle assumption."""
    return from_oracle(list(range(len(gens))), [g.degree for g in gens], n_mod, "zero")


def calc_chain(n: int, n_mod: int = 2) -> dict[str, Any]:
    """Generator-level walk through the reduction chain for the Clifford torus of ``CP^n``.

    Builds the four-term sequence, composes at ``CP^1`` and ``CP^{n-1}`` to reach
    the Clifford pair, composes at ``CP^n`` to reach the split middle term, and
    splits it into a tensor product of two Clifford pairs.  Every step checks
    the generator bijection and the degree multiset.
    """
    if n < 2:
        raise ToricError("the chain needs n >= 2")
    t1 = clifford(1, n)
    tn1 = clifford(n - 1, n)
    tn = clifford(n)
    s_top = sigma(2, n).relation()
    s_one = sigma_single(1, n).relation()
    four = ToricSequence((t1, s_top, s_one.transpose(), tn1.transpose()), n_mod)
    steps: list[dict[str, Any]] = []
    gens4 = perturbed_generators(four, n_mod=n_mod)

    def record(label: str, seq: ToricSequence, gens: Sequence[ToricGenerator], ok: bool = True, note: str = "") -> None:
        steps.append(
            {
                "step": label,
                "sequence": seq.names,
                "generators": len(gens),
                "degrees": degree_multiset(gens),
                "indices": index_distribution(gens),
                "ok": ok,
                "note": note,
            }
        )

    record("quilted", four, gens4)
    # compose at CP^1 then at CP^{n-1}
    s1, e1 = compose_at(four, 1)
    g1 = perturbed_generators(s1, n_mod=n_mod)
    ok1, msg1 = match_generators(gens4, g1, lambda g: drop_point(g, 1))
    ok1 = ok1 and same_relation(e1.relation, tn)
    s2, e2 = compose_at(s1, 2)
    g2 = perturbed_generators(s2, n_mod=n_mod)
    ok2, msg2 = match_generators(g1, g2, lambda g: drop_point(g, 2))
    ok2 = ok2 and same_relation(e2.relation, tn.transpose())
    record("compose outer", s2, g2, ok1 and ok2, f"{msg1}; {msg2}")
    # compose at CP^n
    s3, e3 = compose_at(four, 2)
    g3 = perturbed_generators(s3, n_mod=n_mod)
    ok3, msg3 = match_generators(gens4, g3, lambda g: drop_point(g, 2))
    ok3 = ok3 and same_relation(e3.relation, product_relation(t1, tn1))
    record("compose middle", s3, g3, ok3, msg3)
    # split
    left, right = kunneth_split(s3, 1)
    gl = perturbed_generators(left, n_mod=n_mod)
    gr = perturbed_generators(right, n_mod=n_mod)
    prod_degrees = sorted((a.degree + b.degree) % n_mod for a in gl for b in gr)
    ok4 = len(gl) * len(gr) == len(g3) and prod_degrees == degree_multiset(g3)
    pairs_ok = True
    for g in g3:
        lp = (g.points[0], g.points[1])
        rp = ((1.0 + 0j,), g.points[2])
        hit_l = [a for a in gl if all(ProjectivePoint.of(p).close_to(ProjectivePoint.of(q)) for p, q in zip(lp, a.points))]
        hit_r = [b for b in gr if all(ProjectivePoint.of(p).close_to(ProjectivePoint.of(q)) for p, q in zip(rp, b.points))]
        if len(hit_l) != 1 or len(hit_r) != 1 or (hit_l[0].degree + hit_r[0].degree) % n_mod != g.degree:
            pairs_ok = False
    record("split", s3, g3, ok4 and pairs_ok, f"{len(gl)} x {len(gr)}")
    steps.append(
        {
            "step": "tensor factors",
            "sequence": [left.names, right.names],
            "generators": len(gl) * len(gr),
            "degrees": prod_degrees,
            "indices": [index_distribution(gl), index_distribution(gr)],
            "ok": ok4,
            "note": "",
        }
    )
    counts = {s["generators"] for s in steps}
    ok = all(s["ok"] for s in steps) and counts == {2**n}
    return {"n": n, "N": n_mod, "ok": ok, "steps": steps}
