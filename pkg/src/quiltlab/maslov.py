"""Crossings and Maslov indices of pairs of Lagrangian paths.

Paths are batched: ``frames(ts)`` returns an array of shape ``(m, 2n, n)`` in
the native coordinates of the ambient space.  The index of a pair is the
signed count of crossings, with the crossing form taken as the first path's
form minus the second's and endpoint crossings weighted by one half.  With
this order the positive rotation ``e^{i pi t} R`` measured against the fixed
line ``R`` has index ``+1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
from numpy.typing import NDArray
from scipy.optimize import minimize_scalar

from .symplinalg import (
    LagrangianFrame,
    SymplecticError,
    SymplecticSpace,
    Subspace,
    det2_phases,
    lagrangian_defect,
    orthonormalize,
    product,
    standard_complex_structure,
    standard_form,
    subspace_distance,
    unitary_of,
)

FrameFn = Callable[[NDArray[np.float64]], NDArray[np.float64]]

CROSSING_TOL = 1e-6
ENDPOINT_SNAP = 1e-8
ENDPOINT_TOL = 1e-7
FD_STEP = 1e-5
IRREGULAR_RTOL = 1e-6
CONTINUITY_GUARD = 0.2
REFINE_BELOW = 0.05
REFINE_SAFETY = 2.0
MAX_BISECTIONS = 40
MIN_INTERVAL = 1e-10


class IrregularCrossing(ArithmeticError):
    """A crossing whose form is degenerate; perturb one path and retry."""

    def __init__(self, record: "CrossingRecord") -> None:
        super().__init__(f"irregular crossing at s={record.s:.12g} with form eigenvalues {np.linalg.eigvalsh(record.form)}")
        self.record = record


class ContinuityError(ValueError):
    pass


class LagrangianPath:
    """A path ``[0, 1] -> Lag(V)`` given by a batched frame function."""

    def __init__(self, ambient: SymplecticSpace, frames_fn: FrameFn, resolution: int = 512) -> None:
        if resolution < 2:
            raise ValueError("resolution must be at least 2")
        self.ambient = ambient
        self._fn = frames_fn
        self.resolution = resolution

    def frames(self, ts: NDArray | Sequence[float]) -> NDArray[np.float64]:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        out = np.asarray(self._fn(ts), dtype=float)
        return out.reshape(ts.size, self.ambient.dim, self.ambient.n)

    def std_frames(self, ts: NDArray | Sequence[float]) -> NDArray[np.float64]:
        """Orthonormal frames in standard coordinates."""
        f = self.frames(ts)
        if not self.ambient.is_standard:
            f = self.ambient.to_std @ f
        q, _ = np.linalg.qr(f)
        return q

    def __call__(self, t: float) -> LagrangianFrame:
        return LagrangianFrame(self.ambient, self.frames([t])[0])

    def check(self, samples: int | None = None, tol: float = 1e-8) -> None:
        """Validate the Lagrangian invariant and the continuity guard on samples."""
        m = samples or self.resolution
        ts = np.linspace(0.0, 1.0, m + 1)
        q = self.std_frames(ts)
        n = self.ambient.n
        if n == 0:
            return
        om = standard_form(n)
        worst = np.abs(np.einsum("mji,jk,mkl->mil", q, om, q)).max()
        if worst > tol:
            raise SymplecticError(f"path leaves the Lagrangian Grassmannian (defect {worst:.3g})")
        for i in range(m):
            d = subspace_distance(q[i], q[i + 1])
            if d >= CONTINUITY_GUARD:
                raise ContinuityError(f"consecutive samples {ts[i]:.6g}, {ts[i + 1]:.6g} are {d:.3g} apart")


def constant(lag: LagrangianFrame) -> LagrangianPath:
    f = lag.frame.copy()
    return LagrangianPath(lag.ambient, lambda ts: np.broadcast_to(f, (len(ts),) + f.shape).copy())


def _rotation_std(n: int, phis: NDArray) -> NDArray[np.float64]:
    """Stack of ``cos(phi) I + sin(phi) J`` in standard coordinates."""
    eye, j = np.eye(2 * n), standard_complex_structure(n)
    return np.cos(phis)[:, None, None] * eye + np.sin(phis)[:, None, None] * j


def rotation(lag: LagrangianFrame, angle: float = np.pi) -> LagrangianPath:
    """``t -> e^{i angle t} lag`` using the compatible complex structure."""
    sp = lag.ambient
    g = sp.to_std @ lag.frame

    def fn(ts: NDArray) -> NDArray:
        rot = _rotation_std(sp.n, angle * ts)
        return sp.from_std @ (rot @ g)

    return LagrangianPath(sp, fn)


def unitary_path(sp: SymplecticSpace, fn: Callable[[NDArray], NDArray[np.complex128]]) -> LagrangianPath:
    """Path ``t -> U(t) R^n`` for a batched unitary-valued function in standard coordinates."""

    def frames(ts: NDArray) -> NDArray:
        u = fn(ts)
        f = np.concatenate([u.real, u.imag], axis=1)
        return f if sp.is_standard else sp.from_std @ f

    return LagrangianPath(sp, frames)


def _real_orthogonal_diagonalizer(s: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Real orthogonal ``P`` diagonalizing a symmetric unitary ``S``."""
    x, y = s.real, s.imag
    x, y = (x + x.T) / 2, (y + y.T) / 2
    # commuting real symmetric parts share a real eigenbasis; any single combination can
    # merge distinct eigenphases, so near-equal clusters are re-split by cos and then sin
    combos = [x + np.sqrt(2.0) * y + np.e * (x @ y + y @ x) / 2, x, y]
    return _refine(np.eye(len(s)), combos)


def _refine(basis: NDArray[np.float64], combos: list[NDArray[np.float64]], tol: float = 1e-6) -> NDArray[np.float64]:
    if basis.shape[1] < 2 or not combos:
        return basis
    vals, vecs = np.linalg.eigh(basis.T @ combos[0] @ basis)
    p = basis @ vecs
    out = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > tol:
            out.append(_refine(p[:, start:i], combos[1:], tol) if i - start > 1 else p[:, start:i])
            start = i
    return np.hstack(out)


def geodesic_data(sp: SymplecticSpace, fa: NDArray, fb: NDArray) -> tuple[NDArray[np.complex128], NDArray[np.float64]]:
    """``(W, beta)`` with ``W`` unitary, ``W R^n = a`` and ``W diag(e^{i beta}) R^n = b``; ``beta`` in ``(-pi/2, pi/2]``."""
    ua, ub = unitary_of(sp, fa), unitary_of(sp, fb)
    w = ua.conj().T @ ub
    s = w @ w.T
    p = _real_orthogonal_diagonalizer(s)
    d = np.diag(p.T @ s @ p)
    beta = np.angle(d) / 2
    beta = np.where(beta <= -np.pi / 2 + 1e-15, beta + np.pi, beta)
    return ua @ p, beta


def geodesic(
    sp: SymplecticSpace,
    fa: NDArray,
    fb: NDArray,
    windings: Sequence[int] | NDArray | None = None,
) -> LagrangianPath:
    """Path from ``a`` to ``b`` rotating each principal direction, plus ``windings`` extra half turns."""
    w, beta = geodesic_data(sp, fa, fb)
    if windings is not None:
        beta = beta + np.pi * np.asarray(windings, dtype=float)

    def fn(ts: NDArray) -> NDArray[np.complex128]:
        ph = np.exp(1j * ts[:, None] * beta[None, :])
        return w[None, :, :] * ph[:, None, :]

    return unitary_path(sp, fn)


def sampled(sp: SymplecticSpace, frames: Sequence[NDArray]) -> LagrangianPath:
    """Piecewise geodesic interpolation of frames at equally spaced parameters."""
    if len(frames) < 2:
        raise ValueError("need at least two samples")
    segs = [geodesic(sp, frames[i], frames[i + 1]) for i in range(len(frames) - 1)]
    return concat(*segs)


def concat(*paths: LagrangianPath) -> LagrangianPath:
    """Concatenation on equal subintervals; endpoints must match."""
    if not paths:
        raise ValueError("nothing to concatenate")
    sp = paths[0].ambient
    k = len(paths)
    for a, b in zip(paths, paths[1:]):
        if subspace_distance(a.frames([1.0])[0], b.frames([0.0])[0]) > 1e-8:
            raise ContinuityError("paths do not join")

    def fn(ts: NDArray) -> NDArray:
        idx = np.minimum((ts * k).astype(int), k - 1)
        local = ts * k - idx
        out = np.empty((ts.size, sp.dim, sp.n))
        for i, p in enumerate(paths):
            sel = idx == i
            if sel.any():
                out[sel] = orthonormalize_stack(p.frames(local[sel]))
        return out

    return LagrangianPath(sp, fn, resolution=max(p.resolution for p in paths) * k)


def orthonormalize_stack(f: NDArray) -> NDArray:
    q, _ = np.linalg.qr(f)
    return q


def reverse(path: LagrangianPath) -> LagrangianPath:
    return LagrangianPath(path.ambient, lambda ts: path.frames(1.0 - ts), path.resolution)


def reparametrize(path: LagrangianPath, phi: Callable[[NDArray], NDArray]) -> LagrangianPath:
    """``t -> path(phi(t))`` for a monotone bijection ``phi`` of ``[0, 1]``."""
    return LagrangianPath(path.ambient, lambda ts: path.frames(np.clip(phi(ts), 0.0, 1.0)), path.resolution)


def product_path(*paths: LagrangianPath) -> LagrangianPath:
    sp = product(*[p.ambient for p in paths])

    def fn(ts: NDArray) -> NDArray:
        out = np.zeros((ts.size, sp.dim, sp.n))
        r = c = 0
        for p in paths:
            f = p.frames(ts)
            out[:, r : r + f.shape[1], c : c + f.shape[2]] = f
            r += f.shape[1]
            c += f.shape[2]
        return out

    return LagrangianPath(sp, fn, max(p.resolution for p in paths))


def transform(s: NDArray, path: LagrangianPath) -> LagrangianPath:
    """Image of a path under a linear symplectomorphism of its ambient space."""
    s = np.asarray(s, dtype=float)
    return LagrangianPath(path.ambient, lambda ts: s @ path.frames(ts), path.resolution)


def perturb(path: LagrangianPath, eps: float = 1e-4) -> LagrangianPath:
    """Rotate a path by ``e^{eps J}``; used to remove irregular crossings."""
    sp = path.ambient
    rot = sp.from_std @ _rotation_std(sp.n, np.array([eps]))[0] @ sp.to_std
    return transform(rot, path)


@dataclass(frozen=True)
class CrossingRecord:
    s: float
    kernel: Subspace
    form: NDArray[np.float64]
    signature: int
    endpoint: bool
    regular: bool


def _sigma_min(q0: NDArray, q1: NDArray, n: int) -> NDArray[np.float64]:
    m = np.swapaxes(q0, 1, 2) @ (standard_form(n) @ q1)
    return np.linalg.svd(m, compute_uv=False)[:, -1]


def _pair_sigma(g0: LagrangianPath, g1: LagrangianPath, ts: NDArray) -> NDArray[np.float64]:
    return _sigma_min(g0.std_frames(ts), g1.std_frames(ts), g0.ambient.n)


def _step_gaps(q: NDArray) -> NDArray[np.float64]:
    """Gap distance between consecutive orthonormal frames of a stack."""
    resid = q[1:] - q[:-1] @ (np.swapaxes(q[:-1], 1, 2) @ q[1:])
    return np.linalg.norm(resid, ord=2, axis=(1, 2))


def _sample_grid(g0: LagrangianPath, g1: LagrangianPath) -> tuple[NDArray, NDArray]:
    """Samples of the smallest singular value, bisected wherever a zero cannot be excluded.

    The smallest singular value is 1-Lipschitz in the gap distance of either
    path, so an interval may contain a zero only if ``sig_i + sig_{i+1}``
    does not exceed the combined movement of the two paths across it.
    """
    res = max(g0.resolution, g1.resolution)
    ts = np.linspace(0.0, 1.0, res + 1)
    q0, q1 = g0.std_frames(ts), g1.std_frames(ts)
    sig = _sigma_min(q0, q1, g0.ambient.n)
    lip = REFINE_SAFETY * (_step_gaps(q0) + _step_gaps(q1)) * res + 1e-9
    for _ in range(MAX_BISECTIONS):
        h = np.diff(ts)
        cand = np.flatnonzero((sig[:-1] + sig[1:] <= lip * h) & (h > MIN_INTERVAL))
        if cand.size == 0:
            break
        mids = (ts[cand] + ts[cand + 1]) / 2
        ts = np.insert(ts, cand + 1, mids)
        sig = np.insert(sig, cand + 1, _pair_sigma(g0, g1, mids))
        lip = np.insert(lip, cand + 1, lip[cand])
    return ts, sig


def _locate(g0: LagrangianPath, g1: LagrangianPath) -> list[float]:
    ts, sig = _sample_grid(g0, g1)
    found: list[float] = []
    m = ts.size
    for i in range(m):
        left = sig[i - 1] if i > 0 else np.inf
        right = sig[i + 1] if i < m - 1 else np.inf
        if not (sig[i] <= left and sig[i] <= right and sig[i] < REFINE_BELOW):
            continue
        lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, m - 1)]
        res = minimize_scalar(
            lambda t: float(_pair_sigma(g0, g1, np.array([t]))[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12, "maxiter": 200},
        )
        best_t, best_v = float(res.x), float(res.fun)
        if sig[i] < best_v:
            best_t, best_v = float(ts[i]), float(sig[i])
        if best_v >= CROSSING_TOL:
            continue
        found.append(best_t)
    s0, s1 = _pair_sigma(g0, g1, np.array([0.0, 1.0]))
    snapped: list[float] = []
    for t in found:
        if t < ENDPOINT_SNAP and s0 < ENDPOINT_TOL:
            t = 0.0
        elif t > 1.0 - ENDPOINT_SNAP and s1 < ENDPOINT_TOL:
            t = 1.0
        snapped.append(t)
    if s0 < ENDPOINT_TOL:
        snapped.append(0.0)
    if s1 < ENDPOINT_TOL:
        snapped.append(1.0)
    snapped.sort()
    out: list[float] = []
    for t in snapped:
        if out and abs(t - out[-1]) < 1e-7:
            if t in (0.0, 1.0):
                out[-1] = t
            continue
        out.append(t)
    return out


def _graph_coefficients(base: NDArray, frames: NDArray, n: int) -> NDArray[np.float64]:
    """Symmetric ``A`` with ``frame = {Q x + J Q A x}`` relative to the orthonormal ``base``."""
    jq = standard_complex_structure(n) @ base
    x = base.T @ frames
    y = jq.T @ frames
    return y @ np.linalg.inv(x)


def _graph_derivative(path: LagrangianPath, s: float, base: NDArray) -> NDArray[np.float64]:
    n = path.ambient.n
    h = FD_STEP

    def a(ts: Sequence[float]) -> NDArray:
        return _graph_coefficients(base, path.std_frames(np.array(ts)), n)

    if s - 2 * h >= 0.0 and s + 2 * h <= 1.0:
        am2, am1, ap1, ap2 = a([s - h, s - h / 2, s + h / 2, s + h])
        d1 = (ap2 - am2) / (2 * h)
        d2 = (ap1 - am1) / h
        d = (4 * d2 - d1) / 3
    elif s - 2 * h < 0.0:
        a1, a2, a3, a4 = a([s + h / 2, s + h, s + 3 * h / 2, s + 2 * h])
        d1 = (4 * a2 - a4) / (2 * h)
        d2 = (4 * a1 - a2) / h
        d = (4 * d2 - d1) / 3
    else:
        a1, a2, a3, a4 = a([s - h / 2, s - h, s - 3 * h / 2, s - 2 * h])
        d1 = -(4 * a2 - a4) / (2 * h)
        d2 = -(4 * a1 - a2) / h
        d = (4 * d2 - d1) / 3
    return (d + d.T) / 2


def crossing_record(g0: LagrangianPath, g1: LagrangianPath, s: float) -> CrossingRecord:
    """Kernel and crossing form of the pair at parameter ``s``."""
    sp = g0.ambient
    n = sp.n
    q0 = g0.std_frames([s])[0]
    q1 = g1.std_frames([s])[0]
    m = q0.T @ standard_form(n) @ q1
    _, sv, vt = np.linalg.svd(m)
    k = int(np.sum(sv < np.sqrt(CROSSING_TOL) * 1e-2)) or 1
    kern = orthonormalize(q1 @ vt[-k:].T)
    c0 = q0.T @ kern
    c1 = q1.T @ kern
    form = c0.T @ _graph_derivative(g0, s, q0) @ c0 - c1.T @ _graph_derivative(g1, s, q1) @ c1
    form = (form + form.T) / 2
    eig = np.linalg.eigvalsh(form)
    regular = bool(np.abs(eig).min() >= IRREGULAR_RTOL * max(1.0, np.abs(eig).max()))
    sig = int(np.sum(eig > 0) - np.sum(eig < 0))
    native = kern if sp.is_standard else sp.from_std @ kern
    return CrossingRecord(
        s=float(s),
        kernel=Subspace(sp, native),
        form=form,
        signature=sig,
        endpoint=s in (0.0, 1.0),
        regular=regular,
    )


def find_crossings(g0: LagrangianPath, g1: LagrangianPath) -> list[CrossingRecord]:
    if g0.ambient.dim != g1.ambient.dim:
        raise SymplecticError("paths live in different spaces")
    if g0.ambient.n == 0:
        return []
    return [crossing_record(g0, g1, s) for s in _locate(g0, g1)]


def _ensure_path(x: LagrangianPath | LagrangianFrame) -> LagrangianPath:
    return x if isinstance(x, LagrangianPath) else constant(x)


def rs_index(g0: LagrangianPath | LagrangianFrame, g1: LagrangianPath | LagrangianFrame) -> Fraction:
    """Maslov index of a pair of paths as an exact half-integer."""
    g0, g1 = _ensure_path(g0), _ensure_path(g1)
    total = Fraction(0)
    for rec in find_crossings(g0, g1):
        if not rec.regular:
            raise IrregularCrossing(rec)
        total += Fraction(rec.signature, 2) if rec.endpoint else rec.signature
    return total


def rs_index_interior(path: LagrangianPath, lag: LagrangianFrame | LagrangianPath) -> int:
    """Sum of crossing signatures of ``path`` against ``lag`` away from the endpoints."""
    other = _ensure_path(lag)
    total = 0
    for rec in find_crossings(path, other):
        if rec.endpoint:
            continue
        if not rec.regular:
            raise IrregularCrossing(rec)
        total += rec.signature
    return total


def winding_lift(path: LagrangianPath, samples: int | None = None) -> float:
    """Total change of ``arg det(X + iY)^2 / 2 pi`` along the path."""
    sp = path.ambient
    if sp.n == 0:
        return 0.0
    m = samples or path.resolution
    ts = np.linspace(0.0, 1.0, m + 1)
    return float(_lift(path, ts, det2_phases(sp, path.frames(ts)), depth=0))


def _lift(path: LagrangianPath, ts: NDArray, ph: NDArray, depth: int) -> float:
    jumps = np.angle(ph[1:] / ph[:-1])
    bad = np.flatnonzero(np.abs(jumps) > np.pi / 2)
    if bad.size == 0 or depth > 20:
        return float(jumps.sum() / (2 * np.pi))
    total = 0.0
    start = 0
    for i in bad:
        total += float(jumps[start:i].sum())
        sub = np.linspace(ts[i], ts[i + 1], 17)
        total += 2 * np.pi * _lift(path, sub, det2_phases(path.ambient, path.frames(sub)), depth + 1)
        start = i + 1
    total += float(jumps[start:].sum())
    return total / (2 * np.pi)


def skew_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> NDArray[np.complex128]:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (z - z.conj().T) / 2


def _expm_skew(a: NDArray[np.complex128], coeffs: NDArray) -> NDArray[np.complex128]:
    """Batched ``exp(c a)`` for skew-Hermitian ``a`` via one eigendecomposition."""
    w, v = np.linalg.eigh(-1j * a)
    ph = np.exp(1j * coeffs[:, None] * w[None, :])
    return np.einsum("ij,mj,kj->mik", v, ph, v.conj())


def random_loop(n: int, rng: np.random.Generator, max_wind: int = 2) -> tuple[LagrangianPath, int]:
    """Random smooth loop of Lagrangians with known Maslov index.

    Returns ``(path, index)`` for ``U(t) = P(t) diag(e^{i pi m t}) O`` with ``P``
    a contractible unitary loop.
    """
    from .symplinalg import random_unitary, standard_space

    a = skew_hermitian(n, rng)
    b = skew_hermitian(n, rng)
    # zero trace keeps det P(t) = 1
    a -= np.trace(a) / n * np.eye(n)
    b -= np.trace(b) / n * np.eye(n)
    m = rng.integers(-max_wind, max_wind + 1, size=n)
    o = sla.qr(rng.standard_normal((n, n)))[0]
    base = random_unitary(n, rng)

    def fn(ts: NDArray) -> NDArray[np.complex128]:
        pa = _expm_skew(a, np.sin(2 * np.pi * ts))
        pb = _expm_skew(b, 1.0 - np.cos(2 * np.pi * ts))
        d = np.exp(1j * np.pi * ts[:, None] * m[None, :])
        return base[None] @ pa @ pb @ (d[:, :, None] * o[None])

    return unitary_path(standard_space(n), fn), int(m.sum())


def loop_check(path: LagrangianPath, tol: float = 1e-8) -> bool:
    f = path.frames([0.0, 1.0])
    return subspace_distance(f[0], f[1]) < tol


def path_lagrangian_defect(path: LagrangianPath, ts: NDArray) -> float:
    return max(lagrangian_defect(path.ambient, f) for f in path.frames(ts))
