"""Linear symplectic algebra.

A :class:`SymplecticSpace` is ``R^{2n}`` with an antisymmetric invertible
form matrix ``W``, so that ``omega(u, v) = u @ W @ v``.  Every space also
carries a linear symplectomorphism ``to_std`` onto the standard space, in
which coordinates are laid out as ``(x_1..x_n, y_1..y_n)`` and the form is
``[[0, I], [-I, 0]]``.  Numerical work that needs a compatible complex
structure (unitary frames, determinant phases, crossing forms) happens in
those standard coordinates, where ``J = [[0, -I], [I, 0]]`` is
multiplication by ``i`` on ``z = x + i y``.

Products keep the native coordinates of their factors concatenated, so the
frame of a product Lagrangian is the block-diagonal stack of the factor
frames.  The factor list of a space is retained to make factor
permutations explicit.
"""

from __future__ import annotations

import functools
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as sla
from numpy.typing import NDArray

LAGRANGIAN_TOL = 1e-9
RANK_TOL = 1e-9

ISOTROPIC = "isotropic"
COISOTROPIC = "coisotropic"
LAGRANGIAN = "lagrangian"
SYMPLECTIC = "symplectic"
NONE = "none"


class SymplecticError(ValueError):
    """Raised on malformed symplectic data."""


def standard_form(n: int) -> NDArray[np.float64]:
    """Return the ``2n x 2n`` standard form matrix ``[[0, I], [-I, 0]]``."""
    w = np.zeros((2 * n, 2 * n))
    w[:n, n:] = np.eye(n)
    w[n:, :n] = -np.eye(n)
    return w


def standard_complex_structure(n: int) -> NDArray[np.float64]:
    return -standard_form(n)


def _frozen(a: NDArray) -> NDArray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _interleave_perm(halves: Sequence[int]) -> NDArray[np.int64]:
    """Row order taking stacked per-factor ``(x_i, y_i)`` blocks to ``(x..., y...)``."""
    xs, ys = [], []
    offset = 0
    for n in halves:
        xs.extend(range(offset, offset + n))
        ys.extend(range(offset + n, offset + 2 * n))
        offset += 2 * n
    return np.array(xs + ys, dtype=np.int64)


def _darboux(form: NDArray[np.float64]) -> NDArray[np.float64]:
    """A matrix ``T`` with ``T.T @ standard_form @ T == form``."""
    dim = form.shape[0]
    n = dim // 2
    if n == 0:
        return np.zeros((0, 0))
    s, q = sla.schur(form, output="real")
    basis_x, basis_y = [], []
    i = 0
    while i < dim:
        b = s[i, i + 1]
        qa, qb = q[:, i], q[:, i + 1]
        if b < 0:
            qa, qb, b = qb, qa, -b
        scale = 1.0 / np.sqrt(b)
        basis_x.append(qa * scale)
        basis_y.append(qb * scale)
        i += 2
    inv = np.column_stack(basis_x + basis_y)
    t = np.linalg.inv(inv)
    if not np.allclose(t.T @ standard_form(n) @ t, form, atol=1e-10 * max(1.0, np.abs(form).max())):
        raise SymplecticError("could not bring the form to standard shape")
    return t


class SymplecticSpace:
    """A symplectic vector space in fixed native coordinates.

    Args:
        form: antisymmetric invertible ``2n x 2n`` matrix.
        to_std: optional ``T`` with ``T.T @ Omega_std @ T == form``.  Computed
            from a real Schur decomposition when omitted.
        factors: atomic factor spaces for products; ``None`` marks an atomic space.
    """

    __slots__ = ("form", "to_std", "_factors", "_from_std", "_j")

    def __init__(
        self,
        form: NDArray[np.float64],
        to_std: NDArray[np.float64] | None = None,
        factors: tuple["SymplecticSpace", ...] | None = None,
    ) -> None:
        form = np.asarray(form, dtype=float)
        if form.ndim != 2 or form.shape[0] != form.shape[1]:
            raise SymplecticError("form must be a square matrix")
        dim = form.shape[0]
        if dim % 2:
            raise SymplecticError(f"odd dimension {dim}")
        scale = max(1.0, float(np.abs(form).max())) if dim else 1.0
        if dim and not np.allclose(form, -form.T, atol=1e-12 * scale):
            raise SymplecticError("form is not antisymmetric")
        if dim and np.linalg.cond(form) > 1e12:
            raise SymplecticError("form is degenerate")
        if to_std is None:
            to_std = np.eye(dim) if _is_standard(form) else _darboux(form)
        else:
            to_std = np.asarray(to_std, dtype=float)
            if to_std.shape != form.shape or (
                dim and not np.allclose(to_std.T @ standard_form(dim // 2) @ to_std, form, atol=1e-10 * scale)
            ):
                raise SymplecticError("to_std does not carry the form to standard shape")
        self.form = _frozen(form)
        self.to_std = _frozen(to_std)
        self._factors = factors
        self._from_std = None
        self._j = None

    @classmethod
    def from_hermitian(cls, h: NDArray[np.complex128], scale: float = 1.0) -> "SymplecticSpace":
        """Space ``C^n`` with ``omega(u, v) = scale * Im(u^H h v)`` for Hermitian positive ``h``.

        The stored ``to_std`` is complex linear, so determinant phases agree with
        those of the chart's own complex coordinates.
        """
        h = np.asarray(h, dtype=complex)
        n = h.shape[0]
        a, b = h.real, h.imag
        form = scale * np.block([[b, a], [-a, b]])
        w, v = np.linalg.eigh((h + h.conj().T) / 2)
        if n and w.min() <= 0:
            raise SymplecticError("Hermitian matrix is not positive definite")
        r = np.sqrt(scale) * (v * np.sqrt(w)) @ v.conj().T
        t = np.block([[r.real, -r.imag], [r.imag, r.real]])
        return cls(form, to_std=t)

    @property
    def dim(self) -> int:
        return self.form.shape[0]

    @property
    def n(self) -> int:
        return self.form.shape[0] // 2

    @property
    def factors(self) -> tuple["SymplecticSpace", ...]:
        return (self,) if self._factors is None else self._factors

    @property
    def from_std(self) -> NDArray[np.float64]:
        if self._from_std is None:
            self._from_std = _frozen(np.linalg.inv(self.to_std) if self.dim else np.zeros((0, 0)))
        return self._from_std

    @property
    def complex_structure(self) -> NDArray[np.float64]:
        """Compatible complex structure in native coordinates."""
        if self._j is None:
            self._j = _frozen(self.from_std @ standard_complex_structure(self.n) @ self.to_std)
        return self._j

    @property
    def is_standard(self) -> bool:
        return self._factors is None and _is_standard(self.form)

    def omega(self, u: NDArray, v: NDArray) -> NDArray:
        return np.asarray(u).T @ self.form @ np.asarray(v)

    def __repr__(self) -> str:
        kind = "standard" if self.is_standard else "nonstandard"
        return f"SymplecticSpace(n={self.n}, {kind}, factors={len(self.factors)})"


def _is_standard(form: NDArray) -> bool:
    return form.shape[0] % 2 == 0 and np.array_equal(form, standard_form(form.shape[0] // 2))


@functools.lru_cache(maxsize=64)
def standard_space(n: int) -> SymplecticSpace:
    """``R^{2n}`` with the standard form; ``n = 0`` gives the point space.  Shared instances."""
    if n < 0:
        raise SymplecticError("negative dimension")
    return SymplecticSpace(standard_form(n), np.eye(2 * n))


POINT = standard_space(0)


def dual(sp: SymplecticSpace) -> SymplecticSpace:
    """Same space with negated form."""
    n = sp.n
    flip = np.concatenate([np.ones(n), -np.ones(n)])
    factors = None if sp._factors is None else tuple(dual(f) for f in sp._factors)
    out = SymplecticSpace.__new__(SymplecticSpace)
    out.form = _frozen(-sp.form)
    out.to_std = _frozen(flip[:, None] * sp.to_std)
    out._factors = factors
    out._from_std = None
    out._j = None
    return out


def product(*spaces: SymplecticSpace) -> SymplecticSpace:
    """Direct sum with block-diagonal form; native coordinates are concatenated."""
    atoms: list[SymplecticSpace] = []
    for sp in spaces:
        atoms.extend(sp.factors)
    if len(atoms) == 1:
        return atoms[0]
    form = block_diag_frames(*[a.form for a in atoms])
    halves = [a.n for a in atoms]
    t = block_diag_frames(*[a.to_std for a in atoms])
    t = t[_interleave_perm(halves)]
    out = SymplecticSpace.__new__(SymplecticSpace)
    out.form = _frozen(form)
    out.to_std = _frozen(t)
    out._factors = tuple(atoms)
    out._from_std = None
    out._j = None
    return out


def factor_offsets(sp: SymplecticSpace) -> list[int]:
    offs = [0]
    for f in sp.factors:
        offs.append(offs[-1] + f.dim)
    return offs


def permutation_rows(sp: SymplecticSpace, order: Sequence[int]) -> NDArray[np.int64]:
    """Row indices mapping native coordinates of ``sp`` to those of its factors reordered."""
    offs = factor_offsets(sp)
    if sorted(order) != list(range(len(sp.factors))):
        raise SymplecticError(f"{list(order)} is not a permutation of {len(sp.factors)} factors")
    rows: list[int] = []
    for i in order:
        rows.extend(range(offs[i], offs[i + 1]))
    return np.array(rows, dtype=np.int64)


def permute(sp: SymplecticSpace, order: Sequence[int]) -> SymplecticSpace:
    return product(*[sp.factors[i] for i in order])


def same_space(a: SymplecticSpace, b: SymplecticSpace, tol: float = 1e-12) -> bool:
    if a.dim != b.dim:
        return False
    if a.dim == 0 or a is b:
        return True
    if np.array_equal(a.form, b.form) and np.array_equal(a.to_std, b.to_std):
        return True
    return bool(np.allclose(a.form, b.form, atol=tol) and np.allclose(a.to_std, b.to_std, atol=tol))


def orthonormalize(basis: NDArray[np.float64]) -> NDArray[np.float64]:
    """Orthonormal basis of the column span of a full-rank matrix."""
    basis = np.asarray(basis, dtype=float)
    if basis.shape[1] == 0:
        return basis.copy()
    q, _ = np.linalg.qr(basis)
    return q


def numerical_rank(a: NDArray, tol: float = RANK_TOL) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def null_space(a: NDArray, tol: float = RANK_TOL) -> NDArray[np.float64]:
    """Orthonormal basis of the right kernel, using a relative singular value cutoff."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] == 0:
        return np.eye(a.shape[1])
    if a.shape[1] == 0:
        return np.zeros((0, 0))
    u, s, vt = np.linalg.svd(a)
    scale = max(1.0, s[0]) if s.size else 1.0
    rank = int(np.sum(s > tol * scale))
    return vt[rank:].T.copy()


def intersect_spans(p: NDArray, q: NDArray, tol: float = 1e-7) -> NDArray[np.float64]:
    """Orthonormal basis of ``span(p) ∩ span(q)`` for matrices with orthonormal columns."""
    if p.shape[1] == 0 or q.shape[1] == 0:
        return np.zeros((p.shape[0], 0))
    stacked = np.hstack([p, -q])
    u, s, vt = np.linalg.svd(stacked)
    small = [i for i, val in enumerate(np.concatenate([s, np.zeros(max(0, stacked.shape[1] - s.size))])) if val < tol]
    if not small:
        return np.zeros((p.shape[0], 0))
    coeffs = vt[small, : p.shape[1]].T
    return orthonormalize(p @ coeffs)


def _as_columns(a: NDArray, rows: int) -> NDArray[np.float64]:
    a = np.asarray(a, dtype=float)
    if a.ndim == 2 and a.shape[0] == rows:
        return a
    if a.size == 0:
        return np.zeros((rows, 0))
    return a.reshape(rows, -1)


class Subspace:
    """A linear subspace given by a basis of full column rank."""

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient: SymplecticSpace, basis: NDArray[np.float64]) -> None:
        basis = _as_columns(basis, ambient.dim)
        if numerical_rank(basis) != basis.shape[1]:
            raise SymplecticError("basis is rank deficient")
        self.ambient = ambient
        self.basis = _frozen(basis)

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    def orthonormal(self) -> NDArray[np.float64]:
        return orthonormalize(self.basis)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.k} in R^{self.ambient.dim})"


class LagrangianFrame(Subspace):
    """Orthonormal frame of a Lagrangian subspace.

    The columns are re-orthonormalized on construction and the Lagrangian
    condition ``F.T @ W @ F == 0`` is checked to ``LAGRANGIAN_TOL`` relative to
    the size of the form.
    """

    __slots__ = ()

    def __init__(self, ambient: SymplecticSpace, frame: NDArray[np.float64], check: bool = True) -> None:
        frame = _as_columns(frame, ambient.dim)
        if frame.shape[1] != ambient.n:
            raise SymplecticError(f"frame has {frame.shape[1]} columns, expected {ambient.n}")
        q = orthonormalize(frame)
        if check:
            if numerical_rank(frame) != ambient.n:
                raise SymplecticError("frame is rank deficient")
            if lagrangian_defect(ambient, q) > LAGRANGIAN_TOL:
                raise SymplecticError("frame does not span a Lagrangian subspace")
        self.ambient = ambient
        self.basis = _frozen(q)

    @property
    def frame(self) -> NDArray[np.float64]:
        return self.basis

    def __repr__(self) -> str:
        return f"LagrangianFrame(n={self.ambient.n})"


def lagrangian_defect(sp: SymplecticSpace, frame: NDArray) -> float:
    if sp.dim == 0:
        return 0.0
    scale = max(1.0, float(np.abs(sp.form).max()))
    return float(np.abs(frame.T @ sp.form @ frame).max(initial=0.0)) / scale


def classify(sub: Subspace) -> str:
    """Isotropy type of a subspace from the rank of the restricted form."""
    b = orthonormalize(sub.basis)
    k, dim = b.shape[1], sub.ambient.dim
    r = numerical_rank(b.T @ sub.ambient.form @ b, tol=1e-9) if k else 0
    radical = k - r
    iso = radical == k
    coiso = radical == dim - k
    if iso and coiso:
        return LAGRANGIAN
    if iso:
        return ISOTROPIC
    if coiso:
        return COISOTROPIC
    if r == k:
        return SYMPLECTIC
    return NONE


def symp_complement(sub: Subspace) -> Subspace:
    """``{v : omega(w, v) = 0 for all w in sub}``."""
    b = orthonormalize(sub.basis)
    if b.shape[1] == 0:
        return Subspace(sub.ambient, np.eye(sub.ambient.dim))
    return Subspace(sub.ambient, null_space(b.T @ sub.ambient.form))


def _as_basis(x: Subspace | NDArray) -> NDArray[np.float64]:
    return x.basis if isinstance(x, Subspace) else np.asarray(x, dtype=float)


def subspace_distance(a: Subspace | NDArray, b: Subspace | NDArray) -> float:
    """Gap between equal-dimensional spans: sine of the largest principal angle."""
    qa, qb = orthonormalize(_as_basis(a)), orthonormalize(_as_basis(b))
    if qa.shape != qb.shape:
        raise SymplecticError(f"dimension mismatch {qa.shape} vs {qb.shape}")
    if qa.shape[1] == 0:
        return 0.0
    resid = qb - qa @ (qa.T @ qb)
    return float(np.linalg.norm(resid, 2))


def random_unitary(n: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    """Haar-distributed unitary from the QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def unitary_to_frame(u: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Real frame ``[Re U; Im U]`` of the Lagrangian ``U R^n``."""
    return np.vstack([u.real, u.imag])


def random_lagrangian(n: int, seed: int | np.random.Generator | None = None, space: SymplecticSpace | None = None) -> LagrangianFrame:
    """Random Lagrangian ``U R^n`` for a Haar unitary ``U``; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    if space is None:
        space = standard_space(n)
    elif space.n != n:
        raise SymplecticError("dimension mismatch")
    if n == 0:
        return LagrangianFrame(space, np.zeros((0, 0)))
    f = unitary_to_frame(random_unitary(n, rng))
    return LagrangianFrame(space, space.from_std @ f)


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.7) -> NDArray[np.float64]:
    """``expm(J H)`` for a random symmetric ``H``; a symplectic matrix of moderate norm."""
    h = rng.standard_normal((2 * n, 2 * n)) * scale / np.sqrt(2 * n)
    h = (h + h.T) / 2
    return sla.expm(standard_complex_structure(n) @ h)


def is_symplectic_matrix(s: NDArray, sp: SymplecticSpace, tol: float = 1e-8) -> bool:
    s = np.asarray(s, dtype=float)
    if s.shape != (sp.dim, sp.dim):
        return False
    scale = max(1.0, float(np.abs(s).max()) ** 2)
    return bool(np.allclose(s.T @ sp.form @ s, sp.form, atol=tol * scale))


def lagrangian_containing(sp: SymplecticSpace, isotropic: NDArray, rng: np.random.Generator) -> LagrangianFrame:
    """Random Lagrangian containing a given isotropic subspace."""
    iso = orthonormalize(_as_columns(isotropic, sp.dim))
    k = iso.shape[1]
    if k and np.abs(iso.T @ sp.form @ iso).max() > 1e-10:
        raise SymplecticError("subspace is not isotropic")
    generic = random_lagrangian(sp.n, rng, sp).frame
    comp = null_space(iso.T @ sp.form) if k else np.eye(sp.dim)
    inside = intersect_spans(orthonormalize(generic), orthonormalize(comp))
    # drop the part of the intersection that already lies in the isotropic span
    rest = inside - iso @ (iso.T @ inside)
    u, s, _ = np.linalg.svd(rest, full_matrices=False)
    need = sp.n - k
    return LagrangianFrame(sp, np.hstack([iso, u[:, :need]]))


def std_coords(sp: SymplecticSpace, frame: NDArray) -> NDArray[np.float64]:
    """Frame moved to standard coordinates (not re-orthonormalized)."""
    if sp.is_standard:
        return np.asarray(frame, dtype=float)
    return sp.to_std @ frame


def unitary_of(sp: SymplecticSpace, frame: NDArray) -> NDArray[np.complex128]:
    """Unitary ``X + iY`` whose columns span the Lagrangian in standard coordinates."""
    q = orthonormalize(std_coords(sp, frame))
    n = sp.n
    return q[:n] + 1j * q[n:]


def det2_phase(sp: SymplecticSpace, frame: NDArray) -> complex:
    """``det(X + iY)^2`` normalized to modulus one; independent of the real basis chosen."""
    if sp.n == 0:
        return 1.0 + 0.0j
    f = std_coords(sp, frame)
    n = sp.n
    d = np.linalg.det(f[:n] + 1j * f[n:])
    d2 = d * d
    return complex(d2 / abs(d2))


def det2_phases(sp: SymplecticSpace, frames: NDArray) -> NDArray[np.complex128]:
    """Batched :func:`det2_phase` over a stack of frames ``(m, 2n, n)``."""
    n = sp.n
    if n == 0:
        return np.ones(frames.shape[0], dtype=complex)
    f = frames if sp.is_standard else sp.to_std @ frames
    d = np.linalg.det(f[:, :n] + 1j * f[:, n:])
    d2 = d * d
    return d2 / np.abs(d2)


def block_diag_frames(*frames: NDArray) -> NDArray[np.float64]:
    arrs = [np.asarray(f, dtype=float) for f in frames]
    rows = sum(a.shape[0] for a in arrs)
    cols = sum(a.shape[1] for a in arrs)
    out = np.zeros((rows, cols))
    r = c = 0
    for a in arrs:
        out[r : r + a.shape[0], c : c + a.shape[1]] = a
        r += a.shape[0]
        c += a.shape[1]
    return out


def product_frame(*lags: LagrangianFrame) -> LagrangianFrame:
    sp = product(*[l.ambient for l in lags])
    return LagrangianFrame(sp, block_diag_frames(*[l.frame for l in lags]), check=False)


def permute_frame(lag: LagrangianFrame, order: Sequence[int]) -> LagrangianFrame:
    rows = permutation_rows(lag.ambient, order)
    return LagrangianFrame(permute(lag.ambient, order), lag.frame[rows], check=False)


def dual_frame(lag: LagrangianFrame) -> LagrangianFrame:
    return LagrangianFrame(dual(lag.ambient), lag.frame, check=False)


def diagonal_frame(sp: SymplecticSpace) -> LagrangianFrame:
    """Diagonal ``{(v, v)}`` in ``sp^- x sp``."""
    eye = np.eye(sp.dim)
    return LagrangianFrame(product(dual(sp), sp), np.vstack([eye, eye]) / np.sqrt(2))


def antidiagonal_frame(sp: SymplecticSpace) -> LagrangianFrame:
    """Euclidean complement ``{(v, -v)}`` of the diagonal, in ``sp x sp^-``."""
    eye = np.eye(sp.dim)
    return LagrangianFrame(product(sp, dual(sp)), np.vstack([eye, -eye]) / np.sqrt(2))


def transverse(a: LagrangianFrame, b: LagrangianFrame, tol: float = 1e-7) -> bool:
    return min_kahler_sine(a, b) > tol


def min_kahler_sine(a: LagrangianFrame, b: LagrangianFrame) -> float:
    """Smallest singular value of ``Fa^T W Fb`` in standard orthonormal coordinates."""
    sp = a.ambient
    if sp.n == 0:
        return 1.0
    qa = orthonormalize(std_coords(sp, a.frame))
    qb = orthonormalize(std_coords(sp, b.frame))
    m = qa.T @ standard_form(sp.n) @ qb
    return float(np.linalg.svd(m, compute_uv=False).min())


def as_spaces(items: Iterable[SymplecticSpace]) -> list[SymplecticSpace]:
    return list(items)
