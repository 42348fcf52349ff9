"""Smith normal form over the integers with unimodular transforms."""

from __future__ import annotations

from dataclasses import dataclass
import itertools
from fractions import Fraction
from typing import Sequence

import numpy as np

Matrix = list[list[int]]


def _to_rows(a: Sequence[Sequence[int]] | np.ndarray) -> Matrix:
    arr = np.asarray(a, dtype=object)
    if arr.ndim != 2:
        raise ValueError("expected a matrix")
    return [[int(x) for x in row] for row in arr.tolist()] if arr.size else [[] for _ in range(arr.shape[0])]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == S`` with ``U``, ``V`` unimodular and ``S`` diagonal, ``d_i | d_{i+1}``."""

    s: np.ndarray
    u: np.ndarray
    v: np.ndarray
    invariants: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariants)


def smith(a: Sequence[Sequence[int]] | np.ndarray) -> SmithForm:
    m = _to_rows(a)
    rows = len(m)
    cols = len(m[0]) if rows else np.asarray(a).shape[1] if np.asarray(a).ndim == 2 else 0
    u = _identity(rows)
    v = _identity(cols)

    def swap_rows(i: int, j: int) -> None:
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src: int, dst: int, k: int) -> None:
        # row_dst += k * row_src
        if k:
            m[dst] = [x + k * y for x, y in zip(m[dst], m[src])]
            u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src: int, dst: int, k: int) -> None:
        if k:
            for row in m:
                row[dst] += k * row[src]
            for row in v:
                row[dst] += k * row[src]

    t = 0
    while t < min(rows, cols):
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = abs(m[i][j])
                if x and (best is None or x < best):
                    best, pivot = x, (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            done = True
            for i in range(t + 1, rows):
                if m[i][t]:
                    add_row(t, i, -(m[i][t] // m[t][t]))
                    if m[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if m[t][j]:
                    add_col(t, j, -(m[t][j] // m[t][t]))
                    if m[t][j]:
                        done = False
            if done:
                # the pivot must divide every remaining entry
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if m[i][j] % m[t][t]), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            best = None
            for i in range(t, rows):
                if m[i][t] and (best is None or abs(m[i][t]) < best[0]):
                    best = (abs(m[i][t]), "r", i)
            for j in range(t, cols):
                if m[t][j] and (best is None or abs(m[t][j]) < best[0]):
                    best = (abs(m[t][j]), "c", j)
            if best[1] == "r":
                swap_rows(t, best[2])
            else:
                swap_cols(t, best[2])
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    inv = tuple(m[i][i] for i in range(min(rows, cols)) if m[i][i])
    return SmithForm(
        s=np.array(m, dtype=object).reshape(rows, cols),
        u=np.array(u, dtype=object).reshape(rows, rows),
        v=np.array(v, dtype=object).reshape(cols, cols),
        invariants=inv,
    )


def invariant_factors(a: Sequence[Sequence[int]] | np.ndarray) -> tuple[int, ...]:
    return smith(a).invariants


def rank_mod2(a: np.ndarray) -> int:
    """Rank over the field with two elements."""
    m = (np.asarray(a, dtype=np.int64) % 2).astype(np.uint8)
    if m.size == 0:
        return 0
    m = m.copy()
    r = 0
    rows, cols = m.shape
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
        if r == rows:
            break
    return r


def solve_congruence(c: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> list[np.ndarray] | None:
    """All solutions in ``[0, 1)^k`` of ``C x ≡ b (mod Z^m)`` for a square integer matrix ``C``.

    With ``C = U^{-1} S V^{-1}`` the system becomes ``d_i y_i ≡ (U b)_i`` for
    ``y = V^{-1} x``, which has ``prod d_i`` solutions when all ``d_i`` are
    nonzero.  Returns ``None`` when ``det C = 0`` and the system is solvable
    (the solution set is not discrete) and an empty list when it has no
    solution.
    """
    c = np.asarray(c, dtype=object)
    m, k = c.shape
    if m != k:
        raise ValueError("expected a square system")
    sf = smith(c)
    u = sf.u.astype(float)
    v = sf.v.astype(float)
    rhs = u @ np.asarray(b, dtype=float)
    d = [int(sf.s[i, i]) for i in range(k)]
    if any(di == 0 for di in d):
        for i, di in enumerate(d):
            frac = rhs[i] - np.round(rhs[i])
            if di == 0 and abs(frac) > tol:
                return []
        return None
    sols = []
    for shifts in itertools.product(*[range(di) for di in d]):
        y = (rhs + np.asarray(shifts, dtype=float)) / np.asarray(d, dtype=float)
        x = np.mod(v @ y, 1.0)
        x[np.abs(x - 1.0) < tol] = 0.0
        sols.append(x)
    return sols


def saturate(a: np.ndarray) -> np.ndarray:
    """Integer basis of ``span_R(a) ∩ Z^m`` for an integer matrix ``a``."""
    a = np.asarray(a, dtype=object)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    sf = smith(a)
    r = sf.rank
    uinv = inverse_unimodular(sf.u)
    return np.asarray(uinv[:, :r], dtype=np.int64)


def annihilator(a: np.ndarray) -> np.ndarray:
    """Rows of a unimodular ``U`` that kill ``a``; ``B @ z`` integral iff ``z`` lies in ``span(a) + Z^m`` for saturated ``a``."""
    a = np.asarray(a, dtype=object)
    sf = smith(a)
    return np.asarray(sf.u[sf.rank :, :], dtype=np.int64)


def inverse_unimodular(u: np.ndarray) -> np.ndarray:
    """Exact inverse of a unimodular integer matrix by rational Gauss-Jordan elimination."""
    n = u.shape[0]
    aug = [[Fraction(int(x)) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(np.asarray(u).tolist())]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            x = aug[i][n + j]
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            out[i, j] = int(x)
    return out
