"""Randomized verification suites with reproducible reports.

Each suite draws its instances from a generator seeded deterministically from
a master seed and the suite name, so reports are identical across runs apart
from the ``timing`` block.
"""

from __future__ import annotations

import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import complexes, corrlin, grading, maslov, quilt, toric
from .jsonio import SCHEMA_VERSION, dump_torus_sequence, dumps, fraction_str, rounded
from .symplinalg import (
    LagrangianFrame,
    block_diag_frames,
    dual,
    lagrangian_containing,
    product,
    random_lagrangian,
    random_symplectic,
    standard_space,
    subspace_distance,
)

MAX_WITNESSES = 20


@dataclass
class Outcome:
    instances: int = 0
    failures: list[dict[str, Any]] | None = None
    failure_count: int = 0
    summary: dict[str, Any] | None = None
    failed: set[int] | None = None

    def __post_init__(self) -> None:
        self.failures = [] if self.failures is None else self.failures
        self.summary = {} if self.summary is None else self.summary
        self.failed = set() if self.failed is None else self.failed

    def fail(self, instance: int, message: str, **witness: Any) -> None:
        self.failure_count += 1
        self.failed.add(instance)
        if len(self.failures) < MAX_WITNESSES:
            self.failures.append({"instance": instance, "message": message, "witness": _plain(witness)})


def _plain(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return rounded(float(x))
    return x if x is None or isinstance(x, str) else repr(x)


def suite_seed(master: int, name: str) -> int:
    """Per-suite seed from the master seed and a stable hash of the suite name."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(name.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _random_correspondence(v0, v1, rng: np.random.Generator) -> corrlin.LinearCorrespondence:
    amb = product(dual(v0), v1)
    return corrlin.LinearCorrespondence(v0, v1, random_lagrangian(amb.n, rng, amb))


def _transverse_pair(rng: np.random.Generator, n_max: int, n_mod: int, need_middle: bool = True):
    while True:
        n0, n1, n2 = (int(x) for x in rng.integers(0, n_max + 1, size=3))
        if need_middle:
            n1 = max(n1, 1)
        v0, v1, v2 = standard_space(n0), standard_space(n1), standard_space(n2)
        c01 = grading.random_graded_correspondence(v0, v1, n_mod, rng)
        c12 = grading.random_graded_correspondence(v1, v2, n_mod, rng)
        if corrlin.is_embedded_linear(c01.corr, c12.corr):
            return (v0, v1, v2), c01, c12


def _modulus(rng: np.random.Generator, fixed: int | None, choices: tuple[int, ...]) -> int:
    # draw even when fixed so the remaining stream does not depend on --N
    drawn = int(rng.choice(choices))
    return drawn if fixed is None else int(fixed)


# suites


def suite_composition(rng: np.random.Generator, instances: int = 1000, n_max: int = 4, tol: float = 1e-8, **_: Any) -> Outcome:
    out = Outcome()
    worst = 0.0
    for i in range(instances):
        n = int(rng.integers(1, n_max + 1))
        sp = standard_space(n)
        a, b = random_symplectic(n, rng), random_symplectic(n, rng)
        ga, gb = corrlin.graph(a, sp), corrlin.graph(b, sp)
        checks = {
            "graph": (corrlin.compose(ga, gb).composed.lag, corrlin.graph(b @ a, sp).lag),
            "left identity": (corrlin.compose(corrlin.diagonal(sp), ga).composed.lag, ga.lag),
            "right identity": (corrlin.compose(ga, corrlin.diagonal(sp)).composed.lag, ga.lag),
        }
        dims = [standard_space(int(x)) for x in rng.integers(0, n_max + 1, size=4)]
        x, y, z = (_random_correspondence(dims[k], dims[k + 1], rng) for k in range(3))
        xy = corrlin.compose(x, y)
        yz = corrlin.compose(y, z)
        if xy.transverse and yz.transverse:
            left = corrlin.compose(xy.composed, z)
            right = corrlin.compose(x, yz.composed)
            if left.transverse and right.transverse:
                checks["associativity"] = (left.composed.lag, right.composed.lag)
        out.instances += 1
        for name, (p, q) in checks.items():
            d = subspace_distance(p, q) if p.frame.size else 0.0
            worst = max(worst, d)
            if not d < tol:
                out.fail(i, f"{name} law violated", n=n, distance=d)
    out.summary = {"max_distance": float(f"{worst:.3e}")}
    return out


def suite_immersion(
    rng: np.random.Generator, instances: int = 1000, degenerate: int = 200, n_max: int = 3, **_: Any
) -> Outcome:
    out = Outcome()
    forced = 0
    for i in range(instances):
        n0, n2 = (int(x) for x in rng.integers(0, n_max + 1, size=2))
        n1 = int(rng.integers(1, n_max + 1))
        v0, v1, v2 = standard_space(n0), standard_space(n1), standard_space(n2)
        expected_min = 0
        if i < degenerate:
            forced += 1
            k = int(rng.integers(1, n1 + 1))
            lam = random_lagrangian(n1, rng)
            q, _ = np.linalg.qr(rng.standard_normal((n1, k)))
            iso = lam.frame @ q
            lam2 = lagrangian_containing(v1, iso, rng)
            l0 = random_lagrangian(n0, rng, dual(v0)) if n0 else None
            l2 = random_lagrangian(n2, rng, v2) if n2 else None
            f01 = block_diag_frames(*([l0.frame] if l0 else []), lam.frame)
            f12 = block_diag_frames(lam2.frame, *([l2.frame] if l2 else []))
            c01 = corrlin.LinearCorrespondence.from_frame(v0, v1, f01)
            c12 = corrlin.LinearCorrespondence.from_frame(v1, v2, f12)
            expected_min = k
        else:
            c01 = _random_correspondence(v0, v1, rng)
            c12 = _random_correspondence(v1, v2, rng)
        rep = corrlin.compose(c01, c12)
        out.instances += 1
        kdim = rep.kernel.basis.shape[1]
        if kdim != rep.defect:
            out.fail(i, "kernel dimension differs from defect", kernel=kdim, defect=rep.defect, dims=[n0, n1, n2])
        elif rep.transverse != (rep.defect == 0):
            out.fail(i, "transversality flag disagrees with defect", defect=rep.defect, transverse=rep.transverse)
        elif rep.defect < expected_min:
            out.fail(i, "forced degeneracy not detected", defect=rep.defect, forced=expected_min)
    out.summary = {"forced_degenerate": forced}
    return out


def suite_maslov(rng: np.random.Generator, instances: int = 500, n_max: int = 3, **_: Any) -> Outcome:
    out = Outcome()
    r = LagrangianFrame(standard_space(1), np.array([[1.0], [0.0]]))
    fixed = {
        "generator loop": (maslov.rs_index(maslov.rotation(r), r), Fraction(1)),
        "half rotation": (maslov.rs_index(maslov.rotation(r, np.pi / 2), r), Fraction(1, 2)),
    }
    for name, (got, want) in fixed.items():
        if got != want:
            out.fail(-1, f"{name} index", got=got, expected=want)
    worst = 0.0
    for i in range(instances):
        n = int(rng.integers(1, n_max + 1))
        path, m = maslov.random_loop(n, rng)
        lag = random_lagrangian(n, rng)
        out.instances += 1
        try:
            idx = maslov.rs_index(path, lag)
        except maslov.IrregularCrossing as exc:
            out.fail(i, "irregular crossing", n=n, s=exc.record.s)
            continue
        w = maslov.winding_lift(path)
        res = abs(w - round(w))
        worst = max(worst, res)
        if idx != round(w) or res >= 0.05 or idx != m:
            out.fail(i, "crossing index disagrees with winding", n=n, index=idx, winding=w, constructed=m)
    out.summary = {"max_residual": float(f"{worst:.3e}")}
    return out


def suite_degprop(rng: np.random.Generator, instances: int = 500, n_max: int = 3, N: int | None = None, **_: Any) -> Outcome:
    out = Outcome()
    for i in range(instances):
        n_mod = _modulus(rng, N, (2, 4, 6, 8))
        n = int(rng.integers(1, n_max + 1))
        sp = standard_space(n)
        a, b = grading.random_graded(sp, n_mod, rng), grading.random_graded(sp, n_mod, rng)
        out.instances += 1
        dab, dba = grading.degree(a, b), grading.degree(b, a)
        if (dab + dba - n) % n_mod:
            out.fail(i, "skewsymmetry", N=n_mod, n=n, d_ab=dab, d_ba=dba)
        c = int(rng.integers(-3 * n_mod, 3 * n_mod))
        if grading.degree(a, grading.shift(b, c)) != (c + dab) % n_mod:
            out.fail(i, "multiplicativity", N=n_mod, c=c)
        if grading.degree(grading.shift(a, c), b) != (dab - c) % n_mod:
            out.fail(i, "multiplicativity in the first slot", N=n_mod, c=c)
        m = int(rng.integers(1, n_max + 1))
        sp2 = standard_space(m)
        a2, b2 = grading.random_graded(sp2, n_mod, rng), grading.random_graded(sp2, n_mod, rng)
        lhs = grading.degree(grading.product_graded(a, a2), grading.product_graded(b, b2))
        if lhs != (dab + grading.degree(a2, b2)) % n_mod:
            out.fail(i, "additivity", N=n_mod, n=[n, m])
        diag = grading.canonical_diagonal(sp, n_mod)
        dd = grading.degree(diag, grading.product_graded(grading.dual_graded(a), b))
        if dd != dab:
            out.fail(i, "diagonal", N=n_mod, n=n, via_diagonal=dd, direct=dab)
    return out


def suite_insertdiag(rng: np.random.Generator, instances: int = 300, n_max: int = 2, N: int | None = None, **_: Any) -> Outcome:
    out = Outcome()
    for i in range(instances):
        n_mod = _modulus(rng, N, (2, 4, 6, 8))
        n0, n1, n2 = (int(x) for x in rng.integers(0, n_max + 1, size=3))
        n1 = max(n1, 1)
        v0, v1, v2 = standard_space(n0), standard_space(n1), standard_space(n2)
        c01 = grading.random_graded_correspondence(v0, v1, n_mod, rng)
        c12 = grading.random_graded_correspondence(v1, v2, n_mod, rng)
        l0 = grading.random_graded(v0, n_mod, rng)
        l2 = grading.random_graded(dual(v2), n_mod, rng)
        out.instances += 1
        try:
            lhs, rhs = grading.insertdiag_a(l0, c01.graded, c12.graded, l2, v1)
            if lhs != rhs:
                out.fail(i, "insertion identity (a)", N=n_mod, dims=[n0, n1, n2], lhs=lhs, rhs=rhs)
        except grading.NotTransverse:
            out.fail(i, "random configuration not transverse for (a)", dims=[n0, n1, n2])
        m0 = int(rng.integers(1, n_max + 1))
        w = standard_space(int(rng.integers(0, n_max + 1)))
        u0 = standard_space(m0)
        lam = grading.random_graded(product(dual(u0), w, u0), n_mod, rng)
        k = grading.random_graded(product(u0, dual(u0), w), n_mod, rng)
        try:
            lhs, rhs = grading.insertdiag_b(lam, k, u0)
            if lhs != rhs:
                out.fail(i, "insertion identity (b)", N=n_mod, dims=[m0, w.n], lhs=lhs, rhs=rhs)
        except grading.NotTransverse:
            out.fail(i, "random configuration not transverse for (b)", dims=[m0, w.n])
    return out


def suite_gradingcomp(rng: np.random.Generator, instances: int = 300, n_max: int = 2, N: int | None = None, **_: Any) -> Outcome:
    out = Outcome()
    for i in range(instances):
        n_mod = _modulus(rng, N, (2, 4, 6, 8))
        (v0, v1, v2), c01, c12 = _transverse_pair(rng, n_max, n_mod)
        l0 = grading.random_graded(v0, n_mod, rng)
        l2 = grading.random_graded(dual(v2), n_mod, rng)
        out.instances += 1
        try:
            lhs, rhs = grading.gradingcomp(l0, c01, c12, l2)
        except grading.NotTransverse:
            out.fail(i, "outer Lagrangians not transverse", dims=[v0.n, v1.n, v2.n])
            continue
        if lhs != rhs:
            out.fail(i, "degree through the triple differs from the composed degree", N=n_mod, triple=lhs, composed=rhs)
        diag = grading.GradedCorrespondence(corrlin.diagonal(v1), grading.canonical_diagonal(v1, n_mod))
        ident = grading.compose_graded(c01, diag)
        if round(ident.graded.theta - c01.graded.theta) % n_mod:
            out.fail(i, "composing with the graded diagonal changes the grading", N=n_mod)
    return out


def suite_contraction(rng: np.random.Generator, instances: int = 100, n_max: int = 2, tol: float = 1e-8, **_: Any) -> Outcome:
    out = Outcome()
    ts = (0.0, 0.25, 0.5, 0.75, 1.0)
    worst = 0.0
    for i in range(instances):
        (v0, v1, v2), c01, c12 = _transverse_pair(rng, n_max, 2)
        lag = corrlin.fiber_lagrangian(c01.corr, c12.corr)
        split = (v0.n, v1.n, v2.n)
        base = corrlin.compose(c01.corr, c12.corr).composed.frame
        out.instances += 1
        d0 = subspace_distance(corrlin.contract_fiber(lag, 0.0, split), lag)
        top = base[: v0.dim]
        bot = base[v0.dim :]
        eye = np.eye(v1.dim)
        k = base.shape[1]
        split_frame = np.vstack(
            [
                np.hstack([top, np.zeros((v0.dim, v1.dim))]),
                np.hstack([np.zeros((v1.dim, k)), eye]),
                np.hstack([np.zeros((v1.dim, k)), -eye]),
                np.hstack([bot, np.zeros((v2.dim, v1.dim))]),
            ]
        )
        d1 = subspace_distance(corrlin.contract_fiber(lag, 1.0, split), split_frame)
        dt = max(subspace_distance(corrlin.compose_fiber(corrlin.contract_fiber(lag, t, split), split), base) for t in ts)
        worst = max(worst, d0, d1, dt)
        if not d0 < tol:
            out.fail(i, "contraction does not start at the fiber", distance=d0)
        if not d1 < tol:
            out.fail(i, "contraction does not end at the split form", distance=d1)
        if not dt < tol:
            out.fail(i, "composition varies along the contraction", distance=dt)
    out.summary = {"max_distance": float(f"{worst:.3e}")}
    return out


def _quilt_streams(rng: np.random.Generator) -> tuple[np.random.Generator, np.random.Generator]:
    """Sequence stream and auxiliary stream; the sequence stream is identical for both quilt suites."""
    aux = np.random.default_rng(rng.integers(1 << 62))
    return rng, aux


def _digest(seq: quilt.CyclicSequence, running: int) -> int:
    return zlib.crc32(dumps(dump_torus_sequence(seq)).encode(), running)


def _quilt_sequences(rng: np.random.Generator, instances: int, r_max: int, n_max: int, N: int | None):
    for _ in range(instances):
        n_mod = _modulus(rng, N, (2, 4))
        yield quilt.random_sequence(rng, r_max=r_max, n_max=n_max, modulus=n_mod)


def suite_quilt_degree(
    rng: np.random.Generator, instances: int = 300, r_max: int = 4, n_max: int = 2, N: int | None = None, **_: Any
) -> Outcome:
    out = Outcome()
    rng, aux = _quilt_streams(rng)
    odd = digest = 0
    for i, seq in enumerate(_quilt_sequences(rng, instances, r_max, n_max, N)):
        digest = _digest(seq, digest)
        out.instances += 1
        odd += seq.length % 2
        try:
            d = quilt.all_degrees(seq, aux)
        except (ValueError, ArithmeticError) as exc:
            out.fail(i, f"degree computation failed: {exc}", length=seq.length)
            continue
        if len(set(d)) != 1:
            out.fail(i, "degree formulas disagree", length=seq.length, dims=[m.n for m in seq.manifolds], degrees=list(d))
        even = seq if seq.length % 2 == 0 else quilt.insert_diagonal(seq, seq.length)
        folded = quilt.fold(even)
        to_even = quilt.insert_diagonal_map(seq, seq.length) if seq.length % 2 else (lambda g: g.points)
        for g in quilt.intersection_points(seq):
            if not folded.contains(to_even(g)):
                out.fail(i, "generator missing from the folded intersection", points=g.points)
                break
    out.summary = {"odd_length": odd, "sequence_digest": digest}
    return out


def suite_compose_at(
    rng: np.random.Generator, instances: int = 300, r_max: int = 4, n_max: int = 2, N: int | None = None, **_: Any
) -> Outcome:
    """Runs on the very sequences of the quilt-degree suite when given its seed."""
    out = Outcome()
    embedded = rejected = digest = 0
    rng, _ = _quilt_streams(rng)
    for i, seq in enumerate(_quilt_sequences(rng, instances, r_max, n_max, N)):
        digest = _digest(seq, digest)
        gens = quilt.intersection_points(seq)
        for j in range(seq.length if seq.length > 1 else 0):
            try:
                res = quilt.compose_at(seq, j)
            except quilt.NotEmbedded:
                rejected += 1
                continue
            embedded += 1
            out.instances += 1
            try:
                after = quilt.intersection_points(res.sequence)
            except (ValueError, ArithmeticError) as exc:
                out.fail(out.instances - 1, f"composed sequence failed: {exc}", sequence=i, position=j)
                continue
            ok, msg = quilt.check_bijection(gens, after, res.mapping)
            if not ok:
                out.fail(out.instances - 1, msg, sequence=i, position=j, before=len(gens), after=len(after))
            elif sorted(g.degree for g in gens) != sorted(g.degree for g in after):
                out.fail(out.instances - 1, "degree multiset changed", sequence=i, position=j)
        for p in (0, seq.length):
            ins = quilt.insert_diagonal(seq, p)
            ok, msg = quilt.check_bijection(gens, quilt.intersection_points(ins), quilt.insert_diagonal_map(seq, p))
            if not ok:
                out.fail(-1, f"diagonal insertion: {msg}", sequence=i, position=p)
    out.summary = {"embedded": embedded, "not_embedded": rejected, "sequence_digest": digest}
    return out


def torsion_example(n_mod: int = 2) -> tuple[complexes.GradedChainComplex, complexes.GradedChainComplex]:
    """``Z --2--> Z`` and a rank-two free complex with zero differential."""
    a = complexes.GradedChainComplex(("a0", "a1"), (0, 1), np.array([[0, 0], [2, 0]]), n_mod)
    f = complexes.GradedChainComplex(("f0", "f1"), (0, 1), np.zeros((2, 2), dtype=np.int64), n_mod)
    return a, f


def suite_kunneth(rng: np.random.Generator, instances: int = 100, N: int | None = None, **_: Any) -> Outcome:
    out = Outcome()
    a, f = torsion_example()
    h = complexes.homology(complexes.tensor(a, f))
    torsion = sorted(t for x in h.values() for t in x.torsion)
    if torsion != [2, 2] or complexes.total_rank(h) != 0:
        out.fail(-1, "torsion example", homology={d: x.as_dict() for d, x in h.items()})
    for i in range(instances):
        n_mod = _modulus(rng, N, (2, 4))
        seq, j = quilt.random_split_sequence(rng, modulus=n_mod)
        out.instances += 1
        ks = quilt.kunneth_split(seq, j)
        gens = quilt.intersection_points(seq)
        gl, gr = quilt.intersection_points(ks.left), quilt.intersection_points(ks.right)
        if len(gens) != len(gl) * len(gr):
            out.fail(i, "generator count does not factor", total=len(gens), left=len(gl), right=len(gr))
            continue
        pairs = ks.pairs(gens, gl, gr)
        if len(set(pairs)) != len(gens):
            out.fail(i, "split map is not a bijection")
            continue
        if any(g.degree != (gl[p].degree + gr[q].degree) % n_mod for g, (p, q) in zip(gens, pairs)):
            out.fail(i, "degrees do not add")
            continue
        cl, cr = quilt.build_complex(ks.left, gens=gl), quilt.build_complex(ks.right, gens=gr)
        full = quilt.build_complex(seq, gens=gens)
        tens = complexes.tensor(cl, cr)
        order = [p * len(gr) + q for p, q in pairs]
        if [tens.degrees[k] for k in order] != list(full.degrees):
            out.fail(i, "tensor complex degrees differ from the sequence complex")
        hl, hr, ht = (complexes.total_rank(complexes.homology(c)) for c in (cl, cr, tens))
        if ht != hl * hr or ht != complexes.total_rank(complexes.homology(full)):
            out.fail(i, "homology ranks do not multiply", left=hl, right=hr, tensor=ht)
    return out


def suite_toric(rng: np.random.Generator, instances: int = 1000, n_max: int = 6, **_: Any) -> Outcome:
    """Exact and sampled checks of the projective-space computations; ``instances`` is the sample count."""
    out = Outcome()
    samples = instances
    idx = 0

    def check(ok: bool, message: str, **w: Any) -> None:
        nonlocal idx
        out.instances += 1
        if not ok:
            out.fail(idx, message, **w)
        idx += 1

    for n in range(1, n_max + 1):
        level = Fraction(1, n + 1)
        cl = toric.clifford(n)
        check(all(v == level for v in cl.moment_values), "Clifford level not exact", n=n)
        pts = [toric.clifford_point(n, rng.random(n)) for _ in range(max(1, 10 * samples // n_max))]
        err = max(abs(toric.moment(z, j) - np.pi / (n + 1)) for z in pts for j in range(n + 1))
        check(err < 1e-12, "Clifford moments off level", n=n, error=err)
        check(all(cl.contains(np.ones(1), z) for z in pts), "Clifford membership", n=n)
        mu = np.full(n, float(level))
        t = cl.tangent_chart(mu, rng.random(n))
        z = pts[0]
        form = cl.target.chart_form(cl.target.chart(z))
        t = cl.tangent_chart(*toric._aa(cl, np.ones(1), z))
        check(float(np.abs(t.T @ form @ t).max()) < 1e-9 and np.linalg.matrix_rank(t) == n, "Clifford tangent not Lagrangian", n=n)
        for k in range(1, n + 1):
            red = toric.reduced_space_scale(k, n)
            check(red["scale"] == Fraction(k, n + 1), "reduced scale", k=k, n=n, scale=red["scale"])
            check(red["tau_reduced"] == red["tau_ambient"] == level, "monotonicity constants", k=k, n=n, **red)
        if n < 2:
            continue
        for k in range(2, n + 1):
            s = toric.sigma(k, n)
            rel = s.relation()
            check(
                all(v == level for r, v in zip(rel.moment_rows, rel.moment_values) if sum(1 for x in r if x) == 1),
                "level not exact",
                k=k,
                n=n,
            )
            count = samples if n <= 4 else max(1, samples // 10)
            worst = 0.0
            for _ in range(count // 10):
                u, zz = s.sample(rng)
                worst = max(worst, max(abs(toric.moment(zz, j) - np.pi / (n + 1)) for j in s.levels))
                if not (s.contains(u, zz) and rel.contains(u, zz)):
                    check(False, "sampled point fails membership", k=k, n=n)
            check(worst < 1e-12, "sigma moments off level", k=k, n=n, error=worst)
            defect, smin = s.lagrangian_defect(rng, count // 10)
            check(defect < 1e-8 and smin > 1e-6, "sigma not Lagrangian for the reduced form", k=k, n=n, defect=defect, smin=smin)
            wrong, _ = s.lagrangian_defect(rng, 3, source_scale=s.source.scale * 2)
            check(wrong > 1e-3, "Lagrangian check insensitive to the reduced scale", k=k, n=n, defect=wrong)
    for n in range(2, min(n_max, 4) + 1):
        tn = toric.clifford(n)
        for k in range(2, n + 1):
            c = toric.compose_toric(toric.clifford(k - 1, n), toric.sigma(k, n).relation(), rng, samples, known=[tn])
            check(c.embedded and c.identified_as == tn.name, "Clifford composed with sigma", k=k, n=n, **c.witness)
        sig1t = toric.sigma_single(1, n).relation().transpose()
        c = toric.compose_toric(sig1t, toric.clifford(n - 1, n).transpose(), rng, samples, known=[tn.transpose()])
        check(c.embedded and c.identified_as == tn.transpose().name, "transposed reduction composed with Clifford", n=n)
        split = toric.product_relation(toric.clifford(1, n), toric.clifford(n - 1, n))
        c = toric.compose_toric(toric.sigma(2, n).relation(), sig1t, rng, samples, known=[split])
        check(c.embedded and c.identified_as == split.name, "sigma composed with transposed reduction", n=n)
    for n in range(1, min(n_max, 4) + 1):
        gens = toric.perturbed_generators(n)
        binom = [int(np.round(np.prod([(n - i) / (i + 1) for i in range(k)]))) for k in range(n + 1)]
        check(len(gens) == 2**n and toric.index_distribution(gens) == binom, "Clifford generators", n=n, indices=toric.index_distribution(gens))
        cx = toric.zero_complex(gens)
        check(complexes.total_rank(complexes.homology(cx)) == 2**n, "Clifford homology rank", n=n)
        check(all((g.degree - g.index) % 2 == 0 for g in gens), "degree differs from Morse index parity", n=n)
        for k in range(2, n + 1):
            seq = toric.ToricSequence((toric.clifford(k - 1, n), toric.sigma(k, n).relation(), toric.clifford(n).transpose()))
            gk = toric.perturbed_generators(seq)
            composed, _ = toric.compose_at(seq, 1)
            gc = toric.perturbed_generators(composed)
            ok, msg = toric.match_generators(gk, gc, lambda g: toric.drop_point(g, 1))
            check(len(gk) == 2**n and ok, "sphere sequence generators", k=k, n=n, count=len(gk), note=msg)
    for n in (2, 3):
        rep = toric.calc_chain(n)
        check(rep["ok"], "reduction chain", n=n, steps=[(s["step"], s["generators"], s["ok"]) for s in rep["steps"]])
    return out


def suite_degree_routes(rng: np.random.Generator, instances: int = 100, n_max: int = 3, N: int | None = None, **_: Any) -> Outcome:
    out = Outcome()
    for i in range(instances):
        n_mod = _modulus(rng, N, (2, 4, 6, 8))
        n = int(rng.integers(1, n_max + 1))
        sp = standard_space(n)
        a, b = grading.random_graded(sp, n_mod, rng), grading.random_graded(sp, n_mod, rng)
        out.instances += 1
        d = grading.degree(a, b)
        stops = int(rng.integers(0, 3))
        try:
            d2 = grading.degree_via_crossings(a, b, rng, stops=stops)
        except maslov.IrregularCrossing as exc:
            out.fail(i, "irregular crossing on a random path", s=exc.record.s)
            continue
        if d != d2:
            out.fail(i, "closed form and crossing count disagree", N=n_mod, n=n, closed=d, crossings=d2, stops=stops)
    return out


@dataclass(frozen=True)
class Suite:
    run: Callable[..., Outcome]
    instances: int
    budget: float
    seed_from: str | None = None


SUITES: dict[str, Suite] = {
    "composition": Suite(suite_composition, 1000, 10),
    "immersion": Suite(suite_immersion, 1000, 10),
    "maslov": Suite(suite_maslov, 500, 60),
    "degprop": Suite(suite_degprop, 500, 120),
    "insertdiag": Suite(suite_insertdiag, 300, 60),
    "gradingcomp": Suite(suite_gradingcomp, 300, 120),
    "contraction": Suite(suite_contraction, 100, 10),
    "quilt-degree": Suite(suite_quilt_degree, 300, 120),
    "compose-at": Suite(suite_compose_at, 300, 120, seed_from="quilt-degree"),
    "kunneth": Suite(suite_kunneth, 100, 120),
    "toric": Suite(suite_toric, 1000, 180),
    "degree-routes": Suite(suite_degree_routes, 100, 120),
}


def run_suite(
    name: str, seed: int = 0, instances: int | None = None, **params: Any
) -> dict[str, Any]:
    """Run one suite and return its report; ``params`` with value ``None`` are dropped."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    suite = SUITES[name]
    count = suite.instances if instances is None else int(instances)
    params = {k: v for k, v in params.items() if v is not None}
    s = suite_seed(seed, suite.seed_from or name)
    start = time.perf_counter()
    outcome = suite.run(np.random.default_rng(s), instances=count, **params)
    wall = time.perf_counter() - start
    return {
        "schema": SCHEMA_VERSION,
        "suite": name,
        "seed": s,
        "master_seed": int(seed),
        "params": _plain({"instances": count, **params}),
        "instances": outcome.instances,
        "passed": outcome.instances - len({i for i in outcome.failed if i >= 0}),
        "failure_count": outcome.failure_count,
        "failures": outcome.failures,
        "summary": _plain(outcome.summary),
        "pass": outcome.failure_count == 0,
        "timing": {"wall_s": round(wall, 3), "budget_s": suite.budget},
    }


def _run_packed(args: tuple[str, int, dict[str, Any]]) -> dict[str, Any]:
    name, seed, params = args
    return run_suite(name, seed, **params)


def thread_cap() -> int:
    env = os.environ.get("QUILTLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(len(SUITES), os.cpu_count() or 1))


def verify_all(seed: int = 0, suites: list[str] | None = None, **params: Any) -> dict[str, Any]:
    """Run every suite (in a process pool capped by ``QUILTLAB_THREADS``) and aggregate."""
    names = list(suites or SUITES)
    jobs = [(name, seed, dict(params)) for name in names]
    start = time.perf_counter()
    workers = min(thread_cap(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_packed, jobs))
    else:
        reports = [_run_packed(j) for j in jobs]
    return {
        "schema": SCHEMA_VERSION,
        "suite": "all",
        "seed": int(seed),
        "instances": sum(r["instances"] for r in reports),
        "failures": [{"suite": r["suite"], "failure_count": r["failure_count"]} for r in reports if not r["pass"]],
        "pass": all(r["pass"] for r in reports),
        "reports": reports,
        "timing": {"wall_s": round(time.perf_counter() - start, 3)},
    }


def strip_timing(doc: Any) -> Any:
    """Copy of a report without any ``timing`` blocks, for reproducibility comparisons."""
    if isinstance(doc, dict):
        return {k: strip_timing(v) for k, v in doc.items() if k != "timing"}
    if isinstance(doc, list):
        return [strip_timing(v) for v in doc]
    return doc
