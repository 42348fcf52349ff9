"""Command-line frontend.

Every subcommand writes one JSON document to stdout.  Exit status is 0 on
success, 1 when a computation fails (the document then carries a witness) and
2 when the input is malformed (stderr names the offending JSON pointer).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import complexes, corrlin, grading, jsonio, maslov, quilt, toric, verify
from .grading import GradedCorrespondence, GradedLagrangian
from .jsonio import SCHEMA_VERSION, SchemaError, dumps, fraction_str, rounded

EXIT_OK, EXIT_FAILED, EXIT_MALFORMED = 0, 1, 2


class Failure(Exception):
    """Computation failed; ``witness`` goes into the output document."""

    def __init__(self, message: str, witness: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.witness = witness or {}


def _doc(kind: str, **body: Any) -> dict[str, Any]:
    return {"schema": SCHEMA_VERSION, "kind": kind, **body}


def _matrix(a: np.ndarray) -> list[list[float]]:
    return [[rounded(v) for v in row] for row in np.asarray(a, dtype=float).tolist()]


# linear objects


def _second_factor(doc: dict[str, Any]) -> corrlin.LinearCorrespondence | GradedCorrespondence:
    """A bare frame in the second slot is read as ``V -> pt``."""
    if "columns" in doc and "frame" not in doc:
        x = jsonio.load_frame(doc)
        lag = x.frame if isinstance(x, GradedLagrangian) else x
        corr = corrlin.lagrangian_as_correspondence(lag, from_point=False)
        if isinstance(x, GradedLagrangian):
            return GradedCorrespondence(corr, GradedLagrangian(corr.lag, x.theta, x.modulus))
        return corr
    return jsonio.load_correspondence(doc)


def cmd_compose(args: argparse.Namespace) -> dict[str, Any]:
    a = jsonio.load_correspondence(jsonio.read(args.first))
    b = _second_factor(jsonio.read(args.second))
    ca = a.corr if isinstance(a, GradedCorrespondence) else a
    cb = b.corr if isinstance(b, GradedCorrespondence) else b
    try:
        rep = corrlin.compose(ca, cb)
    except corrlin.CompositionError as exc:
        raise SchemaError(str(exc), "") from exc
    info = {"transverse": rep.transverse, "defect": rep.defect, "min_singular": rounded(rep.min_singular)}
    if not rep.transverse:
        raise Failure(
            "fiber product is not transverse",
            {**info, "kernel": _matrix(rep.kernel.basis.T)},
        )
    if not corrlin.is_embedded_linear(ca, cb):
        raise Failure("projection of the fiber product is not injective", info)
    if isinstance(a, GradedCorrespondence) and isinstance(b, GradedCorrespondence):
        composed: Any = grading.compose_graded(a, b)
    else:
        composed = rep.composed
    return _doc("composition", **info, composed=jsonio.dump_correspondence(composed))


def cmd_maslov(args: argparse.Namespace) -> dict[str, Any]:
    moving = jsonio.load_path(jsonio.read(args.pair[0]), "")
    fixed = jsonio.load_path(jsonio.read(args.pair[1]), "")
    try:
        idx = maslov.rs_index(moving, fixed)
    except maslov.IrregularCrossing as exc:
        raise Failure("irregular crossing", {"s": rounded(exc.record.s)}) from exc
    except ValueError as exc:
        raise SchemaError(str(exc), "") from exc
    return _doc("maslov", rs_index=fraction_str(Fraction(idx)))


def _graded(path: str) -> GradedLagrangian:
    x = jsonio.load_frame(jsonio.read(path))
    if not isinstance(x, GradedLagrangian):
        raise SchemaError("a graded frame needs theta or k", "/theta")
    return x


def cmd_degree(args: argparse.Namespace) -> dict[str, Any]:
    a, b = _graded(args.a), _graded(args.b)
    try:
        d = grading.degree(a, b)
    except grading.NotTransverse as exc:
        raise Failure(str(exc)) from exc
    except grading.GradingError as exc:
        raise SchemaError(str(exc), "") from exc
    return _doc("degree", degree=d, N=a.modulus)


# sequences


def _torus_generator(g: quilt.Generator) -> dict[str, Any]:
    return {"points": [[rounded(v) for v in p] for p in g.points], "degree": g.degree}


def _toric_generator(g: toric.ToricGenerator) -> dict[str, Any]:
    return {
        "points": [[[rounded(z.real), rounded(z.imag)] for z in p] for p in g.points],
        "angles": [fraction_str(a) for a in g.angles],
        "index": g.index,
        "degree": g.degree,
    }


def _generators(seq: Any) -> tuple[list[Any], list[dict[str, Any]]]:
    try:
        if isinstance(seq, toric.ToricSequence):
            gens = toric.perturbed_generators(seq, n_mod=seq.modulus)
            return gens, [_toric_generator(g) for g in gens]
        gens = quilt.intersection_points(seq)
    except (quilt.QuiltError, grading.GradingError, toric.ToricError) as exc:
        raise Failure(str(exc), getattr(exc, "witness", None)) from exc
    return gens, [_torus_generator(g) for g in gens]


def cmd_quilt(args: argparse.Namespace) -> dict[str, Any]:
    seq = jsonio.load_sequence(jsonio.read(args.sequence))
    gens, rows = _generators(seq)
    degs = sorted(g.degree for g in gens)
    if args.action == "generators":
        return _doc("generators", count=len(gens), generators=rows)
    if args.action == "degrees":
        if isinstance(seq, toric.ToricSequence):
            return _doc("degrees", degrees=degs, indices=toric.index_distribution(gens))
        routes = quilt.all_degrees(seq, np.random.default_rng(args.seed)) if gens else (None, None, None)
        body = {"definition": routes[0], "alternative_a": routes[1], "alternative_b": routes[2], "degrees": degs}
        if len(set(routes)) != 1:
            raise Failure("degree routes disagree", body)
        return _doc("degrees", **body)
    if args.action == "compose":
        return _compose_sequence(seq, gens, args.at)
    return _homology(seq, gens, args.oracle)


def _compose_sequence(seq: Any, gens: list[Any], at: int) -> dict[str, Any]:
    if isinstance(seq, toric.ToricSequence):
        try:
            new, elim = toric.compose_at(seq, at)
        except toric.ToricError as exc:
            raise Failure(str(exc), exc.witness) from exc
        after, rows = _generators(new)
        ok, msg = toric.match_generators(gens, after, lambda g: toric.drop_point(g, at))
        body = {"position": at, "ok": ok, "note": msg, "before": len(gens), "after": len(after),
                "relation": jsonio.dump_relation(elim.relation), "generators": rows}
    else:
        try:
            res = quilt.compose_at(seq, at)
        except quilt.NotEmbedded as exc:
            raise Failure(str(exc), exc.witness) from exc
        except (IndexError, ValueError) as exc:
            raise SchemaError(str(exc), "") from exc
        after, rows = _generators(res.sequence)
        ok, msg = quilt.check_bijection(gens, after, res.mapping)
        body = {"position": at, "ok": ok, "note": msg, "before": len(gens), "after": len(after),
                "sequence": jsonio.dump_torus_sequence(res.sequence), "generators": rows}
    if ok and sorted(g.degree for g in gens) != sorted(g.degree for g in after):
        ok, body["ok"], body["note"] = False, False, "degree multiset changed"
    if not ok:
        raise Failure(body["note"], body)
    return _doc("compose-at", **body)


def _homology(seq: Any, gens: list[Any], oracle_arg: str) -> dict[str, Any]:
    if oracle_arg == "zero":
        oracle: Any = "zero"
    else:
        odoc = jsonio.read(oracle_arg)
        jsonio.validate(odoc, jsonio.ORACLE)
        keys = list(range(len(gens)))
        if "matrix" in odoc:
            m = np.asarray(odoc["matrix"], dtype=np.int64)
            if m.shape != (len(gens), len(gens)):
                raise SchemaError(f"matrix must be {len(gens)}x{len(gens)}", "/matrix")
            oracle = complexes.matrix_oracle(keys, m)
        else:
            for i, (s, t, _) in enumerate(odoc["counts"]):
                if not (0 <= s < len(gens) and 0 <= t < len(gens)):
                    raise SchemaError("generator index out of range", f"/counts/{i}")
            oracle = complexes.dict_oracle({(s, t): c for s, t, c in odoc["counts"]})
    try:
        cx = complexes.from_oracle(list(range(len(gens))), [g.degree for g in gens], seq.modulus, oracle)
        complexes.validate(cx)
    except complexes.ComplexError as exc:
        raise Failure(str(exc), exc.witness) from exc
    h = complexes.homology(cx)
    return _doc(
        "homology",
        N=seq.modulus,
        generators=len(gens),
        total_rank=complexes.total_rank(h),
        degrees={str(d): x.as_dict() for d, x in sorted(h.items())},
    )


# toric


def cmd_toric(args: argparse.Namespace) -> dict[str, Any]:
    try:
        if args.action == "calc":
            rep = toric.calc_chain(args.n, args.N)
            if not rep["ok"]:
                raise Failure("reduction chain failed", rep)
            return _doc("toric-calc", **rep)
        if args.action == "tau":
            rows = []
            for k in range(1, args.n + 1):
                r = toric.reduced_space_scale(k, args.n)
                rows.append({"k": k, **{key: fraction_str(v) for key, v in r.items()}})
            return _doc("toric-tau", n=args.n, unit="pi", tau=fraction_str(toric.tau(args.n)), reduced=rows)
        return _toric_compose(args)
    except toric.ToricError as exc:
        raise SchemaError(str(exc), "") from exc


def _toric_compose(args: argparse.Namespace) -> dict[str, Any]:
    n, k = args.n, args.k
    rng = np.random.default_rng(args.seed)
    if k == 1:
        split = toric.product_relation(toric.clifford(1, n), toric.clifford(n - 1, n))
        a, b, known = toric.sigma(2, n).relation(), toric.sigma_single(1, n).relation().transpose(), [split]
    else:
        a, b, known = toric.clifford(k - 1, n), toric.sigma(k, n).relation(), [toric.clifford(n)]
    c = toric.compose_toric(a, b, rng, args.samples, known=known)
    body = {
        "first": a.name,
        "second": b.name,
        "embedded": c.embedded,
        "identified_as": c.identified_as,
        "samples": c.samples,
        "min_singular": rounded(c.min_singular),
        "lagrangian_defect": rounded(c.lagrangian_defect),
        "relation": jsonio.dump_relation(c.relation),
    }
    if not c.embedded or c.identified_as is None:
        raise Failure("composition is not the expected embedded relation", {**body, **c.witness})
    return _doc("toric-compose", **body)


# verification


def cmd_verify(args: argparse.Namespace) -> dict[str, Any]:
    params = {"instances": args.instances, "n_max": args.n_max, "N": args.N, "tol": args.tol}
    names = args.suite or ["all"]
    if "all" in names:
        report = verify.verify_all(args.seed, **params)
    elif len(names) == 1:
        report = verify.run_suite(names[0], args.seed, **params)
    else:
        report = verify.verify_all(args.seed, suites=names, **params)
    for r in report.get("reports", [report]):
        status = "PASS" if r["pass"] else "FAIL"
        print(f"{status} {r['suite']}: {r['passed']}/{r['instances']} instances", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(dumps(report))
    if not report["pass"]:
        raise Failure("verification failed", report)
    return report


# parser


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _even_modulus(text: str) -> int:
    v = int(text)
    if v < 2 or v % 2:
        raise argparse.ArgumentTypeError("must be an even integer >= 2")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quiltlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compose", help="compose two linear correspondences")
    c.add_argument("first")
    c.add_argument("second")
    c.set_defaults(func=cmd_compose)

    m = sub.add_parser("maslov", help="index of a pair of Lagrangian paths (moving path first)")
    m.add_argument("--pair", nargs=2, metavar=("MOVING", "FIXED"), required=True)
    m.set_defaults(func=cmd_maslov)

    d = sub.add_parser("degree", help="degree of a transverse pair of graded Lagrangians")
    d.add_argument("--a", required=True)
    d.add_argument("--b", required=True)
    d.set_defaults(func=cmd_degree)

    q = sub.add_parser("quilt", help="cyclic sequences of correspondences")
    q.add_argument("action", choices=["generators", "degrees", "compose", "homology"])
    q.add_argument("sequence")
    q.add_argument("--at", type=int, default=1, help="position of the space composed away")
    q.add_argument("--oracle", default="zero", help="'zero' or a JSON file of strip counts")
    q.add_argument("--seed", type=_seed, default=0)
    q.set_defaults(func=cmd_quilt)

    t = sub.add_parser("toric", help="Clifford torus computations in projective space")
    t.add_argument("action", choices=["calc", "compose", "tau"])
    t.add_argument("--n", type=_positive, required=True)
    t.add_argument("--k", type=_positive, default=2, help="1 selects the split composition")
    t.add_argument("--N", type=_even_modulus, default=2)
    t.add_argument("--samples", type=_positive, default=1000)
    t.add_argument("--seed", type=_seed, default=0)
    t.set_defaults(func=cmd_toric)

    v = sub.add_parser("verify", help="run randomized verification suites")
    v.add_argument("--suite", action="append", choices=[*verify.SUITES, "all"])
    v.add_argument("--instances", type=_positive)
    v.add_argument("--n-max", type=_positive)
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--N", type=_even_modulus)
    v.add_argument("--tol", type=float)
    v.add_argument("--out", help="also write the report to this file")
    v.set_defaults(func=cmd_verify)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_MALFORMED
    try:
        out = args.func(args)
    except SchemaError as exc:
        print(f"error: malformed input at {exc.pointer}: {exc.message}", file=sys.stderr)
        return EXIT_MALFORMED
    except Failure as exc:
        sys.stdout.write(dumps(_doc("failure", message=str(exc), witness=exc.witness)))
        return EXIT_FAILED
    sys.stdout.write(dumps(out))
    return EXIT_OK


def main() -> None:
    sys.exit(run())
