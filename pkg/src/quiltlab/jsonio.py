"""JSON documents for spaces, frames, paths and cyclic sequences (schema ``quiltlab/1``)."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import maslov, toric
from .corrlin import LinearCorrespondence
from .grading import GradedCorrespondence, GradedLagrangian, grade, graded
from .quilt import CyclicSequence, GradedSubtorus
from .symplinalg import LagrangianFrame, SymplecticSpace, dual, product, standard_space
from .torus import LatticeCorrespondence, TorusManifold

SCHEMA_VERSION = "quiltlab/1"

_NUMBER_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_INT_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}

SPACE = {
    "type": "object",
    "required": ["n"],
    "properties": {
        "n": {"type": "integer", "minimum": 0},
        "form": {"oneOf": [{"const": "standard"}, _NUMBER_MATRIX]},
    },
}

_GRADING = {
    "theta": {"type": "number"},
    "k": {"type": "integer"},
    "N": {"type": "integer", "minimum": 2, "multipleOf": 2},
}

FRAME = {
    "type": "object",
    "required": ["space", "columns"],
    "properties": {"space": SPACE, "columns": _NUMBER_MATRIX, "schema": {"const": SCHEMA_VERSION}, **_GRADING},
}

CORRESPONDENCE = {
    "type": "object",
    "required": ["source", "target", "frame"],
    "properties": {
        "source": SPACE,
        "target": SPACE,
        "frame": _NUMBER_MATRIX,
        "schema": {"const": SCHEMA_VERSION},
        **_GRADING,
    },
}

PATH = {
    "oneOf": [
        {
            "type": "object",
            "required": ["space", "samples"],
            "properties": {"space": SPACE, "samples": {"type": "array", "minItems": 2, "items": _NUMBER_MATRIX}},
        },
        {
            "type": "object",
            "required": ["kind", "frame"],
            "properties": {"kind": {"const": "rotation"}, "angle": {"type": "number"}, "frame": FRAME},
        },
        FRAME,
    ]
}

_TORUS_CORR = {
    "type": "object",
    "required": ["direction"],
    "properties": {
        "direction": _INT_MATRIX,
        "offset": {"type": "array", "items": {"type": "number"}},
        **_GRADING,
    },
}

_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}

_CPN_CORR = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["clifford", "sigma", "relation"]},
        "m": {"type": "integer", "minimum": 0},
        "n": {"type": "integer", "minimum": 1},
        "levels": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "transpose": {"type": "boolean"},
        "source": {"type": "object"},
        "target": {"type": "object"},
        "moment_rows": {"type": "array", "items": {"type": "array", "items": _RATIONAL}},
        "moment_values": {"type": "array", "items": _RATIONAL},
        "angle_rows": _INT_MATRIX,
        "name": {"type": "string"},
    },
}

SEQUENCE = {
    "type": "object",
    "required": ["provider", "correspondences", "N"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "provider": {"enum": ["torus", "cpn"]},
        "manifolds": {"type": "array"},
        "correspondences": {"type": "array", "minItems": 1},
        "widths": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "perturbations": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "N": {"type": "integer", "minimum": 2, "multipleOf": 2},
    },
    "allOf": [
        {
            "if": {"properties": {"provider": {"const": "torus"}}},
            "then": {
                "required": ["manifolds"],
                "properties": {
                    "manifolds": {"items": {"type": "object", "required": ["n"], "properties": {"n": {"type": "integer", "minimum": 0}}}},
                    "correspondences": {"items": _TORUS_CORR},
                },
            },
        },
        {
            "if": {"properties": {"provider": {"const": "cpn"}}},
            "then": {"properties": {"correspondences": {"items": _CPN_CORR}}},
        },
    ],
}

ORACLE = {
    "type": "object",
    "properties": {
        "matrix": _INT_MATRIX,
        "counts": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}, "minItems": 3, "maxItems": 3}},
    },
    "oneOf": [{"required": ["matrix"]}, {"required": ["counts"]}],
}

REPORT = {
    "type": "object",
    "required": ["schema", "suite", "instances", "failures", "seed", "pass"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "suite": {"type": "string"},
        "instances": {"type": "integer", "minimum": 0},
        "failures": {"type": "array"},
        "failure_count": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "pass": {"type": "boolean"},
        "params": {"type": "object"},
        "summary": {"type": "object"},
        "timing": {"type": "object"},
    },
}


class SchemaError(ValueError):
    """Malformed input document; ``pointer`` locates the offending value."""

    def __init__(self, message: str, pointer: str = "") -> None:
        super().__init__(f"{pointer or '/'}: {message}")
        self.message = message
        self.pointer = pointer or "/"


def pointer(path: Any) -> str:
    return "".join(f"/{p}" for p in path)


def validate(doc: Any, schema: dict[str, Any]) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        e = errors[0]
        raise SchemaError(e.message, pointer(e.absolute_path))


def read(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc


def dumps(doc: Any) -> str:
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, default=_default) + "\n"


def _default(x: Any) -> Any:
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


def fraction_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rounded(x: float, digits: int = 12) -> float:
    """Float rounded for stable report text; ``-0.0`` becomes ``0.0``."""
    return float(round(float(x), digits)) + 0.0


# linear objects


def load_space(doc: dict[str, Any], at: str = "") -> SymplecticSpace:
    n = int(doc["n"])
    form = doc.get("form", "standard")
    if form == "standard":
        return standard_space(n)
    mat = np.asarray(form, dtype=float)
    if mat.shape != (2 * n, 2 * n):
        raise SchemaError(f"form must be {2 * n}x{2 * n}", f"{at}/form")
    try:
        return SymplecticSpace(mat)
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc), f"{at}/form") from exc


def dump_space(sp: SymplecticSpace) -> dict[str, Any]:
    if sp.is_standard:
        return {"n": sp.n, "form": "standard"}
    return {"n": sp.n, "form": sp.form.tolist()}


def _columns(cols: list[list[float]], rows: int, at: str) -> np.ndarray:
    if not cols:
        return np.zeros((rows, 0))
    arr = np.asarray(cols, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != rows:
        raise SchemaError(f"each column needs {rows} entries", at)
    return arr.T


def _graded(lag: LagrangianFrame, doc: dict[str, Any], at: str) -> GradedLagrangian | None:
    if "theta" not in doc and "k" not in doc:
        return None
    n_mod = int(doc.get("N", 2))
    try:
        if "theta" in doc:
            return graded(lag, float(doc["theta"]), n_mod)
        return grade(lag, int(doc["k"]), n_mod)
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc), f"{at}/theta") from exc


def load_frame(doc: dict[str, Any], at: str = "") -> LagrangianFrame | GradedLagrangian:
    validate(doc, FRAME)
    sp = load_space(doc["space"], f"{at}/space")
    try:
        lag = LagrangianFrame(sp, _columns(doc["columns"], sp.dim, f"{at}/columns"))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc), f"{at}/columns") from exc
    g = _graded(lag, doc, at)
    return g if g is not None else lag


def dump_frame(x: LagrangianFrame | GradedLagrangian) -> dict[str, Any]:
    lag = x.frame if isinstance(x, GradedLagrangian) else x
    out: dict[str, Any] = {"schema": SCHEMA_VERSION, "space": dump_space(lag.ambient), "columns": lag.frame.T.tolist()}
    if isinstance(x, GradedLagrangian):
        out["theta"] = x.theta
        out["N"] = x.modulus
    return out


def load_correspondence(doc: dict[str, Any], at: str = "") -> LinearCorrespondence | GradedCorrespondence:
    """A correspondence document, or a frame document read as a Lagrangian from the point."""
    if "columns" in doc and "frame" not in doc:
        x = load_frame(doc, at)
        from .corrlin import lagrangian_as_correspondence

        lag = x.frame if isinstance(x, GradedLagrangian) else x
        corr = lagrangian_as_correspondence(lag)
        if isinstance(x, GradedLagrangian):
            return GradedCorrespondence(corr, GradedLagrangian(corr.lag, x.theta, x.modulus))
        return corr
    validate(doc, CORRESPONDENCE)
    src = load_space(doc["source"], f"{at}/source")
    tgt = load_space(doc["target"], f"{at}/target")
    amb = product(dual(src), tgt)
    try:
        lag = LagrangianFrame(amb, _columns(doc["frame"], amb.dim, f"{at}/frame"))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc), f"{at}/frame") from exc
    corr = LinearCorrespondence(src, tgt, lag)
    g = _graded(lag, doc, at)
    return GradedCorrespondence(corr, g) if g is not None else corr


def dump_correspondence(c: LinearCorrespondence | GradedCorrespondence) -> dict[str, Any]:
    corr = c.corr if isinstance(c, GradedCorrespondence) else c
    out: dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "source": dump_space(corr.source),
        "target": dump_space(corr.target),
        "frame": corr.frame.T.tolist(),
    }
    if isinstance(c, GradedCorrespondence):
        out["theta"] = c.graded.theta
        out["N"] = c.graded.modulus
    return out


def load_path(doc: dict[str, Any], at: str = "") -> maslov.LagrangianPath:
    validate(doc, PATH)
    if doc.get("kind") == "rotation":
        x = load_frame(doc["frame"], f"{at}/frame")
        lag = x.frame if isinstance(x, GradedLagrangian) else x
        return maslov.rotation(lag, float(doc.get("angle", np.pi)))
    if "samples" in doc:
        sp = load_space(doc["space"], f"{at}/space")
        frames = [_columns(f, sp.dim, f"{at}/samples/{i}") for i, f in enumerate(doc["samples"])]
        try:
            return maslov.sampled(sp, frames)
        except SchemaError:
            raise
        except ValueError as exc:
            raise SchemaError(str(exc), f"{at}/samples") from exc
    x = load_frame(doc, at)
    return maslov.constant(x.frame if isinstance(x, GradedLagrangian) else x)


# sequences


def _rational(x: int | str) -> Fraction:
    return Fraction(x)


def load_sequence(doc: dict[str, Any]) -> CyclicSequence | toric.ToricSequence:
    validate(doc, SEQUENCE)
    if doc["provider"] == "torus":
        return _load_torus_sequence(doc)
    return _load_cpn_sequence(doc)


def _load_torus_sequence(doc: dict[str, Any]) -> CyclicSequence:
    n_mod = int(doc["N"])
    mans = tuple(TorusManifold(int(m["n"])) for m in doc["manifolds"])
    r1 = len(mans)
    corrs = doc["correspondences"]
    if len(corrs) != r1:
        raise SchemaError(f"expected {r1} correspondences, one per manifold", "/correspondences")
    out = []
    for j, c in enumerate(corrs):
        at = f"/correspondences/{j}"
        src, tgt = mans[j], mans[(j + 1) % r1]
        rows = src.dim + tgt.dim
        direction = np.asarray(c["direction"], dtype=np.int64).reshape(rows, -1) if c["direction"] else np.zeros((rows, 0), dtype=np.int64)
        if direction.shape[0] != rows:
            raise SchemaError(f"direction needs {rows} rows", f"{at}/direction")
        off = np.asarray(c.get("offset", [0.0] * rows), dtype=float)
        if off.shape != (rows,):
            raise SchemaError(f"offset needs {rows} entries", f"{at}/offset")
        try:
            lat = LatticeCorrespondence(src, tgt, direction, off)
        except SchemaError:
            raise
        except ValueError as exc:
            raise SchemaError(str(exc), f"{at}/direction") from exc
        if "theta" in c:
            out.append(GradedSubtorus.lifted(lat, float(c["theta"]), n_mod))
        else:
            out.append(GradedSubtorus.of(lat, int(c.get("k", 0)), n_mod))
    widths = tuple(float(w) for w in doc.get("widths", [1.0] * r1))
    if len(widths) != r1:
        raise SchemaError(f"expected {r1} widths", "/widths")
    perts_doc = doc.get("perturbations", [[0.0] * m.dim for m in mans])
    if len(perts_doc) != r1:
        raise SchemaError(f"expected {r1} perturbations", "/perturbations")
    perts = []
    for j, (p, m) in enumerate(zip(perts_doc, mans)):
        if len(p) != m.dim:
            raise SchemaError(f"perturbation needs {m.dim} entries", f"/perturbations/{j}")
        perts.append(np.asarray(p, dtype=float))
    try:
        return CyclicSequence(mans, tuple(out), widths, tuple(perts), n_mod)
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc), "/correspondences") from exc


def _load_cpn_relation(c: dict[str, Any], at: str) -> toric.ToricRelation:
    kind = c["kind"]
    try:
        if kind == "clifford":
            if "m" not in c:
                raise SchemaError("clifford needs m", f"{at}/m")
            rel = toric.clifford(int(c["m"]), int(c.get("n", c["m"])))
        elif kind == "sigma":
            if "levels" not in c or "n" not in c:
                raise SchemaError("sigma needs levels and n", at)
            rel = toric.MomentFiberCorrespondence(frozenset(c["levels"]), int(c["n"])).relation()
        else:
            for key in ("source", "target", "moment_rows", "moment_values"):
                if key not in c:
                    raise SchemaError(f"relation needs {key}", at)
            src = toric.ToricSpace(int(c["source"]["m"]), _rational(c["source"].get("scale", 1)))
            tgt = toric.ToricSpace(int(c["target"]["m"]), _rational(c["target"].get("scale", 1)))
            rel = toric.ToricRelation(
                src,
                tgt,
                tuple(tuple(_rational(x) for x in r) for r in c["moment_rows"]),
                tuple(_rational(x) for x in c["moment_values"]),
                tuple(tuple(int(x) for x in r) for r in c.get("angle_rows", [])),
                c.get("name", ""),
            )
    except toric.ToricError as exc:
        raise SchemaError(str(exc), at) from exc
    return rel.transpose() if c.get("transpose") else rel


def _load_cpn_sequence(doc: dict[str, Any]) -> toric.ToricSequence:
    rels = tuple(_load_cpn_relation(c, f"/correspondences/{j}") for j, c in enumerate(doc["correspondences"]))
    if "widths" in doc and len(doc["widths"]) != len(rels):
        raise SchemaError(f"expected {len(rels)} widths", "/widths")
    for j, m in enumerate(doc.get("manifolds", [])):
        if j >= len(rels):
            raise SchemaError("more manifolds than correspondences", f"/manifolds/{j}")
        sp = rels[j].source
        if int(m.get("m", -1)) != sp.m or ("scale" in m and _rational(m["scale"]) != sp.scale):
            raise SchemaError(f"manifold does not match the source of correspondence {j}", f"/manifolds/{j}")
    try:
        return toric.ToricSequence(rels, int(doc["N"]))
    except toric.ToricError as exc:
        raise SchemaError(str(exc), "/correspondences") from exc


def dump_torus_sequence(seq: CyclicSequence) -> dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "provider": "torus",
        "manifolds": [{"n": m.n} for m in seq.manifolds],
        "correspondences": [
            {"direction": c.corr.direction.tolist(), "offset": c.corr.offset.tolist(), "theta": c.theta}
            for c in seq.correspondences
        ],
        "widths": list(seq.widths),
        "perturbations": [np.asarray(p).tolist() for p in seq.perturbations],
        "N": seq.modulus,
    }


def dump_relation(rel: toric.ToricRelation) -> dict[str, Any]:
    return {
        "kind": "relation",
        "name": rel.name,
        "source": {"m": rel.source.m, "scale": fraction_str(rel.source.scale)},
        "target": {"m": rel.target.m, "scale": fraction_str(rel.target.scale)},
        "moment_rows": [[fraction_str(x) for x in r] for r in rel.moment_rows],
        "moment_values": [fraction_str(v) for v in rel.moment_values],
        "angle_rows": [list(r) for r in rel.angle_rows],
    }
