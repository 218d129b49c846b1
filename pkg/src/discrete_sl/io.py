"""JSON problem files.

Matrices are row-major nested lists of ``[re, im]`` pairs.  Every document is
checked against the schemas in ``discrete_sl/schemas`` before any array is
built.  Floats are written with Python's shortest round-trip ``repr``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from referencing import Registry, Resource

from .atkinson import AtkinsonProblem
from .errors import SchemaError, ValidationError
from .numkernel import DEFAULT_TOL, InertiaSignature, Tolerances
from .problem import BoundaryChart, BoundaryCondition, BoundaryRaw, SLEquation

SCHEMA_NAMES = ("common", "problem", "atkinson", "jump", "trace")


@lru_cache(maxsize=None)
def _registry() -> Registry:
    pkg = resources.files("discrete_sl") / "schemas"
    docs = {}
    for name in SCHEMA_NAMES:
        docs[f"{name}.schema.json"] = json.loads((pkg / f"{name}.schema.json").read_text())
    return Registry().with_resources((uri, Resource.from_contents(doc)) for uri, doc in docs.items())


def schema(name: str) -> dict:
    return _registry().contents(f"{name}.schema.json")


def validate_document(doc, name: str):
    validator = jsonschema.Draft202012Validator(schema(name), registry=_registry())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(f"{name} document invalid at {where}: {err.message}")


# -- matrices -----------------------------------------------------------------

def matrix_from_json(m) -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise SchemaError(f"matrix must be rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_json(m) -> list:
    a = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _stack(mats, count: int, d: int, name: str) -> np.ndarray:
    if len(mats) != count:
        raise ValidationError(f"{name} needs {count} matrices, got {len(mats)}")
    out = [matrix_from_json(m) for m in mats]
    for k, m in enumerate(out):
        if m.shape != (d, d):
            raise ValidationError(f"{name}[{k}] must be {d}x{d}, got {m.shape[0]}x{m.shape[1]}")
    return np.array(out)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ValidationError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc


# -- problems -----------------------------------------------------------------

def boundary_from_json(doc, d: int, tol: Tolerances = DEFAULT_TOL) -> BoundaryCondition:
    if "raw" in doc:
        A = matrix_from_json(doc["raw"]["A"])
        B = matrix_from_json(doc["raw"]["B"])
        if A.shape != (2 * d, 2 * d) or B.shape != (2 * d, 2 * d):
            raise ValidationError(f"A and B must be {2 * d}x{2 * d}")
        return BoundaryRaw(A, B, tol=tol)
    S = matrix_from_json(doc["chart"]["S"])
    if S.shape != (2 * d, 2 * d):
        raise ValidationError(f"S must be {2 * d}x{2 * d}")
    return BoundaryChart(tuple(doc["chart"]["K"]), S, tol=tol)


def boundary_to_json(bc: BoundaryCondition) -> dict:
    if isinstance(bc, BoundaryChart):
        return {"chart": {"K": list(bc.K), "S": matrix_to_json(bc.S)}}
    return {"raw": {"A": matrix_to_json(bc.A), "B": matrix_to_json(bc.B)}}


def equation_from_json(doc, tol: Tolerances = DEFAULT_TOL) -> SLEquation:
    d, N = doc["d"], doc["N"]
    return SLEquation(_stack(doc["Pinv"], N + 1, d, "Pinv"), _stack(doc["Q"], N, d, "Q"),
                      _stack(doc["W"], N, d, "W"), tol=tol)


def problem_from_json(doc, tol: Tolerances = DEFAULT_TOL) -> tuple[SLEquation, BoundaryCondition]:
    validate_document(doc, "problem")
    return equation_from_json(doc, tol), boundary_from_json(doc["bc"], doc["d"], tol)


def problem_to_json(eq: SLEquation, bc: BoundaryCondition) -> dict:
    return {
        "d": eq.d,
        "N": eq.N,
        "Pinv": [matrix_to_json(m) for m in eq.Pinv],
        "Q": [matrix_to_json(m) for m in eq.Q],
        "W": [matrix_to_json(m) for m in eq.W],
        "bc": boundary_to_json(bc),
    }


def atkinson_from_json(doc, tol: Tolerances = DEFAULT_TOL) -> tuple[AtkinsonProblem, BoundaryCondition | None]:
    validate_document(doc, "atkinson")
    d, N = doc["d"], doc["N"]
    ap = AtkinsonProblem(doc["partition"], _stack(doc["What"], N + 1, d, "What"),
                         _stack(doc["Qhat"], N + 1, d, "Qhat"), _stack(doc["Pinvhat"], N, d, "Pinvhat"),
                         tol=tol)
    bc = boundary_from_json(doc["bc"], d, tol) if "bc" in doc else None
    return ap, bc


def atkinson_to_json(ap: AtkinsonProblem, bc: BoundaryCondition | None = None) -> dict:
    out = {
        "d": ap.d,
        "N": ap.N,
        "partition": [float(x) for x in ap.partition],
        "What": [matrix_to_json(m) for m in ap.What],
        "Qhat": [matrix_to_json(m) for m in ap.Qhat],
        "Pinvhat": [matrix_to_json(m) for m in ap.Pinvhat],
    }
    if bc is not None:
        out["bc"] = boundary_to_json(bc)
    return out


@dataclass
class JumpSpec:
    space: str
    target: InertiaSignature
    eq: SLEquation | None = None
    atkinson: AtkinsonProblem | None = None
    chart: BoundaryChart | None = None
    t_max: float = 0.25
    steps: int = 20


def jumpspec_from_json(doc, tol: Tolerances = DEFAULT_TOL) -> JumpSpec:
    validate_document(doc, "jump")
    space = doc["space"]
    key = "atkinson" if space == "atkinson" else "problem"
    if key not in doc:
        raise SchemaError(f"space {space!r} needs a {key!r} entry")
    if space == "atkinson":
        ap, bc = atkinson_from_json(doc[key], tol)
        eq = None
    else:
        eq, bc = problem_from_json(doc[key], tol)
        ap = None
    if not isinstance(bc, BoundaryChart):
        raise ValidationError("jump experiments need the boundary condition as a chart")
    spec = JumpSpec(space, InertiaSignature(*doc["target"]), eq, ap, bc)
    spec.t_max = float(doc.get("t_max", spec.t_max))
    spec.steps = int(doc.get("steps", spec.steps))
    return spec


@dataclass
class TraceSpec:
    eq: SLEquation
    bc: BoundaryCondition
    Pinv: np.ndarray | None
    Q: np.ndarray | None
    W: np.ndarray | None
    S: np.ndarray | None
    ts: np.ndarray

    def at(self, t: float):
        eq = self.eq.perturbed(self.Pinv, self.Q, self.W, t)
        bc = self.bc.with_S(self.bc.S + t * self.S) if self.S is not None else self.bc
        return eq, bc


def tracespec_from_json(doc, tol: Tolerances = DEFAULT_TOL) -> TraceSpec:
    validate_document(doc, "trace")
    eq, bc = problem_from_json(doc["problem"], tol)
    direction = doc["direction"]
    d, N = eq.d, eq.N
    Pinv = _stack(direction["Pinv"], N + 1, d, "direction.Pinv") if "Pinv" in direction else None
    Q = _stack(direction["Q"], N, d, "direction.Q") if "Q" in direction else None
    W = _stack(direction["W"], N, d, "direction.W") if "W" in direction else None
    S = None
    if "S" in direction:
        if not isinstance(bc, BoundaryChart):
            raise ValidationError("an S direction needs the boundary condition as a chart")
        S = matrix_from_json(direction["S"])
        if S.shape != (2 * d, 2 * d):
            raise ValidationError(f"direction.S must be {2 * d}x{2 * d}")
    return TraceSpec(eq, bc, Pinv, Q, W, S, np.asarray(doc["t"], dtype=float))
