"""Run configuration schema and on-disk formats.

Matrix files are text: one header line
``twirling-matrix rows=R cols=C convention=vec-col-stack`` followed by ``R``
lines of ``2C`` floats (``re im`` interleaved, row-major). Floats are written
with ``repr`` so that loading is bit-exact.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .errors import InvalidInput, InvalidSpec
from .kit import LevyMeasure, RepresentationKit
from .lie_core import FAMILIES, LieRepresentation, build_representation, group_element, group_exp
from .superop import VEC_CONVENTION, GKLSForm, Superoperator

_number = {"type": "number"}
_vector = {"type": "array", "items": _number}
_matrix = {"type": "array", "items": _vector}
_complex = {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}
_cmatrix = {"type": "array", "items": {"type": "array", "items": _complex}}
_times = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 1}]}

_atom = {
    "type": "object",
    "additionalProperties": False,
    "required": ["weight"],
    "properties": {
        "weight": {"type": "number", "exclusiveMinimum": 0},
        "coords": _vector,
        "unitary": _cmatrix,
    },
    "oneOf": [{"required": ["coords"]}, {"required": ["unitary"]}],
}

CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "representation": {
            "type": "object",
            "additionalProperties": False,
            "required": ["family"],
            "properties": {
                "family": {"enum": list(FAMILIES)},
                "params": {"type": "object"},
                "cutoff_radius": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "kit": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "b": _vector,
                "a": _matrix,
                "eta": {"type": "array", "items": _atom},
            },
        },
        "t": _times,
        "n_samples": {"type": "integer", "minimum": 1},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "block_size": {"type": "integer", "minimum": 1},
        "workers": {"type": "integer", "minimum": 1},
        "dump_endpoints": {"type": "boolean"},
        "study": {"enum": ["truncation", "dt", "n"]},
        "m_list": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "dt_list": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "n_list": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "oracle": {
            "type": "object",
            "additionalProperties": False,
            "required": ["charges"],
            "properties": {
                "b": _number,
                "a": {"type": "number", "minimum": 0},
                "jumps": {"type": "array", "items": {"type": "array", "items": _number,
                                                     "minItems": 2, "maxItems": 2}},
                "cutoff": {"type": "number", "exclusiveMinimum": 0},
                "charges": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}},
        },
    },
}


def validate_config(cfg: Any) -> dict:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidSpec(f"config error at {where}: {exc.message}") from None
    return cfg


def load_config(path: Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidSpec(f"cannot read config: {exc}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"config is not valid JSON: {exc}") from None
    return validate_config(cfg)


def complex_array(data) -> np.ndarray:
    """Array of ``[re, im]`` pairs to a complex array."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise InvalidSpec("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def complex_to_json(arr: np.ndarray) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def representation_from_config(spec: dict) -> LieRepresentation:
    params = dict(spec.get("params", {}))
    if spec["family"] == "custom" and "generators" in params:
        params["generators"] = complex_array(params["generators"])
    if "cutoff_radius" in spec:
        params["cutoff_radius"] = spec["cutoff_radius"]
    return build_representation(spec["family"], **params)


def kit_from_config(rep: LieRepresentation, spec: dict) -> RepresentationKit:
    n = rep.dim_group
    b = spec.get("b", [0.0] * n)
    a = spec.get("a", np.zeros((n, n)).tolist())
    if len(b) != n:
        raise InvalidSpec(f"kit.b must have {n} entries")
    if np.asarray(a).shape != (n, n):
        raise InvalidSpec(f"kit.a must be {n}x{n}")
    atoms = []
    for atom in spec.get("eta", []):
        if "coords" in atom:
            if len(atom["coords"]) != n:
                raise InvalidSpec(f"atom coordinates must have {n} entries")
            g = group_exp(rep, atom["coords"])
        else:
            u = complex_array(atom["unitary"])
            if u.shape != (rep.dim_hilbert, rep.dim_hilbert):
                raise InvalidSpec("atom unitary has the wrong shape")
            g = group_element(u)
        atoms.append((g, atom["weight"]))
    try:
        return RepresentationKit(b, a, LevyMeasure(tuple(atoms)))
    except InvalidInput as exc:
        raise InvalidSpec(f"invalid kit: {exc}") from None


def times_from_config(cfg: dict, default=(1.0,)) -> list[float]:
    t = cfg.get("t", list(default))
    return [float(t)] if isinstance(t, (int, float)) else [float(x) for x in t]


# ---------------------------------------------------------------------------
# Matrix text format
# ---------------------------------------------------------------------------

def format_matrix(m: np.ndarray) -> str:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise InvalidInput("matrix file holds a 2-d array")
    lines = [f"twirling-matrix rows={m.shape[0]} cols={m.shape[1]} convention={VEC_CONVENTION}"]
    for row in m:
        lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines:
        raise InvalidInput("empty matrix file")
    head = lines[0].split()
    if not head or head[0] != "twirling-matrix":
        raise InvalidInput("missing matrix header")
    fields = dict(item.split("=", 1) for item in head[1:])
    if fields.get("convention") != VEC_CONVENTION:
        raise InvalidInput(f"unsupported convention {fields.get('convention')!r}")
    rows, cols = int(fields["rows"]), int(fields["cols"])
    body = lines[1:1 + rows]
    if len(body) != rows:
        raise InvalidInput("truncated matrix file")
    out = np.empty((rows, cols), dtype=complex)
    for i, line in enumerate(body):
        vals = [float(v) for v in line.split()]
        if len(vals) != 2 * cols:
            raise InvalidInput(f"row {i} has {len(vals)} numbers, expected {2 * cols}")
        out[i] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    return out


def write_matrix(path: Path, m: np.ndarray) -> None:
    Path(path).write_text(format_matrix(m))


def read_matrix(path: Path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())


def write_superop(path: Path, s: Superoperator) -> None:
    write_matrix(path, s.matrix)


def read_superop(path: Path) -> Superoperator:
    m = read_matrix(path)
    return Superoperator(m, int(round(np.sqrt(m.shape[0]))))


def gkls_to_json(form: GKLSForm) -> dict:
    out = {
        "H": complex_to_json(form.H),
        "pairs": [{"gamma": float(g), "F": complex_to_json(f)} for g, f in form.pairs],
        "residual": None,
    }
    if form.residual is not None:
        out["residual"] = {
            "rate": float(form.residual.rate),
            "atoms": [{"probability": float(p), "unitary": complex_to_json(g.unitary)}
                      for g, p in form.residual.atoms],
        }
    return out


def dump_json(path: Path, data: Any) -> None:
    Path(path).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
