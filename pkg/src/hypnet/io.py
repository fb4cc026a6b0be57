"""System files: JSON documents describing a complete network system.

Layout::

    {
      "name": "...",
      "graph": {"vertices": [...], "edges": [{"id", "tail", "head", "length", "size"}]},
      "coefficients": {"<edge>": {"M": poly, "N": poly, "Q": poly}},
      "boundary": {"local": {"<vertex>": basis}} | {"global": basis},
      "simulation": {"config": {...}, "initial": {"<edge>": profile}},
      "tolerances": {...},
      "notes": [...]
    }

A poly is a list of coefficient matrices A_0, A_1, ... (A(x) = sum A_j x^j);
a basis is a list of spanning vectors. Scalars are numbers, or [re, im] pairs
when complex. ``Q`` may be omitted, in which case it is synthesized.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from .coefficients import EdgeCoefficients, MatrixPolynomial
from .graph import GraphError, build_graph
from .system import GlobalBoundary, LocalBoundary, NetworkSystem, SystemError_
from .tolerances import Tolerances, default_tolerances

FORMAT_VERSION = 1


class SystemFileError(ValueError):
    """Invalid system file; ``path`` names the offending field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


_S_number = {"type": "number"}
_S_scalar = {"oneOf": [_S_number, {"type": "array", "items": _S_number, "minItems": 2, "maxItems": 2}]}
_S_vector = {"type": "array", "items": _S_scalar}
_S_matrix = {"type": "array", "items": _S_vector, "minItems": 1}
_S_poly = {"type": "array", "items": _S_matrix, "minItems": 1}
_S_basis = {"type": "array", "items": _S_vector}
_S_tol_props = {f: ({"type": "integer", "minimum": 1} if f in ("n_samples", "positive_trials")
                  else {"type": "number", "exclusiveMinimum": 0})
              for f in Tolerances.__dataclass_fields__}

SCHEMA = {
    "type": "object",
    "required": ["graph", "coefficients", "boundary"],
    "additionalProperties": False,
    "properties": {
        "format": {"type": "integer"},
        "name": {"type": "string"},
        "graph": {
            "type": "object",
            "required": ["edges"],
            "additionalProperties": False,
            "properties": {
                "vertices": {"type": "array", "items": {"type": "string"}},
                "edges": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["id", "tail", "head", "length"],
                        "additionalProperties": False,
                        "properties": {
                            "id": {"type": "string"},
                            "tail": {"type": "string"},
                            "head": {"type": "string"},
                            "length": {"type": "number", "exclusiveMinimum": 0},
                            "size": {"type": "integer", "minimum": 1},
                        },
                    },
                },
            },
        },
        "coefficients": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["M"],
                "additionalProperties": False,
                "properties": {"M": _S_poly, "N": _S_poly, "Q": _S_poly},
            },
        },
        "boundary": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
            "properties": {
                "local": {"type": "object", "additionalProperties": _S_basis},
                "global": _S_basis,
            },
        },
        "simulation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "config": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "t_final": {"type": "number", "minimum": 0},
                        "cells_per_unit": {"type": "integer", "minimum": 1},
                        "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                        "stride": {"type": "integer", "minimum": 1},
                        "scheme": {"enum": ["characteristic_upwind", "local_lax_friedrichs"]},
                        "closure": {"enum": ["projection", "characteristic"]},
                        "threads": {"type": "integer", "minimum": 1},
                        "probes": {"type": "array", "items": {"type": "string"}},
                    },
                },
                "initial": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "object",
                        "required": ["profile"],
                        "properties": {
                            "profile": {"enum": ["sine", "cosine", "bump", "constant", "samples"]},
                            "amplitude": _S_vector,
                            "offset": _S_vector,
                            "freq": _S_number,
                            "phase": _S_number,
                            "centre": _S_number,
                            "width": {"type": "number", "exclusiveMinimum": 0},
                            "x": {"type": "array", "items": _S_number},
                            "values": {"type": "array"},
                        },
                        "additionalProperties": False,
                    },
                },
            },
        },
        "tolerances": {"type": "object", "additionalProperties": False, "properties": _S_tol_props},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}


def _field_path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def validate(doc) -> None:
    """Schema check; raises SystemFileError naming the deepest failing field."""
    v = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(v.iter_errors(doc), key=lambda e: (-len(e.absolute_path), str(e.absolute_path)))
    if errors:
        e = jsonschema.exceptions.best_match(errors)
        raise SystemFileError(e.message, _field_path(e.absolute_path))


# decoding ---------------------------------------------------------------------

def _decode_depth(data, depth: int, path: str) -> np.ndarray:
    """Decode an array whose scalars sit at nesting depth ``depth``."""
    def conv(x, d):
        if d == 0:
            if isinstance(x, list):
                return complex(x[0], x[1])
            return x
        if not isinstance(x, list):
            raise SystemFileError(f"expected an array at nesting depth {depth}", path)
        return [conv(t, d - 1) for t in x]
    nested = conv(data, depth)
    try:
        A = np.array(nested)
    except ValueError:
        raise SystemFileError("rows of unequal length", path) from None
    if A.dtype == object or (A.size and A.ndim != depth):
        raise SystemFileError("rows of unequal length", path)
    if np.iscomplexobj(A):
        return A.real.copy() if not np.any(A.imag) else A
    return A.astype(float)


def _poly(data, n: int, path: str) -> MatrixPolynomial:
    C = _decode_depth(data, 3, path)
    if C.shape[1:] != (n, n):
        raise SystemFileError(f"coefficient matrices must be {n}x{n} to match the edge size, "
                              f"got {C.shape[1]}x{C.shape[2]}", path)
    return MatrixPolynomial(C)


def _basis_from(data, n: int, path: str) -> np.ndarray:
    if len(data) == 0:
        return np.zeros((n, 0))
    B = _decode_depth(data, 2, path)
    if B.shape[1] != n:
        raise SystemFileError(f"spanning vectors must have length {n}, got {B.shape[1]}", path)
    return B.T.copy()


def from_dict(doc: dict) -> NetworkSystem:
    validate(doc)
    try:
        g = build_graph(doc["graph"]["edges"], doc["graph"].get("vertices"))
    except GraphError as exc:
        raise SystemFileError(str(exc), "graph") from None
    coefs = {}
    cdoc = doc["coefficients"]
    for e in g.edges:
        if e.id not in cdoc:
            raise SystemFileError(f"no coefficients for edge {e.id!r}", "coefficients")
        c = cdoc[e.id]
        base = f"coefficients.{e.id}"
        M = _poly(c["M"], e.size, base + ".M")
        N = _poly(c["N"], e.size, base + ".N") if "N" in c else None
        Q = _poly(c["Q"], e.size, base + ".Q") if "Q" in c else None
        coefs[e.id] = EdgeCoefficients(M, N, Q)
    extra = set(cdoc) - {e.id for e in g.edges}
    if extra:
        raise SystemFileError(f"coefficients for unknown edges {sorted(extra)}", "coefficients")
    bdoc = doc["boundary"]
    if "local" in bdoc:
        spaces = {}
        for v, data in bdoc["local"].items():
            if v not in g.vertices:
                raise SystemFileError(f"unknown vertex {v!r}", f"boundary.local.{v}")
            spaces[v] = _basis_from(data, g.k_v(v), f"boundary.local.{v}")
        missing = [v for v in g.vertices if v not in spaces]
        if missing:
            raise SystemFileError(f"missing boundary spaces for vertices {missing}", "boundary.local")
        boundary = LocalBoundary(spaces)
    else:
        boundary = GlobalBoundary(_basis_from(bdoc["global"], 2 * g.k, "boundary.global"))
    tol = default_tolerances()
    if "tolerances" in doc:
        tol = tol.updated(**doc["tolerances"])
    sim = doc.get("simulation")
    if sim is not None:
        for eid in sim.get("initial", {}):
            if eid not in {e.id for e in g.edges}:
                raise SystemFileError(f"initial data for unknown edge {eid!r}", f"simulation.initial.{eid}")
    try:
        return NetworkSystem(g, coefs, boundary, tolerances=tol, name=doc.get("name", "system"),
                             notes=list(doc.get("notes", [])), simulation=sim)
    except SystemError_ as exc:
        raise SystemFileError(str(exc)) from None


def loads(text: str) -> NetworkSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    return from_dict(doc)


def load(path) -> NetworkSystem:
    return loads(Path(path).read_text())


# encoding ---------------------------------------------------------------------

def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return _num(z.real) if z.imag == 0 else [_num(z.real), _num(z.imag)]
    f = float(x)
    if not math.isfinite(f):
        raise SystemFileError(f"non-finite value {f}")
    return f + 0.0       # drop the sign of -0.0


def _encode(A) -> list:
    A = np.asarray(A)
    if A.ndim == 0:
        return _num(A[()])
    return [_encode(a) for a in A]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _encode(obj)
    if isinstance(obj, (str, bool)) or obj is None:
        return obj
    if isinstance(obj, (int, float, complex, np.number)):
        return _num(obj)
    raise SystemFileError(f"cannot serialize {type(obj).__name__}")


def to_dict(system: NetworkSystem) -> dict:
    g = system.graph
    doc = {"format": FORMAT_VERSION, "name": system.name,
           "graph": {"vertices": list(g.vertices),
                     "edges": [{"id": e.id, "tail": e.tail, "head": e.head,
                                "length": _num(e.length), "size": e.size} for e in g.edges]}}
    coefs = {}
    for e in g.edges:
        c = system.coefficients[e.id]
        d = {"M": _encode(c.M.coeffs), "N": _encode(c.N.coeffs)}
        if e.id not in system.synthesized_Q:
            d["Q"] = _encode(c.Q.coeffs)
        coefs[e.id] = d
    doc["coefficients"] = coefs
    if system.is_local:
        doc["boundary"] = {"local": {v: _encode(np.asarray(system.Y(v)).T) for v in g.vertices}}
    else:
        doc["boundary"] = {"global": _encode(np.asarray(system.boundary.basis).T)}
    if system.simulation is not None:
        doc["simulation"] = _jsonable(system.simulation)
    base = default_tolerances().to_dict()
    diff = {k: v for k, v in system.tolerances.to_dict().items() if v != base[k]}
    if diff:
        doc["tolerances"] = _jsonable(diff)
    if system.notes:
        doc["notes"] = [str(n) for n in system.notes]
    return doc


def _flat(x) -> bool:
    """Lists of scalars and [re, im] pairs are written on one line."""
    return isinstance(x, list) and all(
        not isinstance(t, (list, dict)) or (isinstance(t, list) and all(
            not isinstance(s, (list, dict)) for s in t)) for t in x)


def _dump(x, indent: int, width: int = 100) -> str:
    pad = " " * indent
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_dump(v, indent + 2, width)}' for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, list):
        inline = json.dumps(x, allow_nan=False)
        if _flat(x) and (len(inline) + indent <= width or all(not isinstance(t, list) for t in x)):
            return inline
        if not x:
            return "[]"
        items = [pad + "  " + _dump(v, indent + 2, width) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(x, allow_nan=False)


def dumps(system: NetworkSystem) -> str:
    return _dump(to_dict(system), 0) + "\n"


def dump(system: NetworkSystem, path) -> None:
    Path(path).write_text(dumps(system))
