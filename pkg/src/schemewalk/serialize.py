"""JSON encoding/decoding for the object kinds the CLI moves around.

Kinds: scheme, cayley, matrix, tensor, fusion-system, distribution.
Conventions: matrices are nested row-major arrays; complex entries are
[re, im] pairs (a matrix is complex iff its entries are pairs); floats
are emitted via repr, which round-trips exactly.  Loading validates the
object's own invariants and raises ValidationError on anything
malformed, so a loaded object is ready to use.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import groups
from .anyons import make_fusion_system
from .errors import ValidationError
from .parameters import IntersectionTensor, KreinTensor
from .schemes import AssociationScheme, verify_axioms
from .spectral import BoseMesnerDecomposition

KINDS = ("scheme", "cayley", "matrix", "tensor", "fusion-system", "distribution")


def encode_matrix(arr: np.ndarray) -> list:
    a = np.asarray(arr)
    if np.iscomplexobj(a):
        return [[[float(v.real), float(v.imag)] for v in row] for row in a]
    if a.dtype.kind in "iu":
        return [[int(v) for v in row] for row in a]
    return [[float(v) for v in row] for row in a]


def decode_matrix(data) -> np.ndarray:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ValidationError("matrix must be a non-empty list of rows")
    width = len(data[0])
    if width == 0 or any(len(r) != width for r in data):
        raise ValidationError("matrix rows must be non-empty and equal length")
    first = data[0][0]
    if isinstance(first, list):
        def entry(v):
            if not (isinstance(v, list) and len(v) == 2
                    and all(isinstance(p, (int, float)) for p in v)):
                raise ValidationError(f"complex entry must be a [re, im] pair, got {v!r}")
            return complex(v[0], v[1])
        return np.array([[entry(v) for v in row] for row in data], dtype=np.complex128)
    flat = [v for row in data for v in row]
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in flat):
        raise ValidationError("matrix entries must be numbers or [re, im] pairs")
    if all(isinstance(v, int) for v in flat):
        return np.array(data, dtype=np.int64)
    return np.array(data, dtype=np.float64)


def _encode_complex(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _decode_complex(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(v[0], v[1])
    raise ValidationError(f"expected a number or [re, im] pair, got {v!r}")


def to_jsonable(kind: str, obj):
    if kind == "scheme":
        out = {"n": obj.n, "d": obj.d, "relation": [[int(v) for v in row] for row in obj.relation]}
        if obj.labels is not None:
            out["labels"] = list(obj.labels)
        return out
    if kind == "cayley":
        out = {"order": obj.order, "cayley": [[int(v) for v in row] for row in obj.cayley]}
        if obj.name:
            out["name"] = obj.name
        return out
    if kind == "matrix":
        return encode_matrix(obj)
    if kind == "tensor":
        if isinstance(obj, IntersectionTensor):
            d, entries = obj.d, obj.p
        elif isinstance(obj, KreinTensor):
            d, entries = obj.d, obj.q
        else:
            entries = np.asarray(obj)
            d = entries.shape[0] - 1
        if entries.dtype.kind in "iu":
            nested = [[[int(v) for v in row] for row in slab] for slab in entries]
        else:
            nested = [[[float(v) for v in row] for row in slab] for slab in entries]
        return {"d": int(d), "entries": nested}
    if kind == "fusion-system":
        out = {"labels": list(obj.labels),
               "N": [[[int(v) for v in row] for row in slab] for slab in obj.N]}
        if obj.F:
            out["F"] = {",".join(map(str, key)): encode_matrix(mat)
                        for key, mat in obj.F.items()}
        if obj.R:
            out["R"] = {",".join(map(str, key)): _encode_complex(val)
                        for key, val in obj.R.items()}
        if obj.twist is not None:
            out["twist"] = [_encode_complex(t) for t in obj.twist]
        return out
    if kind == "distribution":
        return [float(v) for v in np.asarray(obj).ravel()]
    raise ValidationError(f"unknown kind {kind!r}; kinds: {KINDS}")


def from_jsonable(kind: str, data, validate: bool = True):
    if kind == "scheme":
        if not isinstance(data, dict) or not {"n", "d", "relation"} <= set(data):
            raise ValidationError('scheme JSON must have keys "n", "d", "relation"')
        labels = tuple(data["labels"]) if "labels" in data else None
        scheme = AssociationScheme(
            n=int(data["n"]), d=int(data["d"]),
            relation=np.array(data["relation"], dtype=np.int64), labels=labels,
        )
        if validate:
            report = verify_axioms(scheme)
            if not report.passed:
                axiom, witness = report.violations[0]
                raise ValidationError(
                    f"relation matrix violates scheme axiom ({axiom}); witness {witness}"
                )
        return scheme
    if kind == "cayley":
        if not isinstance(data, dict) or not {"order", "cayley"} <= set(data):
            raise ValidationError('cayley JSON must have keys "order", "cayley"')
        if int(data["order"]) != len(data["cayley"]):
            raise ValidationError("declared order does not match the table size")
        return groups.from_table(data["cayley"], name=data.get("name", "group"))
    if kind == "matrix":
        return decode_matrix(data)
    if kind == "tensor":
        if not isinstance(data, dict) or not {"d", "entries"} <= set(data):
            raise ValidationError('tensor JSON must have keys "d", "entries"')
        d = int(data["d"])
        entries = data["entries"]
        flat = []
        try:
            for slab in entries:
                for row in slab:
                    flat.extend(row)
        except TypeError:
            raise ValidationError("tensor entries must be triply nested lists") from None
        arr = np.array(entries,
                       dtype=np.int64 if all(isinstance(v, int) for v in flat) else np.float64)
        if arr.shape != (d + 1, d + 1, d + 1):
            raise ValidationError(f"tensor must have shape {(d + 1,) * 3}, got {arr.shape}")
        return arr
    if kind == "fusion-system":
        if not isinstance(data, dict) or not {"labels", "N"} <= set(data):
            raise ValidationError('fusion-system JSON must have keys "labels", "N"')
        f_data = None
        if "F" in data:
            f_data = {}
            for key, mat in data["F"].items():
                parts = key.split(",")
                if len(parts) != 4:
                    raise ValidationError(f'F key must be "a,b,c,e", got {key!r}')
                f_data[tuple(int(p) for p in parts)] = decode_matrix(mat)
        r_data = None
        if "R" in data:
            r_data = {}
            for key, val in data["R"].items():
                parts = key.split(",")
                if len(parts) != 3:
                    raise ValidationError(f'R key must be "a,b,c", got {key!r}')
                r_data[tuple(int(p) for p in parts)] = _decode_complex(val)
        twist = [_decode_complex(t) for t in data["twist"]] if "twist" in data else None
        return make_fusion_system(data["labels"], np.array(data["N"], dtype=np.int64),
                                  f_data, r_data, twist)
    if kind == "distribution":
        if not isinstance(data, list) or not data:
            raise ValidationError("distribution must be a non-empty JSON array")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in data):
            raise ValidationError("distribution entries must be numbers")
        vec = np.array(data, dtype=np.float64)
        if validate:
            if vec.min() < 0.0:
                raise ValidationError(f"distribution has a negative entry: {vec.min()!r}")
            if abs(vec.sum() - 1.0) > 1e-9:
                raise ValidationError(f"distribution sums to {vec.sum()!r}, not 1")
        return vec
    raise ValidationError(f"unknown kind {kind!r}; kinds: {KINDS}")


def decomposition_to_jsonable(dec: BoseMesnerDecomposition) -> dict:
    """One-way export of spectral data (idempotents, m, P, Q)."""
    return {
        "n": dec.n,
        "d": dec.d,
        "multiplicities": list(dec.multiplicities),
        "eigenmatrix_P": encode_matrix(dec.eigenmatrix_P),
        "eigenmatrix_Q": encode_matrix(dec.eigenmatrix_Q),
        "idempotents": [encode_matrix(e) for e in dec.idempotents],
    }


def save(path, kind: str, obj) -> None:
    Path(path).write_text(json.dumps(to_jsonable(kind, obj)) + "\n")


def load(path, kind: str, validate: bool = True):
    text = Path(path).read_text()
    return loads(text, kind, validate=validate)


def loads(text: str, kind: str, validate: bool = True):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return from_jsonable(kind, data, validate=validate)
