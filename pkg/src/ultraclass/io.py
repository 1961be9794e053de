"""File formats: sequences, weight functions, matrix indexes, operators, reports.

Every reader raises :class:`FormatError` naming the offending path and field.
Reports are written with 12 significant digits and a fixed key order so that
identical inputs give byte-identical files.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .matrices import WeightMatrix
from .omega import WeightFunction
from .seqcore import WeightSequence
from .spectral import NormTable, Operator, OperatorSystem
from .verdict import _plain

DIGITS = 12


class FormatError(ValueError):
    def __init__(self, path, field: str, message: str):
        super().__init__(f"{path}: field {field!r}: {message}")
        self.path = str(path)
        self.field = field


def _load(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise FormatError(path, "<file>", "no such file") from None
    except json.JSONDecodeError as exc:
        raise FormatError(path, "<document>", f"invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _get(doc, key, path, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(path, key, "missing")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise FormatError(path, key, f"expected {getattr(kind, '__name__', kind)}")
    return val


# ---------------------------------------------------------------------------
# reports

def _round(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(f"{obj:.{DIGITS}g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round(v) for v in obj]
    return obj


def to_json(obj) -> str:
    """Deterministic JSON text with 12 significant digits."""
    return json.dumps(_round(_plain(obj)), indent=2, allow_nan=False) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(obj))
    return path


# ---------------------------------------------------------------------------
# sequences

def sequence_to_dict(M: WeightSequence, meta: dict | None = None) -> dict:
    return {"name": M.name, "K": M.K, "log_values": M.logM.tolist(), "meta": meta or {}}


def write_sequence(M: WeightSequence, path, meta: dict | None = None) -> Path:
    return write_json(sequence_to_dict(M, meta), path)


def read_sequence(path) -> WeightSequence:
    doc = _load(path)
    name = _get(doc, "name", path, str)
    K = _get(doc, "K", path, int)
    vals = _get(doc, "log_values", path, list)
    if len(vals) != K + 1:
        raise FormatError(path, "log_values", f"expected K+1 = {K + 1} values, got {len(vals)}")
    try:
        arr = np.array(vals, dtype=float)
    except (TypeError, ValueError):
        raise FormatError(path, "log_values", "entries must be numbers") from None
    if arr[0] != 0.0:
        raise FormatError(path, "log_values", "log_values[0] must be 0.0")
    try:
        return WeightSequence(name, arr)
    except ValueError as exc:
        raise FormatError(path, "log_values", str(exc)) from None


# ---------------------------------------------------------------------------
# weight functions

def read_weight_function(path) -> WeightFunction:
    doc = _load(path)
    family = _get(doc, "family", path, str)
    params = _get(doc, "params", path, dict)
    t_max = _get(doc, "t_max", path, (int, float))
    try:
        return WeightFunction(family, params, float(t_max))
    except (KeyError, TypeError) as exc:
        raise FormatError(path, "params", f"missing or malformed parameter {exc}") from None
    except ValueError as exc:
        raise FormatError(path, "params", str(exc)) from None


def write_weight_function(w: WeightFunction, path) -> Path:
    return write_json(w.to_dict(), path)


# ---------------------------------------------------------------------------
# matrices

def write_matrix(W: WeightMatrix, directory, stem: str = "matrix") -> Path:
    """One sequence file per entry plus an index file; returns the index path."""
    directory = Path(directory)
    files = []
    for i, (lam, M) in enumerate(W.entries):
        name = f"{stem}-{i}.json"
        write_sequence(M, directory / name, {"lambda": lam})
        files.append(name)
    return write_json({"lambdas": W.lambdas, "sequence_files": files}, directory / f"{stem}-index.json")


def read_matrix(path) -> WeightMatrix:
    doc = _load(path)
    lambdas = _get(doc, "lambdas", path, list)
    files = _get(doc, "sequence_files", path, list)
    if len(lambdas) != len(files):
        raise FormatError(path, "sequence_files", "length differs from lambdas")
    base = Path(path).parent
    seqs = [read_sequence(base / f) for f in files]
    try:
        return WeightMatrix(tuple(zip(lambdas, seqs)))
    except ValueError as exc:
        raise FormatError(path, "sequence_files", str(exc)) from None


# ---------------------------------------------------------------------------
# operators

def _coeff(c, path, field):
    if isinstance(c, (int, float)):
        return complex(c)
    if isinstance(c, list) and len(c) == 2 and all(isinstance(x, (int, float)) for x in c):
        return complex(c[0], c[1])
    raise FormatError(path, field, "coeff must be a number or [re, im]")


def read_operators(path) -> OperatorSystem:
    """JSON list of operators, each a list of ``{"coeff", "multi_index"}`` terms."""
    doc = _load(path)
    if not isinstance(doc, list) or not doc:
        raise FormatError(path, "<document>", "expected a nonempty list of operators")
    ops = []
    for i, op in enumerate(doc):
        if not isinstance(op, list) or not op:
            raise FormatError(path, f"[{i}]", "operator must be a nonempty list of terms")
        terms = []
        for j, term in enumerate(op):
            where = f"[{i}][{j}]"
            mi = _get(term, "multi_index", path, list)
            if not all(isinstance(x, int) for x in mi):
                raise FormatError(path, where + ".multi_index", "entries must be integers")
            terms.append((tuple(mi), _coeff(_get(term, "coeff", path), path, where + ".coeff")))
        try:
            ops.append(Operator(tuple(terms)))
        except ValueError as exc:
            raise FormatError(path, f"[{i}]", str(exc)) from None
    try:
        return OperatorSystem(tuple(ops))
    except ValueError as exc:
        raise FormatError(path, "<document>", str(exc)) from None


def write_operators(P: OperatorSystem, path) -> Path:
    return write_json([Q.to_list() for Q in P.operators], path)


# ---------------------------------------------------------------------------
# norm tables

def write_norm_table(table: NormTable, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(table.to_csv())
    return path
