"""Matrix files and canonical JSON output.

A matrix file is a JSON object ``{"n": n, "re": [[...]], "im": [[...]]}``.
Reports are written as canonical JSON: sorted keys, compact separators,
floats with 17 significant digits, so equal reports give equal bytes.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np

from .errors import (
    MalformedMatrixFileError,
    MissingMatrixFileError,
    NonFiniteMatrixError,
    RaggedMatrixError,
)


def _keep_constant(token):
    # json maps NaN/Infinity tokens here; keep them so the finiteness check reports them
    return float(token)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _square_part(doc: dict, key: str, n: int, path) -> np.ndarray:
    rows = doc.get(key)
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedMatrixFileError(f"{path}: field {key!r} must be a list of rows")
    if len(rows) != n or any(len(r) != n for r in rows):
        shape = [len(r) for r in rows]
        raise RaggedMatrixError(
            f"{path}: field {key!r} must be {n}x{n}, got row lengths {shape}")
    for r in rows:
        for v in r:
            if not _is_number(v):
                raise MalformedMatrixFileError(f"{path}: field {key!r} has non-numeric entry {v!r}")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteMatrixError(f"{path}: field {key!r} has non-finite entries")
    return arr


def matrix_from_document(doc, source="<document>") -> np.ndarray:
    if not isinstance(doc, dict):
        raise MalformedMatrixFileError(f"{source}: expected a JSON object with n, re, im")
    missing = [k for k in ("n", "re", "im") if k not in doc]
    if missing:
        raise MalformedMatrixFileError(f"{source}: missing field(s) {', '.join(missing)}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MalformedMatrixFileError(f"{source}: n must be a positive integer, got {n!r}")
    re = _square_part(doc, "re", n, source)
    im = _square_part(doc, "im", n, source)
    # assign parts directly; re + 1j * im would lose signed zeros
    A = np.empty((n, n), dtype=np.complex128)
    A.real, A.imag = re, im
    return A


def parse_matrix(path) -> np.ndarray:
    """Read a matrix file and return re + i*im as complex128."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise MissingMatrixFileError(f"{path}: no such matrix file") from None
    except OSError as exc:
        raise MissingMatrixFileError(f"{path}: cannot read matrix file ({exc.strerror})") from None
    try:
        doc = json.loads(text, parse_constant=_keep_constant)
    except json.JSONDecodeError as exc:
        raise MalformedMatrixFileError(f"{path}: not valid JSON ({exc.msg}, line {exc.lineno})") from None
    return matrix_from_document(doc, path)


def matrix_document(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    return {"n": int(A.shape[0]), "re": A.real.tolist(), "im": A.imag.tolist()}


def write_matrix(A, path):
    """Write A as a matrix file; floats use repr, so parse_matrix round-trips bit-exactly."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("cannot write non-finite entries")
    Path(path).write_text(json.dumps(matrix_document(A)) + "\n")


def _encode(obj, out: list):
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialize non-finite float {x!r}")
        out.append("%.17g" % x)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"object keys must be strings, got {key!r}")
            if i:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_dumps(obj) -> str:
    out: list[str] = []
    _encode(obj, out)
    return "".join(out)


def emit_report(report, path=None, stream=None):
    """Write canonical JSON for ``report`` (a dict or anything with to_dict()) to path or stream."""
    doc = report.to_dict() if hasattr(report, "to_dict") else report
    text = canonical_dumps(doc) + "\n"
    if path is not None:
        tmp = Path(f"{path}.tmp")
        tmp.write_text(text)
        os.replace(tmp, path)
    elif stream is not None:
        stream.write(text)
    return text


def subspace_document(U) -> dict:
    return {"n": U.n, "dim": U.dim,
            "basis": [{"re": X.real.tolist(), "im": X.imag.tolist()} for X in U.basis]}
