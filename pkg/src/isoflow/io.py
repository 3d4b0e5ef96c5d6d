"""Matrix JSON and trajectory CSV/JSON serialization."""

from __future__ import annotations

import io as _io
import json
import math

import numpy as np


class MatrixFormatError(ValueError):
    pass


def _reject_constant(name):
    raise MatrixFormatError(f"non-finite number {name} in matrix input")


def _as_rows(rows, n=None) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise MatrixFormatError("rows must be a non-empty array of arrays")
    size = len(rows) if n is None else n
    if len(rows) != size:
        raise MatrixFormatError(f"expected {size} rows, got {len(rows)}")
    out = np.empty((size, size))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != size:
            raise MatrixFormatError(f"row {i + 1} must hold {size} numbers")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise MatrixFormatError(f"entry ({i + 1},{j + 1}) is not a number")
            if not math.isfinite(v):
                raise MatrixFormatError(f"entry ({i + 1},{j + 1}) is not finite")
            out[i, j] = v
    return out


def parse_matrix(text: str) -> np.ndarray:
    """Parse ``{"n": n, "rows": [[...], ...]}`` or a bare array of rows."""
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON: {exc}") from None
    if isinstance(data, list):
        return _as_rows(data)
    if not isinstance(data, dict) or "rows" not in data:
        raise MatrixFormatError('matrix JSON needs a "rows" field')
    n = data.get("n")
    if n is not None and (isinstance(n, bool) or not isinstance(n, int) or n < 1):
        raise MatrixFormatError('"n" must be a positive integer')
    return _as_rows(data["rows"], n)


def read_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=float)
    return {"n": int(M.shape[0]), "rows": [[float(v) for v in row] for row in M]}


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def csv_header(n: int, extra=("spec_drift", "y_drift")) -> list:
    cols = ["t"] + [f"m_{i + 1}_{j + 1}" for i in range(n) for j in range(n)]
    return cols + list(extra)


def trajectory_csv(times, states, columns: dict) -> str:
    """One row per sample: ``t``, the entries of M row by row, then ``columns``."""
    states = np.asarray(states, dtype=float)
    n = states.shape[1]
    buf = _io.StringIO()
    buf.write(",".join(csv_header(n, columns.keys())) + "\n")
    for k, t in enumerate(times):
        values = [t, *states[k].ravel(), *(col[k] for col in columns.values())]
        buf.write(",".join("%.17g" % v for v in values) + "\n")
    return buf.getvalue()


def read_trajectory_csv(text: str):
    """Inverse of :func:`trajectory_csv`: ``(times, states, columns)``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    m = sum(1 for h in header if h.startswith("m_"))
    n = math.isqrt(m)
    states = data[:, 1 : 1 + m].reshape(-1, n, n)
    columns = {h: data[:, 1 + m + k] for k, h in enumerate(header[1 + m :])}
    return data[:, 0], states, columns
