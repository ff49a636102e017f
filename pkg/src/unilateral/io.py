"""System files, JSON reports and DOT export."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ._validation import check_dynamics_matrix
from .system import InputMatrix

SIG_DIGITS = 12


class InputFormatError(ValueError):
    """Malformed system file; the message names the offending line or field."""


@dataclass
class SystemData:
    A: np.ndarray
    A_raw: list
    B: InputMatrix | None
    m: int | None


def _field_error(field: str, msg: str) -> InputFormatError:
    return InputFormatError(f"field {field!r}: {msg}")


def _parse_matrix(raw: Any) -> np.ndarray:
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise _field_error("A", "expected a non-empty array of row arrays")
    n = len(raw)
    for i, row in enumerate(raw):
        if len(row) != n:
            raise _field_error("A", f"row {i + 1} has {len(row)} entries, expected {n}")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise _field_error("A", f"entry ({i + 1}, {j + 1}) is not a number: {v!r}")
    try:
        return check_dynamics_matrix(raw)
    except ValueError as exc:
        raise _field_error("A", str(exc)) from None


def _parse_columns(raw: Any, n: int, field: str = "B") -> InputMatrix:
    if isinstance(raw, str):
        try:
            cols = InputMatrix.parse(raw)
        except ValueError as exc:
            raise _field_error(field, str(exc)) from None
    elif isinstance(raw, list):
        pairs = []
        for j, item in enumerate(raw):
            if not isinstance(item, dict) or set(item) - {"node", "sign"} or len(item) != 2:
                raise _field_error(field, f"column {j + 1} must be an object with 'node' and 'sign'")
            node, sign = item["node"], item["sign"]
            if isinstance(node, bool) or not isinstance(node, int):
                raise _field_error(field, f"column {j + 1}: node must be an integer")
            if sign not in (1, -1) or isinstance(sign, bool):
                raise _field_error(field, f"column {j + 1}: sign must be +1 or -1")
            pairs.append((node, sign))
        try:
            cols = InputMatrix(tuple(pairs))
        except ValueError as exc:
            raise _field_error(field, str(exc)) from None
    else:
        raise _field_error(field, "expected a list of {node, sign} objects")
    try:
        cols.check_nodes(n)
    except ValueError as exc:
        raise _field_error(field, str(exc)) from None
    return cols


def parse_system(doc: Any) -> SystemData:
    """Build a :class:`SystemData` from a decoded JSON document.

    A report written by :func:`analysis_report` is accepted too: its
    ``input`` section holds the original system.
    """
    if isinstance(doc, dict) and "input" in doc and "A" not in doc:
        doc = doc["input"]
    if not isinstance(doc, dict):
        raise InputFormatError("top level must be a JSON object")
    if "A" not in doc:
        raise _field_error("A", "missing")
    A = _parse_matrix(doc["A"])
    B = _parse_columns(doc["B"], A.shape[0]) if doc.get("B") is not None else None
    m = doc.get("m")
    if m is not None and (isinstance(m, bool) or not isinstance(m, int)):
        raise _field_error("m", "must be an integer")
    return SystemData(A, doc["A"], B, m)


def _load_csv(text: str) -> SystemData:
    rows = []
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
            continue
        try:
            rows.append([float(c) for c in row])
        except ValueError:
            raise InputFormatError(f"line {lineno}: non-numeric entry in {row!r}") from None
    if not rows:
        raise InputFormatError("CSV matrix is empty")
    n = len(rows)
    for lineno, row in enumerate(rows, start=1):
        if len(row) != n:
            raise InputFormatError(f"matrix row {lineno} has {len(row)} entries, expected {n}")
    return SystemData(_parse_matrix(rows), rows, None, None)


def load_system(path: str | Path) -> SystemData:
    """Read a JSON system (``{"A", "B", "m"}``) or a plain dense CSV matrix."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from None
    if path.suffix.lower() == ".csv":
        return _load_csv(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_system(doc)


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if x == 0 or not math.isfinite(x):
        return float(x)
    return float(f"{x:.{digits}g}")


def to_jsonable(obj: Any) -> Any:
    """Numpy-aware conversion with floats cut to ``SIG_DIGITS`` significant digits."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": round_sig(obj.real), "im": round_sig(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    if isinstance(obj, InputMatrix):
        return obj.to_json()
    return obj


def _cone_section(cone) -> dict:
    decomp = cone.decomposition
    return {
        "spectrum": {
            "eigenvalues": [b.eigenvalue for b in decomp.blocks],
            "block_sizes": list(decomp.block_sizes),
        },
        "cone": {
            "generators": [
                {"block": g.block + 1, "level": g.level, "part": g.part, "case": g.case,
                 "kind": g.kind, "vector": g.vector}
                for g in cone.generators
            ],
            "lineality_dim": cone.lineality_dim,
            "lineality_basis": cone.lineality_basis,
        },
    }


def _subset_section(Q, V1, Vs, flags, enlargement) -> dict:
    return {
        "Q": {"columns": Q.columns.T, "origins": [{"block": b + 1, "level": k, "part": p} for b, k, p in Q.origins]},
        "subset": {
            "matching_subset": list(V1),
            "controllable_subset": list(Vs),
            "node_flags": {str(i + 1): f for i, f in enumerate(flags)},
            "enlargement": [{**e, "columns": [c + 1 for c in e["columns"]]} for e in enlargement],
        },
    }


def report_header(tolerances: dict) -> dict:
    from . import __version__

    return {"tool": "unilateral", "version": __version__, "significant_digits": SIG_DIGITS,
            "tolerances": tolerances}


def analysis_report(system: SystemData, B: InputMatrix, cone, Q, V1, Vs, flags, enlargement,
                    tolerances: dict) -> dict:
    out = {"header": report_header(tolerances), "input": {"A": system.A_raw, "B": B.to_json()}}
    out.update(_cone_section(cone))
    out.update(_subset_section(Q, V1, Vs, flags, enlargement))
    return to_jsonable(out)


def placement_report(system: SystemData, m: int, result, flags, tolerances: dict) -> dict:
    inp = {"A": system.A_raw, "m": m}
    if system.B is not None:
        inp["B"] = system.B.to_json()
    out = {"header": report_header(tolerances), "input": inp,
           "placement": {"B": result.B.to_json(), "B_text": str(result.B), "trace": result.trace}}
    out.update(_cone_section(result.cone))
    out.update(_subset_section(result.Q, result.V1, result.Vs, flags, result.enlargement))
    return to_jsonable(out)


def dump_report(report: dict, path: str | Path | None) -> str:
    text = json.dumps(report, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def to_dot(A: np.ndarray, drivers=(), controllable=()) -> str:
    """Graphviz digraph with an edge ``j -> i`` for every non-zero ``a_ij``, ``i != j``.

    Driver nodes are filled red; controllable nodes get a double circle.
    """
    A = np.asarray(A)
    n = A.shape[0]
    drivers, controllable = set(drivers), set(controllable)
    lines = ["digraph network {", "  node [shape=circle];"]
    for i in range(1, n + 1):
        attrs = []
        if i in drivers:
            attrs += ['style=filled', 'fillcolor=red']
        if i in controllable:
            attrs.append("shape=doublecircle")
        lines.append(f'  v{i} [label="{i}"{", " if attrs else ""}{", ".join(attrs)}];')
    for i in range(n):
        for j in range(n):
            if i != j and A[i, j] != 0:
                lines.append(f'  v{j + 1} -> v{i + 1} [label="{A[i, j]:.12g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
