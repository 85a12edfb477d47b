"""JSON project files and schedule reports.

Project file schema (``null`` stands for -inf, i.e. "no lag")::

    {
      "activities": ["a", "b", "c"],            # defines n and the order
      "start_finish": [[4, 0, null], ...],       # n x n, finite diagonal
      "start_start": [[...]],                    # optional, n x n
      "finish_start": [[...]],                   # optional, n x n
      "due_dates": [5, 5, 5],                    # optional vectors, length n
      "deadlines": [...],
      "release_times": [...],
      "release_deadlines": [...],
      "description": "free text"                 # optional, ignored
    }

Output is deterministic: keys are sorted and numbers are written in fixed
notation, reports with at most 9 significant digits.
"""

from __future__ import annotations

import json
import math
from decimal import Decimal

import numpy as np

from .errors import ProjectFileError
from .scheduling import VECTOR_FIELDS, ProjectModel, ScheduleFamily, Schedule

__all__ = ["parse_project", "dump_project", "emit_report", "format_number", "dumps"]

MATRIX_FIELDS = ("start_finish", "start_start", "finish_start")
_KNOWN = {"activities", "description", *MATRIX_FIELDS, *VECTOR_FIELDS}


def _reject_constant(name):
    raise ValueError(f"{name} is not allowed")


def _number(value, path: str) -> float:
    if value is None:
        return -math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProjectFileError(path, f"expected a number or null, got {type(value).__name__}")
    return float(value)


def _vector(data, path: str, n: int) -> list[float]:
    if not isinstance(data, list):
        raise ProjectFileError(path, "expected an array")
    if len(data) != n:
        raise ProjectFileError(path, f"expected {n} entries, got {len(data)}")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(data)]


def _matrix(data, path: str, n: int) -> list[list[float]]:
    if not isinstance(data, list):
        raise ProjectFileError(path, "expected an array of rows")
    if len(data) != n:
        raise ProjectFileError(path, f"expected {n} rows, got {len(data)}")
    return [_vector(row, f"{path}[{i}]", n) for i, row in enumerate(data)]


def parse_project(data: bytes | str) -> ProjectModel:
    """Parse and validate a project file; errors carry a JSON-path location."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProjectFileError("$", f"not valid UTF-8: {exc}") from None
    try:
        doc = json.loads(data, parse_constant=_reject_constant)
    except ValueError as exc:
        raise ProjectFileError("$", f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ProjectFileError("$", "expected a JSON object")
    unknown = sorted(set(doc) - _KNOWN)
    if unknown:
        raise ProjectFileError(f"$.{unknown[0]}", "unknown key")

    names = doc.get("activities")
    if not isinstance(names, list) or not names:
        raise ProjectFileError("$.activities", "expected a non-empty array of names")
    for i, s in enumerate(names):
        if not isinstance(s, str):
            raise ProjectFileError(f"$.activities[{i}]", "activity names must be strings")
    n = len(names)

    kwargs = {}
    for key in MATRIX_FIELDS:
        if doc.get(key) is not None:
            kwargs[key] = _matrix(doc[key], f"$.{key}", n)
    if "start_finish" not in kwargs:
        raise ProjectFileError("$.start_finish", "required")
    for i in range(n):
        if kwargs["start_finish"][i][i] == -math.inf:
            raise ProjectFileError(
                f"$.start_finish[{i}][{i}]", "minimum duration must not be null"
            )
    for key in VECTOR_FIELDS:
        if doc.get(key) is not None:
            kwargs[key] = _vector(doc[key], f"$.{key}", n)
    return ProjectModel(names=names, **kwargs)


def format_number(value: float, digits: int | None = 9) -> str | None:
    """Fixed-notation text for ``value``; ``None`` for -inf.

    ``digits`` limits significant digits; ``None`` keeps the shortest
    round-trip representation.
    """
    v = float(value)
    if v == -math.inf:
        return None
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize {v!r}")
    if digits is not None and abs(v) < 10.0 ** -digits:
        return "0"
    text = repr(v) if digits is None else f"{v:.{digits}g}"
    out = format(Decimal(text), "f")
    if "." in out:
        out = out.rstrip("0").rstrip(".")
    return "0" if out in ("-0", "") else out


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _is_flat(seq) -> bool:
    return all(not isinstance(_plain(v), (list, tuple, dict)) for v in seq)


def dumps(obj, digits: int | None = 9, indent: int = 0) -> str:
    """Serialize ``obj`` as JSON with sorted keys and fixed-notation numbers.

    Flat arrays are written on one line, so matrices print one row per line.
    """
    obj = _plain(obj)
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        text = format_number(obj, digits)
        return "null" if text is None else text
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  {json.dumps(str(k), ensure_ascii=False)}: {dumps(obj[k], digits, indent + 1)}'
            for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if _is_flat(obj):
            return "[" + ", ".join(dumps(v, digits, indent + 1) for v in obj) + "]"
        items = [pad + "  " + dumps(v, digits, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_project(model: ProjectModel) -> bytes:
    """Serialize ``model`` as a project file (exact round trip through :func:`parse_project`)."""
    doc = {"activities": list(model.names)}
    for key in MATRIX_FIELDS:
        m = np.asarray(getattr(model, key))
        if key == "start_finish" or np.isfinite(m).any():
            doc[key] = m.tolist()
    for key in VECTOR_FIELDS:
        v = getattr(model, key)
        if v is not None:
            doc[key] = np.asarray(v).ravel().tolist()
    return (dumps(doc, digits=None) + "\n").encode("utf-8")


def _vec(v) -> list | None:
    return None if v is None else np.asarray(v).ravel().tolist()


def emit_report(
    family: ScheduleFamily, schedule: Schedule | None = None, diagnostics=()
) -> bytes:
    """Serialize a solved family and one of its schedules (the default if omitted)."""
    schedule = family.default if schedule is None else schedule
    fam = family.family
    lo, hi = family.start_bounds()
    doc = {
        "problem": family.problem.value,
        "activities": list(family.model.names),
        "objective": family.objective,
        "start": _vec(schedule.start),
        "finish": _vec(schedule.finish),
        "parameter": _vec(schedule.parameter),
        "family": {
            "kind": fam.kind.value,
            "generator": np.asarray(fam.generator).tolist(),
            "lower": _vec(fam.lower),
            "upper": _vec(fam.upper),
            "start_lower": _vec(lo),
            "start_upper": _vec(hi),
        },
        "diagnostics": list(family.diagnostics) + list(diagnostics),
    }
    return (dumps(doc) + "\n").encode("utf-8")
