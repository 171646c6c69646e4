"""Byte-stable JSON and CSV reports.

Floats are written with ``%.12e``, complex numbers as ``[re, im]``, keys
sorted.  Nothing time- or host-dependent is ever emitted.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np

FLOAT_FORMAT = "%.12e"


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return FLOAT_FORMAT % (x + 0.0)  # folds -0.0 into 0.0


def normalize(obj: Any) -> Any:
    """Reduce numpy scalars/arrays, tuples, dataclass-like ``to_json`` objects to plain data."""
    if hasattr(obj, "to_json") and not isinstance(obj, type):
        return normalize(obj.to_json())
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, np.generic):
        return normalize(obj.item())
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump(obj: Any, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for n, key in enumerate(sorted(obj)):
            out.append(f"{pad}  {json.dumps(key)}: ")
            _dump(obj[key], out, indent + 1)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(pad + "}")
    else:
        # short numeric lists stay on one line
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            parts: list[str] = []
            for v in obj:
                _dump(v, parts, 0)
            out.append("[" + ", ".join(parts) + "]")
            return
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for n, v in enumerate(obj):
            out.append(pad + "  ")
            _dump(v, out, indent + 1)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(pad + "]")


def to_json_bytes(obj: Any) -> bytes:
    out: list[str] = []
    _dump(normalize(obj), out, 0)
    out.append("\n")
    return "".join(out).encode("ascii")


def _cell(v: Any) -> str:
    v = normalize(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _float(v).strip('"')
    if isinstance(v, (list, dict)):
        parts: list[str] = []
        _dump(v, parts, 0)
        return "".join(parts).replace("\n", " ")
    return str(v)


def to_csv_bytes(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue().encode("ascii")


def flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    """Dotted key/value pairs, used for CSV output of non-tabular reports."""
    obj = normalize(obj)
    if isinstance(obj, dict):
        out = []
        for key in sorted(obj):
            out += flatten(obj[key], f"{prefix}.{key}" if prefix else key)
        return out
    return [(prefix, obj)]
