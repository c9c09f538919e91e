"""CSV / JSON report rendering with shortest round-trip number formatting."""
from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path
from typing import Any, Sequence

from .errors import DomainError


class EmptyReportError(DomainError):
    """Refusing to write a report without rows."""


def format_number(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isfinite(value) and value == int(value) and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    return str(value)


def _columns(row) -> list[tuple[str, str]]:
    if isinstance(row, dict):
        return [(k, k) for k in row]
    cols = getattr(row, "COLUMNS", None)
    if cols is not None:
        return list(cols)
    return [(f.name, f.name) for f in dataclasses.fields(row)]


def _get(row, attr: str):
    return row[attr] if isinstance(row, dict) else getattr(row, attr)


def _plain(value):
    if hasattr(value, "item") and type(value) not in (int, float, bool):  # numpy scalars
        value = value.item()
    if isinstance(value, float) and math.isfinite(value) and value == int(value) \
            and abs(value) < 1e16:
        return int(value)
    return value


def render_report(rows: Sequence, fmt: str = "csv", allow_empty: bool = False) -> str:
    rows = list(rows)
    if not rows and not allow_empty:
        raise EmptyReportError("no report rows; pass allow_empty=True to write an empty report")
    if fmt == "csv":
        if not rows:
            return ""
        cols = _columns(rows[0])
        lines = [",".join(h for h, _ in cols)]
        for row in rows:
            lines.append(",".join(format_number(_plain(_get(row, a))) for _, a in cols))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        objs = [{h: _plain(_get(row, a)) for h, a in _columns(row)} for row in rows]
        return json.dumps(objs, indent=1) + "\n"
    raise DomainError(f"unknown report format {fmt!r}")


def write_report(rows: Sequence, fmt: str, path, allow_empty: bool = False) -> None:
    text = render_report(rows, fmt, allow_empty)
    Path(path).write_text(text, encoding="utf-8")
