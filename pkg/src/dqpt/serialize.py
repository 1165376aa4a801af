"""CSV/JSON writers and readers for rate series and result tables.

Non-finite floats are written as the literals ``inf``/``nan`` in CSV and as
the strings "inf"/"nan" in JSON, so a divergence survives a round trip.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .loschmidt import RateSeries

__all__ = ["format_float", "write_series", "read_series", "write_table", "dumps_json"]


def format_float(x) -> str:
    # repr is the shortest string that round-trips exactly
    return repr(float(x))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, np.integer):
        return int(x)
    return x


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _series_text(series: RateSeries, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        with_le = series.le is not None
        writer.writerow(["t", "lambda", "le"] if with_le else ["t", "lambda"])
        for i in range(len(series)):
            row = [format_float(series.times[i]), format_float(series.rate[i])]
            if with_le:
                row.append(format_float(series.le[i]))
            writer.writerow(row)
        return buf.getvalue()
    if fmt == "json":
        obj = {"metadata": series.metadata, "t": series.times, "lambda": series.rate}
        if series.le is not None:
            obj["le"] = series.le
        return dumps_json(obj)
    raise ValueError(f"unknown format {fmt!r}")


def write_series(series: RateSeries, path, fmt: str = "csv") -> None:
    """Write ``series`` to ``path`` (a filesystem path or a text stream)."""
    text = _series_text(series, fmt)
    if hasattr(path, "write"):
        path.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def read_series(path, fmt: str | None = None) -> RateSeries:
    """Inverse of :func:`write_series`; the format defaults to the file suffix."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "csv"
    if fmt == "json":
        obj = json.loads(text)
        le = obj.get("le")
        return RateSeries(
            [float(v) for v in obj["t"]],
            [float(v) for v in obj["lambda"]],
            None if le is None else [float(v) for v in le],
            obj.get("metadata", {}),
        )
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    cols = list(zip(*body)) if body else [[] for _ in header]
    data = {name: [float(v) for v in col] for name, col in zip(header, cols)}
    return RateSeries(data["t"], data["lambda"], data.get("le"))


def write_table(header, rows, path, fmt: str = "csv", metadata=None) -> None:
    """Write a list of row tuples as CSV, or as JSON columns keyed by ``header``."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
        text = buf.getvalue()
    elif fmt == "json":
        cols = {h: [row[i] for row in rows] for i, h in enumerate(header)}
        text = dumps_json({"metadata": metadata or {}, **cols})
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if hasattr(path, "write"):
        path.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
