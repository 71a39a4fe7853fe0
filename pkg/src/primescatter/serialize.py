"""
Plain-text outputs: CSV with a ``#`` config preamble, and JSON documents.

Reals are written with 17 significant digits so every double round-trips.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .errors import ParseError

__all__ = ["fmt", "preamble", "write_csv", "read_csv_columns", "dumps_json", "peaks_rows", "PEAK_COLUMNS"]

PEAK_COLUMNS = ["center_k", "height", "hwhm", "prominence", "matched_gamma", "match_error_k"]


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.17g}"


def preamble(config: dict | None) -> list[str]:
    lines = [f"# primescatter {__version__}"]
    if config is not None:
        lines.append("# config: " + json.dumps(config, sort_keys=True, separators=(",", ":")))
    return lines


def write_csv(stream, columns: Sequence[str], rows: Iterable[Sequence], config: dict | None = None) -> None:
    for line in preamble(config):
        stream.write(line + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def read_csv_columns(stream, required: Sequence[str] = ()) -> dict[str, np.ndarray]:
    """Numeric columns of a CSV, skipping ``#`` lines; empty cells become NaN."""
    lines = [ln for ln in stream if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("no header row found")
    reader = csv.reader(io.StringIO("".join(lines)))
    header = [h.strip() for h in next(reader)]
    missing = [c for c in required if c not in header]
    if missing:
        raise ParseError(f"missing column(s) {missing}; found {header}")
    cols: list[list[float]] = [[] for _ in header]
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        for j, cell in enumerate(row):
            cell = cell.strip()
            try:
                cols[j].append(float(cell) if cell else np.nan)
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r} in column {header[j]}", lineno) from None
    return {h: np.array(c) for h, c in zip(header, cols)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps_json(doc: dict) -> str:
    # json writes floats via repr, which is already shortest round-trip
    return json.dumps(_jsonable(doc), indent=1, sort_keys=True) + "\n"


def peaks_rows(peaks) -> list[list]:
    return [[p.center_k, p.height, p.hwhm, p.prominence, p.matched_gamma, p.match_error_k] for p in peaks]
