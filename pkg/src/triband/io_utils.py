"""Deterministic CSV/JSON writers shared by the CLI commands."""

from __future__ import annotations

import csv
import io
import json
import sys


def fmt(x) -> str:
    """12-significant-digit decimal rendering ('' for None)."""
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, str):
        return x
    return format(float(x), ".12g")


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")  # RFC 4180 line endings
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows):
    text = render_csv(header, rows)
    if path is None or path == "-":
        sys.stdout.write(text)
        return None
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def write_manifest(path, payload: dict):
    """Sidecar JSON manifest describing a run (parameters, version, timings)."""
    if path is None:
        return None
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
