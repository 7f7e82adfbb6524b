"""Reading and writing point clouds as delimited text, one point per row."""

from __future__ import annotations

import io
import json
import math
from pathlib import Path
from typing import TextIO

import numpy as np

from .geometry import PointCloud


class PointFormatError(ValueError):
    pass


def parse_points(text: str, header: bool = False) -> PointCloud:
    """Parse comma- or whitespace-separated rows of equal length.

    Blank lines and lines starting with ``#`` are ignored. With ``header``
    the first remaining line is skipped.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if header and lines:
        lines = lines[1:]
    if not lines:
        raise PointFormatError("no points")
    rows = []
    width = None
    for lineno, ln in enumerate(lines, start=2 if header else 1):
        toks = ln.replace(",", " ").split()
        try:
            row = [float(t) for t in toks]
        except ValueError as exc:
            raise PointFormatError(f"row {lineno}: {exc}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise PointFormatError(f"row {lineno} has {len(row)} coordinates, expected {width}")
        if not all(math.isfinite(v) for v in row):
            raise PointFormatError(f"row {lineno} has a non-finite coordinate")
        rows.append(row)
    return PointCloud(np.asarray(rows, dtype=np.float64))


def read_points(source: str | Path | TextIO, header: bool = False) -> PointCloud:
    if hasattr(source, "read"):
        return parse_points(source.read(), header)
    return parse_points(Path(source).read_text(), header)


def format_points(cloud: PointCloud | np.ndarray) -> str:
    """Comma-separated rows with round-trip precision."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)
    buf = io.StringIO()
    np.savetxt(buf, pts, delimiter=",", fmt="%.17g")
    return buf.getvalue()


def write_points(cloud, dest: str | Path | TextIO) -> None:
    text = format_points(cloud)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text)


def write_manifest(path: str | Path, generator: str, params: dict, seed, cloud: PointCloud) -> None:
    doc = {"generator": generator, "params": params, "seed": seed, "points": cloud.n, "dim": cloud.dim}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
