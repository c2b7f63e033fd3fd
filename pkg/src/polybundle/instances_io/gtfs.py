"""Bundles from GTFS ``shapes.txt``: one polyline per ``shape_id``.

Points are shared between shapes only when they coincide exactly (or, with a
positive ``snap_radius``, when they fall within that radius of a point seen
earlier).  Coordinates are ``x = lon``, ``y = lat``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os

from ..geometry import Bundle

__all__ = ["REQUIRED_COLUMNS", "ingest_gtfs", "write_gtfs"]

log = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("shape_id", "shape_pt_lat", "shape_pt_lon", "shape_pt_sequence")


class _Snapper:
    """First-seen canonical points; a uniform grid keeps lookups local."""

    def __init__(self, radius: float):
        self.radius = radius
        self.coords: list = []
        self.exact: dict = {}
        self.cells: dict = {}

    def _cell(self, x, y):
        return math.floor(x / self.radius), math.floor(y / self.radius)

    def index(self, x: float, y: float) -> int:
        key = (x, y)
        if key in self.exact:
            return self.exact[key]
        if self.radius > 0:
            cx, cy = self._cell(x, y)
            best = None
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for i in self.cells.get((cx + dx, cy + dy), ()):
                        px, py = self.coords[i]
                        if math.hypot(px - x, py - y) <= self.radius and (best is None or i < best):
                            best = i
            if best is not None:
                self.exact[key] = best
                return best
        i = len(self.coords)
        self.coords.append(key)
        self.exact[key] = i
        if self.radius > 0:
            self.cells.setdefault(self._cell(x, y), []).append(i)
        return i


def _open_text(source):
    if hasattr(source, "read"):
        return source, False
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        return open(source, newline="", encoding="utf-8-sig"), True
    if isinstance(source, str) and "\n" in source:
        return io.StringIO(source), False
    raise FileNotFoundError(source)


def ingest_gtfs(shapes_csv, snap_radius: float = 0.0) -> Bundle:
    """Read ``shapes.txt`` (path, file object or CSV text) into a bundle."""
    if snap_radius < 0:
        raise ValueError("snap_radius must be non-negative")
    fh, close = _open_text(shapes_csv)
    try:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise ValueError(f"shapes file lacks columns: {', '.join(missing)}")
        reader.fieldnames = header
        shapes: dict = {}
        for row in reader:
            sid = row["shape_id"].strip()
            seq = float(row["shape_pt_sequence"])
            shapes.setdefault(sid, []).append((seq, float(row["shape_pt_lon"]), float(row["shape_pt_lat"])))
    finally:
        if close:
            fh.close()

    snap = _Snapper(snap_radius)
    lines = []
    for sid, pts in shapes.items():
        pts.sort(key=lambda r: r[0])
        ids = []
        for _, x, y in pts:
            i = snap.index(x, y)
            if not ids or ids[-1] != i:
                ids.append(i)
        if len(ids) < 2:
            log.warning("shape %s collapses to a single point; skipped", sid)
            continue
        if len(set(ids)) != len(ids):
            log.warning("shape %s revisits a point; skipped", sid)
            continue
        lines.append(ids)

    # number points by first appearance among the kept shapes, which drops
    # points that only belonged to skipped ones
    remap: dict = {}
    for line in lines:
        for i in line:
            remap.setdefault(i, len(remap))
    coords = [snap.coords[i] for i in remap]
    return Bundle(coords, [[remap[i] for i in line] for line in lines])


def write_gtfs(bundle: Bundle) -> str:
    """Inverse of :func:`ingest_gtfs` for bundles whose points are in first-seen order."""
    width = max(4, len(str(bundle.ell)))
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS)
    for li, line in enumerate(bundle.lines):
        for seq, v in enumerate(line, 1):
            x, y = bundle.point(v)
            writer.writerow((f"shape_{li:0{width}d}", f"{y:.17g}", f"{x:.17g}", seq))
    return out.getvalue()
