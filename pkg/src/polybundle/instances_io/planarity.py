"""Segment intersection checks for embedded bundles.

Two segments of a bundle may only meet in a common endpoint (same point
index).  The check is a vectorised all-pairs test with bounding-box
rejection; instances handled here have at most a few thousand segments.
"""

from __future__ import annotations

import numpy as np

from ..geometry import Bundle

__all__ = ["bundle_segments", "find_crossings", "check_planarity"]


def bundle_segments(bundle: Bundle) -> list:
    """Distinct undirected segments as ``(i, j)`` point pairs with ``i < j``."""
    seen = {}
    for line in bundle.lines:
        for a, b in zip(line, line[1:]):
            seen.setdefault((min(a, b), max(a, b)), None)
    return list(seen)


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _between(a, b, c):
    return (np.minimum(a, b) <= c) & (c <= np.maximum(a, b))


def find_crossings(bundle: Bundle, block: int = 512) -> list:
    """All pairs of segments that touch or cross illegally.

    Returns ``((i, j), (k, l))`` pairs of point-index segments.  Segments
    sharing an endpoint are reported only when they overlap collinearly.
    """
    segs = bundle_segments(bundle)
    if len(segs) < 2:
        return []
    idx = np.array(segs)
    xy = bundle.coords
    p, q = xy[idx[:, 0]], xy[idx[:, 1]]
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    out = []
    m = len(segs)
    for s in range(0, m, block):
        e = min(m, s + block)
        # pairs (i, j) with i in [s, e) and j > i
        ii, jj = np.nonzero(np.triu(np.ones((e - s, m), dtype=bool), k=s + 1))
        ii = ii + s
        box = ((lo[ii] <= hi[jj]) & (lo[jj] <= hi[ii])).all(axis=1)
        ii, jj = ii[box], jj[box]
        if len(ii) == 0:
            continue
        a, b, c, d = p[ii], q[ii], p[jj], q[jj]
        o1 = _orient(a[:, 0], a[:, 1], b[:, 0], b[:, 1], c[:, 0], c[:, 1])
        o2 = _orient(a[:, 0], a[:, 1], b[:, 0], b[:, 1], d[:, 0], d[:, 1])
        o3 = _orient(c[:, 0], c[:, 1], d[:, 0], d[:, 1], a[:, 0], a[:, 1])
        o4 = _orient(c[:, 0], c[:, 1], d[:, 0], d[:, 1], b[:, 0], b[:, 1])
        proper = (np.sign(o1) * np.sign(o2) < 0) & (np.sign(o3) * np.sign(o4) < 0)
        touch = (
            ((o1 == 0) & _between(a[:, 0], b[:, 0], c[:, 0]) & _between(a[:, 1], b[:, 1], c[:, 1]))
            | ((o2 == 0) & _between(a[:, 0], b[:, 0], d[:, 0]) & _between(a[:, 1], b[:, 1], d[:, 1]))
            | ((o3 == 0) & _between(c[:, 0], d[:, 0], a[:, 0]) & _between(c[:, 1], d[:, 1], a[:, 1]))
            | ((o4 == 0) & _between(c[:, 0], d[:, 0], b[:, 0]) & _between(c[:, 1], d[:, 1], b[:, 1]))
        )
        for k in np.nonzero(proper | touch)[0].tolist():
            s1, s2 = segs[ii[k]], segs[jj[k]]
            shared = set(s1) & set(s2)
            if shared:
                # meeting in the common endpoint is fine unless the two overlap
                if not (o1[k] == 0 and o2[k] == 0):
                    continue
                (v,) = shared
                u1 = xy[s1[0] if s1[1] == v else s1[1]] - xy[v]
                u2 = xy[s2[0] if s2[1] == v else s2[1]] - xy[v]
                if float(u1 @ u2) <= 0:
                    continue
            out.append((s1, s2))
    return out


def check_planarity(bundle: Bundle) -> bool:
    return not find_crossings(bundle)
