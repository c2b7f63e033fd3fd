"""Independent reference implementations used to cross-check the library."""

import math


def seg_dist(p, a, b):
    ax, ay = a
    bx, by = b
    px, py = p
    vx, vy = bx - ax, by - ay
    L = vx * vx + vy * vy
    if L == 0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * vx + (py - ay) * vy) / L))
    return math.hypot(px - ax - t * vx, py - ay - t * vy)


def _free_interval(a, b, q, eps):
    """Parameters s in [0, 1] with |a + s (b - a) - q| <= eps, or None."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    fx, fy = a[0] - q[0], a[1] - q[1]
    A = dx * dx + dy * dy
    B = 2 * (dx * fx + dy * fy)
    C = fx * fx + fy * fy - eps * eps
    if A == 0:
        return (0.0, 1.0) if C <= 0 else None
    disc = B * B - 4 * A * C
    if disc < 0:
        return None
    r = math.sqrt(disc)
    lo, hi = (-B - r) / (2 * A), (-B + r) / (2 * A)
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    return (lo, hi) if lo <= hi else None


def frechet_decide(P, Q, eps):
    """Free-space decision for two polylines (Alt and Godau)."""
    p, q = len(P) - 1, len(Q) - 1
    if math.dist(P[0], Q[0]) > eps or math.dist(P[-1], Q[-1]) > eps:
        return False
    # reachable part of the left edge of cell (i, j) (P vertex i, Q segment j)
    # and the bottom edge (P segment i, Q vertex j)
    LR = [[None] * q for _ in range(p + 1)]
    BR = [[None] * (q + 1) for _ in range(p)]
    for j in range(q):
        f = _free_interval(Q[j], Q[j + 1], P[0], eps)
        if f is None or f[0] > 0 or (j and (LR[0][j - 1] is None or LR[0][j - 1][1] < 1)):
            break
        LR[0][j] = f
    for i in range(p):
        f = _free_interval(P[i], P[i + 1], Q[0], eps)
        if f is None or f[0] > 0 or (i and (BR[i - 1][0] is None or BR[i - 1][0][1] < 1)):
            break
        BR[i][0] = f
    for i in range(p):
        for j in range(q):
            left, bottom = LR[i][j], BR[i][j]
            fr = _free_interval(Q[j], Q[j + 1], P[i + 1], eps)  # right edge
            ft = _free_interval(P[i], P[i + 1], Q[j + 1], eps)  # top edge
            if left is None and bottom is None:
                continue
            if fr is not None:
                if bottom is not None:
                    LR[i + 1][j] = fr
                elif fr[1] >= left[0]:
                    LR[i + 1][j] = (max(fr[0], left[0]), fr[1])
            if ft is not None:
                if left is not None:
                    BR[i][j + 1] = ft
                elif ft[1] >= bottom[0]:
                    BR[i][j + 1] = (max(ft[0], bottom[0]), ft[1])
    # the top-right corner is reachable iff it is reached through an incoming edge
    a = LR[p][q - 1]
    b = BR[p - 1][q]
    return (a is not None and a[1] >= 1.0) or (b is not None and b[1] >= 1.0)


def shortcut_decide(seg, sub, delta, metric):
    if str(metric).endswith("hausdorff"):
        return all(seg_dist(x, seg[0], seg[1]) <= delta for x in sub)
    return frechet_decide([tuple(seg[0]), tuple(seg[1])], [tuple(x) for x in sub], delta)


def naive_pairs(bundle, delta, metric):
    """Valid shortcut pairs (i < j) over every line containing both, from scratch."""
    status = {}
    for line in bundle.lines:
        pts = [tuple(bundle.coords[v]) for v in line]
        for a in range(len(line)):
            for b in range(a + 1, len(line)):
                key = tuple(sorted((line[a], line[b])))
                ok = shortcut_decide((pts[a], pts[b]), pts[a:b + 1], delta, metric)
                status[key] = status.get(key, True) and ok
    return {k for k, ok in status.items() if ok}
