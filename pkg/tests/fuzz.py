"""Random instance generators shared by the test modules."""

import random

import numpy as np

from polybundle.geometry import Bundle

B1_POINTS = [(0, 0), (1, 0.1), (2, 0), (3, 0.1), (4, 0), (3, 1), (3, 2)]
B1_LINES = [[0, 1, 2, 3, 4], [0, 1, 2, 5, 6]]


def b1() -> Bundle:
    return Bundle(B1_POINTS, B1_LINES)


def random_ptb(rng: random.Random, n_min=3, n_max=12, spread=1.0) -> Bundle:
    """Random rooted tree drawn as a drifting walk; one line per leaf."""
    n = rng.randint(n_min, n_max)
    parent = [None] + [rng.randrange(v) for v in range(1, n)]
    xy = np.zeros((n, 2))
    for v in range(1, n):
        xy[v] = xy[parent[v]] + (1.0 + rng.uniform(-0.5, 0.5), rng.uniform(-spread, spread))
    has_child = set(p for p in parent if p is not None)
    lines = []
    for leaf in range(n):
        if leaf in has_child or leaf == 0:
            continue
        path = [leaf]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        lines.append(path[::-1])
    return Bundle(xy, lines)


def removable(bundle: Bundle) -> int:
    return len(bundle.used_points() - bundle.endpoints())


def random_polyline(rng: random.Random, m_min=2, m_max=14, wiggle=1.0) -> Bundle:
    m = rng.randint(m_min, m_max)
    xy = np.zeros((m, 2))
    for i in range(1, m):
        xy[i] = xy[i - 1] + (rng.uniform(-0.3, 1.0), rng.uniform(-wiggle, wiggle))
    return Bundle(xy, [list(range(m))])


def grid_walk_bundle(rng: random.Random, k_max=5, lines_max=6, steps_max=10) -> Bundle:
    """Self-avoiding walks on a jittered grid; lines share points freely."""
    k = rng.randint(2, k_max)
    n = k * k
    coords = [(i + rng.uniform(-0.3, 0.3), j + rng.uniform(-0.3, 0.3)) for i in range(k) for j in range(k)]

    def nbrs(v):
        i, j = divmod(v, k)
        out = []
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if 0 <= i + di < k and 0 <= j + dj < k:
                out.append((i + di) * k + j + dj)
        return out

    lines = []
    for _ in range(rng.randint(1, lines_max)):
        path = [rng.randrange(n)]
        for _ in range(rng.randint(1, steps_max)):
            cand = [w for w in nbrs(path[-1]) if w not in path]
            if not cand:
                break
            path.append(rng.choice(cand))
        if len(path) >= 2:
            lines.append(path)
    if not lines:
        lines = [[0, 1]]
    return Bundle(coords, lines)
