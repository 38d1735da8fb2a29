"""Brute-force references: exhaustive path enumeration and LIS by search.

Deliberately naive and independent of the sweep kernels. Only usable on
tiny inputs.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def up_right_paths(p, q):
    """All unit-step up/right lattice paths from ``p`` to ``q`` (inclusive), as site lists."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    if dx < 0 or dy < 0:
        return
    for ups in itertools.combinations(range(dx + dy), dy):
        i, j = p
        path = [(i, j)]
        ups = set(ups)
        for step in range(dx + dy):
            if step in ups:
                j += 1
            else:
                i += 1
            path.append((i, j))
        yield path


def path_weights(w: np.ndarray, p, q, include_source: bool = True) -> list:
    out = []
    for path in up_right_paths(p, q):
        sites = path if include_source else path[1:]
        out.append(math.fsum(w[i, j] for i, j in sites))
    return out


def enumerate_passage(w: np.ndarray, q, mode: str = "maxplus", beta: float = 1.0, p=(0, 0),
                      include_source: bool = True) -> float:
    """Passage value from ``p`` to ``q`` over the explicit weights ``w[i, j]``."""
    vals = path_weights(np.asarray(w, dtype=np.float64), p, q, include_source)
    if not vals:
        raise ValueError("q does not dominate p")
    if mode == "maxplus":
        return max(vals)
    if mode == "minplus":
        return min(vals)
    m = max(vals)
    return m + math.log(math.fsum(math.exp(beta * (v - m)) for v in vals)) / beta


def lis_bruteforce(points) -> int:
    """Longest chain strictly increasing in both coordinates, by checking every subset."""
    pts = sorted(map(tuple, np.asarray(points, dtype=np.float64).reshape(-1, 2)))
    best = 0
    n = len(pts)
    for mask in range(1, 1 << n):
        chain = [pts[k] for k in range(n) if mask >> k & 1]
        if len(chain) <= best:
            continue
        if all(a[0] < b[0] and a[1] < b[1] for a, b in zip(chain, chain[1:])):
            best = len(chain)
    return best
