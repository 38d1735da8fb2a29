"""Pure numpy/Python twins of the compiled kernels in ``_kernels.pyx``.

Passage sweeps here go antidiagonal by antidiagonal over a materialised
box, which vectorises well but needs memory proportional to the box.
"""

from __future__ import annotations

import math
from bisect import bisect_left

import numpy as np

from . import rng

MAXPLUS, MINPLUS, LOGSUMEXP = 0, 1, 2
SUP_QUAD, SUP_FLAT, SUP_HALF = 0, 1, 2
BULK_EXP, BULK_GEOM, BULK_CONST, BULK_ARRAY = 0, 1, 2, 3
BD_NONE, BD_TWO, BD_THICK = 0, 1, 2


def weights(params, i, j):
    support, bulk_kind, bulk_param, boundary, pi, eta, thick, key, arr = params
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    if bulk_kind == BULK_ARRAY:
        return np.asarray(arr, dtype=np.float64)[i, j]
    if bulk_kind == BULK_CONST and boundary == BD_NONE:
        return np.full(i.shape, bulk_param, dtype=np.float64)
    e = -np.log(1.0 - rng.uniform2_array(key, i, j))
    if bulk_kind == BULK_EXP:
        out = e / bulk_param
    elif bulk_kind == BULK_GEOM:
        out = np.floor(e / bulk_param)
    else:
        out = np.full(i.shape, bulk_param, dtype=np.float64)
    if boundary == BD_TWO:
        out = np.where(j == 0, e / pi, out)
        out = np.where((i == 0) & (j != 0), e / eta, out)
        out = np.where((i == 0) & (j == 0), 0.0, out)
    elif boundary == BD_THICK:
        thick = np.asarray(thick, dtype=np.float64)
        inner = (i >= 0) & (i < len(thick))
        rates = thick[np.clip(i, 0, max(len(thick) - 1, 0))]
        out = np.where(inner, e / rates, out)
    return out


def _combine(mode, beta, a, b):
    if mode == MAXPLUS:
        return np.maximum(a, b)
    if mode == MINPLUS:
        return np.minimum(a, b)
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    with np.errstate(invalid="ignore", over="ignore"):
        out = hi + np.log1p(np.exp(-beta * (hi - lo))) / beta
    return np.where(lo == -np.inf, hi, out)


def _in_region(support, from_point, px, py, ii, jj):
    if from_point:
        return (ii >= px) & (jj >= py)
    if support == SUP_QUAD:
        return (ii >= 0) & (jj >= 0)
    if support == SUP_FLAT:
        return ii + jj >= 0
    return (ii + jj >= 0) & (jj >= 0)


def _sweep(params, mode, beta, from_point, px, py, include_source, X, Y):
    """Full table of passage values over the bounding box of the region."""
    support = params[0]
    if from_point:
        i_lo, j_lo = px, py
    elif support == SUP_QUAD:
        i_lo, j_lo = 0, 0
    elif support == SUP_FLAT:
        i_lo, j_lo = -Y, -X
    else:
        i_lo, j_lo = -Y, 0
    ident = np.inf if mode == MINPLUS else -np.inf
    nx, ny = X - i_lo + 1, Y - j_lo + 1
    table = np.full((nx, ny), ident)
    gi, gj = np.meshgrid(np.arange(i_lo, X + 1), np.arange(j_lo, Y + 1), indexing="ij")
    region = _in_region(support, from_point, px, py, gi, gj)
    w = np.zeros((nx, ny))
    w[region] = weights(params, gi[region], gj[region])
    for d in range(nx + ny - 1):
        a = np.arange(max(0, d - ny + 1), min(nx - 1, d) + 1)
        b = d - a
        ok = region[a, b]
        a, b = a[ok], b[ok]
        if a.size == 0:
            continue
        down = np.where(a > 0, table[np.maximum(a - 1, 0), b], ident)
        left = np.where(b > 0, table[a, np.maximum(b - 1, 0)], ident)
        m = _combine(mode, beta, down, left)
        start = m == ident
        ww = w[a, b]
        if from_point and not include_source:
            ww = np.where(start, 0.0, ww)
        table[a, b] = np.where(start, 0.0, m) + ww
    return table, i_lo, j_lo


def passage(params, mode, beta, from_point, px, py, include_source, targets):
    targets = np.asarray(targets, dtype=np.int64)
    X = int(targets[:, 0].max())
    Y = int(targets[:, 1].max())
    table, i_lo, j_lo = _sweep(params, mode, beta, from_point, px, py, include_source, X, Y)
    return table[targets[:, 0] - i_lo, targets[:, 1] - j_lo].astype(np.float64)


def passage_grid(params, mode, beta, nx, ny):
    table, _, _ = _sweep(params, mode, beta, False, 0, 0, True, nx - 1, ny - 1)
    return table


def lis_length(xs, ys):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size == 0:
        return 0
    order = np.lexsort((-ys, xs))
    tails: list = []
    for y in ys[order].tolist():
        k = bisect_left(tails, y)
        if k == len(tails):
            tails.append(y)
        else:
            tails[k] = y
    return len(tails)


def pasep_events(key, n_bonds, p, horizon):
    rate = float(n_bonds)
    expected = rate * horizon
    n = int(expected + 10.0 * math.sqrt(expected) + 64)
    while True:
        k = np.arange(n, dtype=np.int64)
        gaps = -np.log(1.0 - rng.uniform2_array(key, k, 0)) / rate
        times = np.cumsum(gaps)
        if times[-1] > horizon:
            break
        n *= 2
    m = int(np.searchsorted(times, horizon, side="right"))
    k = k[:m]
    bonds = np.minimum((rng.uniform2_array(key, k, 1) * rate).astype(np.int64), n_bonds - 1)
    right = (rng.uniform2_array(key, k, 2) < p).astype(np.int8)
    return times[:m].copy(), bonds, right


def pasep_run(eta, h, flux, times, bonds, right, start, t_end):
    k = int(start)
    n = len(times)
    stop = int(np.searchsorted(times, t_end, side="right"))
    bl = bonds.tolist()
    rl = right.tolist()
    for k in range(k, max(k, min(stop, n))):
        b = bl[k]
        if rl[k]:
            if eta[b] == 1 and eta[b + 1] == 0:
                eta[b] = 0
                eta[b + 1] = 1
                h[b] += 2
                flux[b] += 1
        elif eta[b + 1] == 1 and eta[b] == 0:
            eta[b + 1] = 0
            eta[b] = 1
            h[b] -= 2
            flux[b] -= 1
    return max(int(start), min(stop, n))
