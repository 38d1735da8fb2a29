# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: weight hashing, passage-time sweeps, patience sorting
and the exclusion-process event loop.

Every function here has a twin with the same signature in ``_fallback.py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, log1p, exp, floor, INFINITY
from libc.stdint cimport uint64_t, int64_t, int8_t

cnp.import_array()

cdef uint64_t MIX_A = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX_B = 0x94D049BB133111EBULL
cdef uint64_t STEP_I = 0x9E3779B97F4A7C15ULL
cdef uint64_t STEP_J = 0xD1B54A32D192ED03ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0

DEF MAXPLUS = 0
DEF MINPLUS = 1
DEF LOGSUMEXP = 2

DEF SUP_QUAD = 0
DEF SUP_FLAT = 1
DEF SUP_HALF = 2

DEF BULK_EXP = 0
DEF BULK_GEOM = 1
DEF BULK_CONST = 2
DEF BULK_ARRAY = 3

DEF BD_NONE = 0
DEF BD_TWO = 1
DEF BD_THICK = 2


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX_A
    z = (z ^ (z >> 27)) * MIX_B
    return z ^ (z >> 31)


cdef inline double uniform2(uint64_t key, int64_t i, int64_t j) noexcept nogil:
    cdef uint64_t z = key + (<uint64_t>i) * STEP_I + (<uint64_t>j) * STEP_J
    return <double>(mix64(z) >> 11) * INV_2_53


cdef struct Field:
    int support
    int bulk_kind
    double bulk_param
    int boundary
    double pi
    double eta
    const double* thick
    int64_t n_thick
    uint64_t key
    const double* arr
    int64_t arr_ny


cdef inline double weight_at(const Field* f, int64_t i, int64_t j) noexcept nogil:
    cdef double e
    if f.bulk_kind == BULK_ARRAY:
        return f.arr[i * f.arr_ny + j]
    if f.bulk_kind == BULK_CONST and f.boundary == BD_NONE:
        return f.bulk_param
    e = -log(1.0 - uniform2(f.key, i, j))
    if f.boundary == BD_TWO:
        if i == 0 and j == 0:
            return 0.0
        if j == 0:
            return e / f.pi
        if i == 0:
            return e / f.eta
    elif f.boundary == BD_THICK:
        if i < f.n_thick:
            return e / f.thick[i]
    if f.bulk_kind == BULK_EXP:
        return e / f.bulk_param
    if f.bulk_kind == BULK_GEOM:
        return floor(e / f.bulk_param)
    return f.bulk_param


cdef class _FieldHolder:
    """Keeps the buffers referenced by a ``Field`` struct alive."""
    cdef Field f
    cdef double[::1] thick
    cdef double[:, ::1] arr

    def __init__(self, tuple params):
        support, bulk_kind, bulk_param, boundary, pi, eta, thick, key, arr = params
        self.thick = np.ascontiguousarray(thick, dtype=np.float64)
        if self.thick.shape[0] == 0:
            self.thick = np.zeros(1)
        self.arr = np.ascontiguousarray(arr, dtype=np.float64)
        self.f.support = support
        self.f.bulk_kind = bulk_kind
        self.f.bulk_param = bulk_param
        self.f.boundary = boundary
        self.f.pi = pi
        self.f.eta = eta
        self.f.thick = &self.thick[0]
        self.f.n_thick = len(thick)
        self.f.key = key
        self.f.arr = &self.arr[0, 0]
        self.f.arr_ny = self.arr.shape[1]


def weights(tuple params, const int64_t[::1] i, const int64_t[::1] j):
    cdef _FieldHolder h = _FieldHolder(params)
    cdef Py_ssize_t k, n = i.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for k in range(n):
            o[k] = weight_at(&h.f, i[k], j[k])
    return out


cdef inline double combine(int mode, double beta, double a, double b) noexcept nogil:
    cdef double hi, lo
    if mode == MAXPLUS:
        return a if a > b else b
    if mode == MINPLUS:
        return a if a < b else b
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    if a > b:
        hi = a
        lo = b
    else:
        hi = b
        lo = a
    return hi + log1p(exp(-beta * (hi - lo))) / beta


cdef inline void _row_maxplus_exp(double* buf, uint64_t key, double rate, int64_t i,
                                  int64_t j0, int64_t j1, int64_t j_floor) noexcept nogil:
    cdef int64_t j
    cdef double left = -INFINITY, m, d
    for j in range(j0, j1):
        d = buf[j - j_floor]
        m = d if d > left else left
        if m == -INFINITY:
            m = 0.0
        left = m + (-log(1.0 - uniform2(key, i, j))) / rate
        buf[j - j_floor] = left


def passage(tuple params, int mode, double beta, bint from_point, int64_t px, int64_t py,
            bint include_source, const int64_t[:, ::1] targets):
    """Passage values at ``targets`` (sorted row-major by the caller).

    One streaming sweep, row by row in ``i``, keeping a single row of
    ``j`` values. Cells whose two predecessors both lie outside the region
    are path starts. ``from_point`` restricts the region to the cone of
    ``(px, py)``; otherwise starts are the support-boundary sites.
    """
    cdef _FieldHolder h = _FieldHolder(params)
    cdef const Field* f = &h.f
    cdef Py_ssize_t nt = targets.shape[0]
    cdef int64_t X = targets[0, 0], Y = targets[0, 1]
    cdef Py_ssize_t k
    for k in range(nt):
        if targets[k, 0] > X:
            X = targets[k, 0]
        if targets[k, 1] > Y:
            Y = targets[k, 1]

    cdef int64_t i_lo, j_floor
    if from_point:
        i_lo = px
        j_floor = py
    elif f.support == SUP_QUAD:
        i_lo = 0
        j_floor = 0
    elif f.support == SUP_FLAT:
        i_lo = -Y
        j_floor = -X
    else:
        i_lo = -Y
        j_floor = 0

    cdef double ident = INFINITY if mode == MINPLUS else -INFINITY
    buf_arr = np.full(Y - j_floor + 1, ident, dtype=np.float64)
    cdef double[::1] buf = buf_arr
    out = np.empty(nt, dtype=np.float64)
    cdef double[::1] o = out
    cdef int64_t i, j, jl
    cdef double left, m, w
    cdef Py_ssize_t tp = 0
    # the bulk of every experiment: no branches on mode or weight kind
    cdef bint fast = (mode == MAXPLUS and f.bulk_kind == BULK_EXP
                      and f.boundary == BD_NONE and not from_point)

    with nogil:
        for i in range(i_lo, X + 1):
            if from_point or f.support == SUP_QUAD:
                jl = j_floor
            elif f.support == SUP_FLAT:
                jl = -i
            else:
                jl = -i if -i > 0 else 0
            left = ident
            if fast:
                _row_maxplus_exp(&buf[0], f.key, f.bulk_param, i, jl, Y + 1, j_floor)
                jl = Y + 1
            for j in range(jl, Y + 1):
                m = combine(mode, beta, buf[j - j_floor], left)
                if m == ident:
                    m = 0.0
                    if from_point and not include_source:
                        w = 0.0
                    else:
                        w = weight_at(f, i, j)
                else:
                    w = weight_at(f, i, j)
                left = m + w
                buf[j - j_floor] = left
            while tp < nt and targets[tp, 0] == i:
                o[tp] = buf[targets[tp, 1] - j_floor]
                tp += 1
    return out


def passage_grid(tuple params, int mode, double beta, int64_t nx, int64_t ny):
    """Corner-source passage values on the whole box ``[0, nx) x [0, ny)`` (quadrant)."""
    cdef _FieldHolder h = _FieldHolder(params)
    cdef const Field* f = &h.f
    cdef double ident = INFINITY if mode == MINPLUS else -INFINITY
    out = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] L = out
    cdef int64_t i, j
    cdef double down, left, m
    with nogil:
        for i in range(nx):
            left = ident
            for j in range(ny):
                down = L[i - 1, j] if i > 0 else ident
                m = combine(mode, beta, down, left)
                if m == ident:
                    m = 0.0
                left = m + weight_at(f, i, j)
                L[i, j] = left
    return out


def lis_length(const double[::1] xs, const double[::1] ys):
    """Longest chain strictly increasing in both coordinates (patience sorting)."""
    cdef Py_ssize_t n = xs.shape[0]
    if n == 0:
        return 0
    order = np.lexsort((-np.asarray(ys), np.asarray(xs)))
    cdef const int64_t[::1] idx = order.astype(np.int64)
    tails_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] tails = tails_arr
    cdef Py_ssize_t size = 0, lo, hi, mid, k
    cdef double y
    with nogil:
        for k in range(n):
            y = ys[idx[k]]
            lo = 0
            hi = size
            while lo < hi:
                mid = (lo + hi) >> 1
                if tails[mid] < y:
                    lo = mid + 1
                else:
                    hi = mid
            tails[lo] = y
            if lo == size:
                size += 1
    return size


def pasep_events(uint64_t key, int64_t n_bonds, double p, double horizon):
    """Arrow events up to ``horizon``: (times, bond index, is-right) arrays.

    Every bond carries right arrows at rate ``p`` and left arrows at rate
    ``1 - p``; their superposition over ``n_bonds`` bonds is a single rate
    ``n_bonds`` Poisson stream with uniform bond marks.
    """
    cdef Py_ssize_t cap = <Py_ssize_t>(n_bonds * horizon + 10.0 * (n_bonds * horizon) ** 0.5 + 64)
    times_arr = np.empty(cap, dtype=np.float64)
    bonds_arr = np.empty(cap, dtype=np.int64)
    right_arr = np.empty(cap, dtype=np.int8)
    cdef double[::1] times = times_arr
    cdef int64_t[::1] bonds = bonds_arr
    cdef int8_t[::1] right = right_arr
    cdef double t = 0.0, rate = <double>n_bonds
    cdef int64_t k = 0, b
    while True:
        with nogil:
            while k < cap:
                t += -log(1.0 - uniform2(key, k, 0)) / rate
                if t > horizon:
                    break
                b = <int64_t>(uniform2(key, k, 1) * rate)
                if b >= n_bonds:
                    b = n_bonds - 1
                times[k] = t
                bonds[k] = b
                right[k] = 1 if uniform2(key, k, 2) < p else 0
                k += 1
        if t > horizon:
            break
        # rare: more events than the preallocated capacity
        t = times[k - 1]
        cap = cap * 2
        times_arr = np.resize(times_arr, cap)
        bonds_arr = np.resize(bonds_arr, cap)
        right_arr = np.resize(right_arr, cap)
        times = times_arr
        bonds = bonds_arr
        right = right_arr
    return times_arr[:k].copy(), bonds_arr[:k].copy(), right_arr[:k].copy()


def pasep_run(int8_t[::1] eta, int64_t[::1] h, int64_t[::1] flux, const double[::1] times,
              const int64_t[::1] bonds, const int8_t[::1] right, Py_ssize_t start, double t_end):
    """Apply events ``start, start+1, ...`` with time <= ``t_end`` in place.

    Bond ``b`` joins sites ``b`` and ``b + 1``. A right jump raises ``h[b]``
    by 2, a left jump lowers it by 2. Returns the index of the first event
    not applied.
    """
    cdef Py_ssize_t k = start, n = times.shape[0]
    cdef int64_t b
    with nogil:
        while k < n and times[k] <= t_end:
            b = bonds[k]
            if right[k]:
                if eta[b] == 1 and eta[b + 1] == 0:
                    eta[b] = 0
                    eta[b + 1] = 1
                    h[b] += 2
                    flux[b] += 1
            else:
                if eta[b + 1] == 1 and eta[b] == 0:
                    eta[b + 1] = 0
                    eta[b] = 1
                    h[b] -= 2
                    flux[b] -= 1
            k += 1
    return k
