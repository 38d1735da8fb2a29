"""Reference distributions for the fluctuation tests.

Tracy-Widom laws are Fredholm determinants ``det(I - K)`` on ``L^2(s, inf)``,
discretised with Gauss-Legendre nodes pulled back through
``x = s + u / (1 - u)``. The Airy function underneath is evaluated from its
Maclaurin series near the origin and from the standard asymptotic series
outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import AccuracyError, ConfigError, DomainError

# Ai(0) and -Ai'(0)
_C1 = 0.355028053887817239260
_C2 = 0.258819403792806798405
_SERIES_CUT = 7.0
_POS_CUT = 5.25  # beyond this the series cancels badly against the decaying Ai
_SERIES_TERMS = 130


def _asym_coeffs(n: int) -> np.ndarray:
    """u_k of the Airy asymptotic series, with u_0 = 1."""
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
    return u


_U = _asym_coeffs(40)
_V = np.array([1.0] + [-(6 * k + 1) / (6 * k - 1) * _U[k] for k in range(1, 40)])


def _series(x: np.ndarray) -> tuple:
    """Maclaurin series for Ai and Ai' (accurate for |x| <= ~8)."""
    x3 = x ** 3
    f = np.ones_like(x)
    g = x.copy()
    tf = np.ones_like(x)
    tg = x.copy()
    df = np.zeros_like(x)
    dg = np.ones_like(x)
    tdf = np.ones_like(x)  # running term of f' / (x^2 / 2)
    tdg = np.ones_like(x)
    for k in range(1, _SERIES_TERMS):
        tf = tf * x3 / ((3 * k - 1) * (3 * k))
        tg = tg * x3 / ((3 * k) * (3 * k + 1))
        f = f + tf
        g = g + tg
        # derivatives: d/dx x^(3k) = 3k x^(3k-1), d/dx x^(3k+1) = (3k+1) x^(3k)
        df = df + 3 * k * tf / np.where(x == 0, 1.0, x)
        dg = dg + (3 * k + 1) * tg / np.where(x == 0, 1.0, x)
        if np.all(np.abs(tf) + np.abs(tg) < 1e-18 * (np.abs(f) + np.abs(g))):
            break
    ai = _C1 * f - _C2 * g
    aip = _C1 * df - _C2 * dg
    return ai, aip


def _asym_pos(x: np.ndarray) -> tuple:
    zeta = 2.0 / 3.0 * x ** 1.5
    n = len(_U)
    k = np.arange(n)
    terms = _U[None, :] * (-1.0 / zeta[:, None]) ** k[None, :]
    vterms = _V[None, :] * (-1.0 / zeta[:, None]) ** k[None, :]
    # truncate each series at its smallest term
    cut = np.argmin(np.abs(terms), axis=1)
    mask = k[None, :] <= cut[:, None]
    s = (terms * mask).sum(axis=1)
    sv = (vterms * mask).sum(axis=1)
    e = np.exp(-zeta)
    ai = e / (2.0 * math.sqrt(math.pi) * x ** 0.25) * s
    aip = -x ** 0.25 * e / (2.0 * math.sqrt(math.pi)) * sv
    return ai, aip


def _asym_neg(x: np.ndarray) -> tuple:
    z = -x
    zeta = 2.0 / 3.0 * z ** 1.5
    n = len(_U)
    k = np.arange(n)
    inv = 1.0 / zeta[:, None]
    even = k % 2 == 0
    sign = np.where((k // 2) % 2 == 0, 1.0, -1.0)
    terms = _U[None, :] * inv ** k[None, :]
    cut = np.argmin(np.abs(terms), axis=1)
    mask = k[None, :] <= cut[:, None]
    P = (sign * even * terms * mask).sum(axis=1)
    Q = (sign * (~even) * terms * mask).sum(axis=1)
    vterms = _V[None, :] * inv ** k[None, :]
    R = (sign * even * vterms * mask).sum(axis=1)
    S = (sign * (~even) * vterms * mask).sum(axis=1)
    ph = zeta + math.pi / 4.0
    ai = (np.sin(ph) * P - np.cos(ph) * Q) / (math.sqrt(math.pi) * z ** 0.25)
    aip = -z ** 0.25 * (np.cos(ph) * R + np.sin(ph) * S) / math.sqrt(math.pi)
    return ai, aip


def airy_pair(x) -> tuple:
    """``(Ai(x), Ai'(x))`` for any real array ``x`` (no range check)."""
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)
    mid = (flat >= -_SERIES_CUT) & (flat <= _POS_CUT)
    pos = flat > _POS_CUT
    neg = flat < -_SERIES_CUT
    if mid.any():
        ai[mid], aip[mid] = _series(flat[mid])
    if pos.any():
        far = flat[pos] > 200.0
        a, b = _asym_pos(np.minimum(flat[pos], 200.0))
        ai[pos] = np.where(far, 0.0, a)
        aip[pos] = np.where(far, 0.0, b)
    if neg.any():
        ai[neg], aip[neg] = _asym_neg(flat[neg])
    return ai.reshape(x.shape), aip.reshape(x.shape)


AIRY_RANGE = (-15.0, 30.0)


def airy_fn(x):
    """Airy function Ai on [-15, 30] to about 1e-12 absolute accuracy."""
    xa = np.asarray(x, dtype=np.float64)
    if (xa < AIRY_RANGE[0]).any() or (xa > AIRY_RANGE[1]).any():
        raise DomainError(f"Ai is provided on [{AIRY_RANGE[0]}, {AIRY_RANGE[1]}]")
    ai, _ = airy_pair(xa)
    return float(ai) if ai.ndim == 0 else ai


def airy_prime(x):
    xa = np.asarray(x, dtype=np.float64)
    if (xa < AIRY_RANGE[0]).any() or (xa > AIRY_RANGE[1]).any():
        raise DomainError(f"Ai' is provided on [{AIRY_RANGE[0]}, {AIRY_RANGE[1]}]")
    _, aip = airy_pair(xa)
    return float(aip) if aip.ndim == 0 else aip


# --- Fredholm determinants -----------------------------------------------------


@lru_cache(maxsize=32)
def _gl(n: int) -> tuple:
    u, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (u + 1.0), 0.5 * w


def _nodes(s: float, n: int) -> tuple:
    u, w = _gl(n)
    x = s + u / (1.0 - u)
    return x, w / (1.0 - u) ** 2


def _airy_kernel(x: np.ndarray) -> np.ndarray:
    a, ap = airy_pair(x)
    dx = x[:, None] - x[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        K = (a[:, None] * ap[None, :] - ap[:, None] * a[None, :]) / dx
    diag = ap * ap - x * a * a
    K[np.diag_indices_from(K)] = diag
    return K


def _det(s: float, n: int, kernel) -> float:
    x, w = _nodes(s, n)
    sw = np.sqrt(w)
    K = kernel(x)
    M = np.eye(n) - sw[:, None] * K * sw[None, :]
    return float(np.linalg.det(M))


def _goe_kernel(x: np.ndarray) -> np.ndarray:
    a, _ = airy_pair(0.5 * (x[:, None] + x[None, :]))
    return 0.5 * a


TW_RANGE = (-10.0, 6.0)


def _checked(s: float, nodes: int, kernel) -> float:
    if nodes < 20:
        raise ConfigError("at least 20 quadrature nodes are required")
    if not TW_RANGE[0] <= s <= TW_RANGE[1]:
        raise DomainError(f"s must lie in [{TW_RANGE[0]}, {TW_RANGE[1]}]")
    a = _det(s, nodes, kernel)
    b = _det(s, 2 * nodes, kernel)
    if abs(a - b) > 1e-6:
        raise AccuracyError(f"determinant not converged at s={s}: {a} vs {b} with {nodes} and "
                            f"{2 * nodes} nodes")
    return min(max(b, 0.0), 1.0)


def tw_gue_cdf(s: float, nodes: int = 40) -> float:
    """GUE Tracy-Widom distribution function at ``s``.

    Computed with ``nodes`` and ``2 * nodes`` quadrature points; the finer
    value is returned, and an AccuracyError is raised if the two differ by
    more than 1e-6.
    """
    return _checked(float(s), int(nodes), _airy_kernel)


def tw_goe_cdf(s: float, nodes: int = 40) -> float:
    """GOE Tracy-Widom distribution function, ``det(I - Ai((x + y)/2)/2)``."""
    return _checked(float(s), int(nodes), _goe_kernel)


def gue_det_raw(s: float, nodes: int) -> float:
    """Single determinant evaluation, no convergence check (for diagnostics)."""
    return _det(float(s), int(nodes), _airy_kernel)


TABLE_STEP = 0.01


@lru_cache(maxsize=4)
def _table(kind: str) -> tuple:
    grid = np.round(np.arange(TW_RANGE[0], TW_RANGE[1] + TABLE_STEP / 2, TABLE_STEP), 10)
    kernel = _airy_kernel if kind == "gue" else _goe_kernel
    vals = np.array([min(max(_det(s, 60, kernel), 0.0), 1.0) for s in grid])
    return grid, np.maximum.accumulate(vals)


def gue_table() -> tuple:
    """GUE distribution function tabulated on [-10, 6] with step 0.01 (cached)."""
    return _table("gue")


# --- reference distribution types ---------------------------------------------


def _std_normal_cdf(z):
    z = np.asarray(z, dtype=np.float64)
    out = 0.5 * (1.0 + np.vectorize(math.erf, otypes=[float])(z / math.sqrt(2.0)))
    return out


class ReferenceDistribution:
    name = "reference"

    def cdf(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class GUE(ReferenceDistribution):
    name = "GUE"

    def cdf(self, x):
        grid, vals = gue_table()
        out = np.interp(np.asarray(x, dtype=np.float64), grid, vals, left=0.0, right=1.0)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Gaussian(ReferenceDistribution):
    mean: float = 0.0
    std: float = 1.0
    name = "Gaussian"

    def __post_init__(self):
        if not self.std > 0:
            raise ConfigError("std must be positive")

    def cdf(self, x):
        out = _std_normal_cdf((np.asarray(x, dtype=np.float64) - self.mean) / self.std)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class MaxTwoGaussians(ReferenceDistribution):
    """Law of the maximum of two independent Gaussians."""

    mean1: float = 0.0
    std1: float = 1.0
    mean2: float = 0.0
    std2: float = 1.0
    name = "MaxTwoGaussians"

    def cdf(self, x):
        a = Gaussian(self.mean1, self.std1).cdf(x)
        b = Gaussian(self.mean2, self.std2).cdf(x)
        return a * b


GOE_TABLE = Path(__file__).with_name("data") / "goe_cdf.txt"


def load_goe_table(path: Optional[Union[str, Path]] = None) -> tuple:
    """Read a two-column (s, F_GOE(s)) text table; ``#`` lines are comments."""
    data = np.loadtxt(path or GOE_TABLE, comments="#")
    if data.ndim != 2 or data.shape[1] != 2:
        raise ConfigError("GOE table must have two columns")
    return data[:, 0], data[:, 1]


def write_goe_table(path: Union[str, Path], step: float = 0.02) -> None:
    grid = np.round(np.arange(TW_RANGE[0], TW_RANGE[1] + step / 2, step), 10)
    vals = np.maximum.accumulate([min(max(_det(s, 60, _goe_kernel), 0.0), 1.0) for s in grid])
    header = ("GOE Tracy-Widom distribution function det(I - K) with K(x,y) = Ai((x+y)/2)/2\n"
              f"on L^2(s, inf); 60 Gauss-Legendre nodes; grid [-10, 6] step {step}\ncolumns: s F(s)")
    np.savetxt(path, np.column_stack([grid, vals]), fmt="%.3f %.15e", header=header)


@dataclass(frozen=True)
class GOEsq(ReferenceDistribution):
    """Square of the tabulated GOE distribution function."""

    path: Optional[str] = None
    name = "GOEsq"

    def cdf(self, x):
        grid, vals = load_goe_table(self.path)
        out = np.interp(np.asarray(x, dtype=np.float64), grid, vals, left=0.0, right=1.0) ** 2
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Empirical(ReferenceDistribution):
    sample: np.ndarray = field(default_factory=lambda: np.zeros(0))
    name = "Empirical"

    def __post_init__(self):
        s = np.sort(np.asarray(self.sample, dtype=np.float64).ravel())
        if s.size == 0:
            raise ConfigError("empirical reference needs a non-empty sample")
        object.__setattr__(self, "sample", s)

    def cdf(self, x):
        out = np.searchsorted(self.sample, np.asarray(x, dtype=np.float64), side="right") / self.sample.size
        return float(out) if np.ndim(out) == 0 else out


def ks_statistic(sample, ref: ReferenceDistribution) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``sample`` and ``ref``.

    Against an :class:`Empirical` reference both step functions are compared
    on the union of their jump points (the two-sample statistic).
    """
    x = np.sort(np.asarray(sample, dtype=np.float64).ravel())
    n = x.size
    if n == 0:
        raise ConfigError("sample must be non-empty")
    if isinstance(ref, Empirical):
        pts = np.union1d(x, ref.sample)
        a = np.searchsorted(x, pts, side="right") / n
        b = ref.cdf(pts)
        return float(np.max(np.abs(a - b)))
    F = np.asarray(ref.cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - F)
    d_minus = np.max(F - (i - 1) / n)
    return float(max(d_plus, d_minus))


def moments_from_cdf(cdf_grid: np.ndarray, values: np.ndarray) -> tuple:
    """Mean and standard deviation of a law given its CDF on a fine grid."""
    mids = 0.5 * (cdf_grid[1:] + cdf_grid[:-1])
    dens = np.diff(values)
    mean = float(np.sum(mids * dens) / np.sum(dens))
    var = float(np.sum((mids - mean) ** 2 * dens) / np.sum(dens))
    return mean, math.sqrt(var)
