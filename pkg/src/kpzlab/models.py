"""Model catalog and the TASEP height <-> last-passage correspondence.

Each model is a random environment plus a semiring. Heights are read off
passage values through the level sets of ``L``: a site ``(i, j)`` of the
support is the corner cell ``(x, y) = (i + 1, j + 1)`` and, once
``L(i, j) <= t``, it raises the interface above ``X = x - y`` to ``x + y``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional, Union

import numpy as np

from .environment import (BoundarySources, Constant, Exponential, HalfPlane, PointField,
                          Support, ThickOneSided, TwoSided, WeightField)
from .errors import ConfigError, DomainError
from .passage import LogSumExp, MaxPlus, MinPlus, SemiringMode, half_line


class ModelId(str, enum.Enum):
    CORNER_GROWTH = "corner_growth"
    TWO_SIDED = "two_sided"
    THICK_ONE_SIDED = "thick_one_sided"
    FLAT_TASEP = "flat_tasep"
    HALF_FLAT_TASEP = "half_flat_tasep"
    PNG_DROPLET = "png_droplet"
    PNG_FLAT = "png_flat"
    PNG_TWO_SOURCES = "png_two_sources"
    POLYMER = "polymer"
    FPP = "fpp"


@dataclass(frozen=True)
class ModelSpec:
    id: ModelId
    field: Union[WeightField, PointField]
    mode: SemiringMode = MaxPlus
    params: dict = dc_field(default_factory=dict, compare=False)

    @property
    def is_lattice(self) -> bool:
        return isinstance(self.field, WeightField)

    def with_seed(self, seed: int) -> "ModelSpec":
        return ModelSpec(self.id, self.field.with_seed(seed), self.mode, self.params)


def corner_growth(seed: int = 0) -> ModelSpec:
    return ModelSpec(ModelId.CORNER_GROWTH, WeightField(seed))


def two_sided(pi: float, eta: float, seed: int = 0) -> ModelSpec:
    return ModelSpec(ModelId.TWO_SIDED, WeightField(seed, boundary=TwoSided(pi, eta)),
                     params={"pi": pi, "eta": eta})


def thick_one_sided(rates, seed: int = 0) -> ModelSpec:
    b = ThickOneSided(tuple(rates))
    return ModelSpec(ModelId.THICK_ONE_SIDED, WeightField(seed, boundary=b), params={"rates": list(b.rates)})


def flat_tasep(seed: int = 0) -> ModelSpec:
    return ModelSpec(ModelId.FLAT_TASEP, WeightField(seed, Support.FLAT))


def half_flat_tasep(seed: int = 0) -> ModelSpec:
    return ModelSpec(ModelId.HALF_FLAT_TASEP, WeightField(seed, Support.HALF_FLAT))


def png_droplet(intensity: float = 1.0, seed: int = 0) -> ModelSpec:
    return ModelSpec(ModelId.PNG_DROPLET, PointField(seed, intensity), params={"intensity": intensity})


def png_flat(intensity: float = 1.0, seed: int = 0) -> ModelSpec:
    return ModelSpec(ModelId.PNG_FLAT, PointField(seed, intensity, HalfPlane()),
                     params={"intensity": intensity})


def png_two_sources(intensity: float, bottom: float, left: float, seed: int = 0) -> ModelSpec:
    f = PointField(seed, intensity, sources=BoundarySources(bottom, left))
    return ModelSpec(ModelId.PNG_TWO_SOURCES, f,
                     params={"intensity": intensity, "bottom": bottom, "left": left})


def polymer(beta: float, bulk=Exponential(), seed: int = 0) -> ModelSpec:
    return ModelSpec(ModelId.POLYMER, WeightField(seed, bulk=bulk), LogSumExp(beta), params={"beta": beta})


def fpp(bulk=Exponential(), seed: int = 0) -> ModelSpec:
    return ModelSpec(ModelId.FPP, WeightField(seed, bulk=bulk), MinPlus)


# --- TASEP initial conditions ------------------------------------------------


class Step:
    pass


@dataclass(frozen=True)
class TwoSidedBernoulli:
    rho_minus: float
    rho_plus: float


class Flat:
    pass


class HalfFlat:
    pass


def map_tasep_initial_condition(ic, seed: int = 0) -> ModelSpec:
    """LPP model whose level sets give the TASEP height function for ``ic``.

    Two-sided Bernoulli data map to boundary rates ``pi = 1 - rho_plus`` and
    ``eta = rho_minus``. The extra geometric runs of zero weights that an
    exact coupling would put on the boundary are left out; they shift the
    height by O(1) and do not change the asymptotics.
    """
    if isinstance(ic, Step) or ic is Step:
        return corner_growth(seed)
    if isinstance(ic, TwoSidedBernoulli):
        rm, rp = ic.rho_minus, ic.rho_plus
        if not (0.0 <= rm <= 1.0 and 0.0 <= rp <= 1.0):
            raise ConfigError(f"densities must lie in [0, 1], got rho-={rm}, rho+={rp}")
        pi, eta = 1.0 - rp, rm
        if pi == 0.0 or eta == 0.0:
            raise ConfigError("rho+ = 1 or rho- = 0 gives a zero boundary rate (no particle ever "
                              "crosses); use a different initial condition")
        return two_sided(pi, eta, seed)
    if isinstance(ic, Flat) or ic is Flat:
        return flat_tasep(seed)
    if isinstance(ic, HalfFlat) or ic is HalfFlat:
        return half_flat_tasep(seed)
    raise ConfigError(f"unknown initial condition {ic!r}")


def current_from_height(h, x):
    """Integrated current ``I = (h - x) / 2``."""
    return 0.5 * (h - x)


# --- heights from passage values ---------------------------------------------


@dataclass
class HeightProfile:
    t: float
    xs: np.ndarray  # integer X values, consecutive
    values: np.ndarray  # integer heights

    def __call__(self, X):
        """Height at real ``X``, linearly interpolated between lattice points."""
        X = np.asarray(X, dtype=np.float64)
        if (X < self.xs[0]).any() or (X > self.xs[-1]).any():
            raise DomainError("X outside the profile window")
        out = np.interp(X, self.xs, self.values)
        return float(out) if out.ndim == 0 else out


def initial_height(support: Support, X):
    """``h(X, 0)``: ``|X|`` (step), sawtooth ``X mod 2`` (flat), or a mix (half-flat)."""
    X = np.asarray(X, dtype=np.int64)
    if support is Support.QUADRANT:
        return np.abs(X)
    saw = np.mod(X, 2)
    if support is Support.FLAT:
        return saw
    return np.where(X > 0, X, saw)


def _first_site(support: Support, X: np.ndarray) -> tuple:
    """Lowest support site on the diagonal ``i - j = X``."""
    if support is Support.QUADRANT:
        j0 = np.maximum(-X, 0)
    elif support is Support.FLAT:
        j0 = -np.floor_divide(X, 2)  # smallest j with 2j + X >= 0
    else:
        j0 = np.maximum(-np.floor_divide(X, 2), 0)
    return j0 + X, j0


def height_from_passage(field: WeightField, t: float, window, depth: Optional[int] = None) -> HeightProfile:
    """Height profile at time ``t`` on the integer window ``[window[0], window[1]]``.

    ``depth`` is the number of sites examined along each diagonal. It is
    chosen from ``t`` and the mean weight when omitted; if a diagonal is
    filled all the way down the box was too small and a DomainError is
    raised. Level sets are right-continuous: a site with ``L == t`` counts.
    """
    if t < 0:
        raise DomainError("t must be non-negative")
    if field.boundary is not None or field.array is not None:
        raise DomainError("heights are read from boundary-free random fields only")
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise DomainError("empty window")
    xs = np.arange(lo, hi + 1, dtype=np.int64)
    if depth is None:
        mean = field.bulk.mean
        if isinstance(field.bulk, Constant) and mean == 0:
            raise DomainError("zero weights fill every site; pass an explicit depth")
        # a diagonal filled k deep has L >= weight of a (2k - 1)-site path
        depth = int(math.ceil(0.75 * t / mean)) + 16
    i0, j0 = _first_site(field.support, xs)
    k = np.arange(depth, dtype=np.int64)
    ii = (i0[:, None] + k[None, :]).ravel()
    jj = (j0[:, None] + k[None, :]).ravel()
    L = half_line(field, np.column_stack([ii, jj]), MaxPlus).reshape(len(xs), depth)
    # L increases along each diagonal, so the filled sites form a prefix
    filled = (L <= t).sum(axis=1)
    if (filled == depth).any():
        raise DomainError(f"simulated box too small: a diagonal is filled {depth} sites deep")
    values = initial_height(field.support, xs) + 2 * filled
    return HeightProfile(float(t), xs, values.astype(np.int64))


def height_at_origin(field: WeightField, t: float, depth: Optional[int] = None) -> int:
    """``h(0, t)`` of the step model, i.e. twice the number of filled diagonal cells."""
    return int(height_from_passage(field, t, (0, 0), depth).values[0])
