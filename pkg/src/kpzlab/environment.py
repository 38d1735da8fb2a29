"""Coupled random environments.

A :class:`WeightField` assigns a non-negative weight to every lattice site of
its support. The weight at ``(i, j)`` is obtained by hashing
``(seed, i, j)`` to a uniform and applying an inverse CDF, so any two
passage queries on the same field see the same environment without storing
it. :class:`PointField` does the same for planar Poisson points, cell by cell.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import rng
from ._backend import kernels
from .errors import ConfigError, DomainError


class Support(str, enum.Enum):
    QUADRANT = "quadrant"  # i, j >= 0
    FLAT = "flat"  # i + j >= 0
    HALF_FLAT = "half_flat"  # i + j >= 0 and j >= 0


@dataclass(frozen=True)
class Exponential:
    rate: float = 1.0

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigError(f"exponential rate must be positive, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate


@dataclass(frozen=True)
class Geometric:
    """Geometric law on {0, 1, 2, ...} with success probability ``p``."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ConfigError(f"geometric success probability must be in (0, 1), got {self.p}")

    @property
    def mean(self) -> float:
        return (1.0 - self.p) / self.p


@dataclass(frozen=True)
class Constant:
    """Deterministic weights, used for degenerate sanity runs."""

    value: float = 0.0

    def __post_init__(self):
        if self.value < 0:
            raise ConfigError("constant weight must be non-negative")

    @property
    def mean(self) -> float:
        return self.value


DistributionSpec = Union[Exponential, Geometric, Constant]


@dataclass(frozen=True)
class TwoSided:
    """Rate-``pi`` exponentials on the row j=0, rate-``eta`` on the column i=0, zero at the origin."""

    pi: float
    eta: float

    def __post_init__(self):
        if not (self.pi > 0 and self.eta > 0):
            raise ConfigError(f"two-sided boundary rates must be positive, got pi={self.pi}, eta={self.eta}")


@dataclass(frozen=True)
class ThickOneSided:
    """Column ``i`` (0-based, ``i < len(rates)``) carries rate ``rates[i]``; rate 1 beyond."""

    rates: tuple

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if not self.rates or any(not r > 0 for r in self.rates):
            raise ConfigError("thick boundary rates must be a non-empty list of positive reals")


BoundarySpec = Optional[Union[TwoSided, ThickOneSided]]

# integer codes shared with the kernels
_SUPPORT_CODE = {Support.QUADRANT: 0, Support.FLAT: 1, Support.HALF_FLAT: 2}
BULK_EXP, BULK_GEOM, BULK_CONST, BULK_ARRAY = 0, 1, 2, 3
BOUNDARY_NONE, BOUNDARY_TWO_SIDED, BOUNDARY_THICK = 0, 1, 2


@dataclass(frozen=True)
class WeightField:
    seed: int
    support: Support = Support.QUADRANT
    bulk: DistributionSpec = Exponential()
    boundary: BoundarySpec = None
    array: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "support", Support(self.support))
        if self.boundary is not None and self.support is not Support.QUADRANT:
            raise ConfigError("boundary conditions are only defined on the quadrant support")
        if self.array is not None:
            arr = np.ascontiguousarray(self.array, dtype=np.float64)
            if arr.ndim != 2 or arr.size == 0:
                raise ConfigError("explicit weights must be a non-empty 2-d array")
            if (arr < 0).any() or not np.isfinite(arr).all():
                raise ConfigError("explicit weights must be finite and non-negative")
            if self.support is not Support.QUADRANT or self.boundary is not None:
                raise ConfigError("explicit weight arrays live on a bare quadrant")
            object.__setattr__(self, "array", arr)

    @classmethod
    def from_array(cls, weights) -> "WeightField":
        """Field whose weight at ``(i, j)`` is ``weights[i][j]`` (0-based)."""
        return cls(seed=0, array=np.asarray(weights, dtype=np.float64))

    @property
    def key(self) -> int:
        return rng.mix64(self.seed)

    @property
    def extent(self) -> Optional[tuple]:
        """Shape of an explicit array field, ``None`` for unbounded fields."""
        return None if self.array is None else self.array.shape

    def with_seed(self, seed: int) -> "WeightField":
        return WeightField(seed, self.support, self.bulk, self.boundary, self.array)

    def contains(self, i: int, j: int) -> bool:
        if self.support is Support.QUADRANT:
            ok = i >= 0 and j >= 0
        elif self.support is Support.FLAT:
            ok = i + j >= 0
        else:
            ok = i + j >= 0 and j >= 0
        if ok and self.array is not None:
            ok = i < self.array.shape[0] and j < self.array.shape[1]
        return ok

    def kernel_params(self) -> tuple:
        """Flat description consumed by the compiled and fallback kernels."""
        bulk = self.bulk
        if self.array is not None:
            bulk_kind, bulk_param = BULK_ARRAY, 0.0
        elif isinstance(bulk, Exponential):
            bulk_kind, bulk_param = BULK_EXP, bulk.rate
        elif isinstance(bulk, Geometric):
            # floor(E / c) with E ~ Exp(1) is Geometric(p) when c = -log(1 - p)
            bulk_kind, bulk_param = BULK_GEOM, -math.log1p(-bulk.p)
        else:
            bulk_kind, bulk_param = BULK_CONST, bulk.value
        pi = eta = 1.0
        thick = np.zeros(0)
        if isinstance(self.boundary, TwoSided):
            b_kind, pi, eta = BOUNDARY_TWO_SIDED, self.boundary.pi, self.boundary.eta
        elif isinstance(self.boundary, ThickOneSided):
            b_kind, thick = BOUNDARY_THICK, np.asarray(self.boundary.rates, dtype=np.float64)
        else:
            b_kind = BOUNDARY_NONE
        arr = self.array if self.array is not None else np.zeros((1, 1))
        return (_SUPPORT_CODE[self.support], bulk_kind, float(bulk_param), b_kind,
                float(pi), float(eta), thick, self.key, arr)


def weight(field: WeightField, i: int, j: int) -> float:
    if not field.contains(i, j):
        raise DomainError(f"site ({i}, {j}) is outside the {field.support.value} support")
    return float(kernels.weights(field.kernel_params(), np.array([i]), np.array([j]))[0])


def outside_support(field: WeightField, i, j) -> np.ndarray:
    """Boolean mask of the sites ``(i, j)`` that the field does not cover."""
    ii = np.asarray(i, dtype=np.int64)
    jj = np.asarray(j, dtype=np.int64)
    if field.support is Support.QUADRANT:
        bad = (ii < 0) | (jj < 0)
    elif field.support is Support.FLAT:
        bad = ii + jj < 0
    else:
        bad = (ii + jj < 0) | (jj < 0)
    if field.array is not None:
        bad = bad | (ii >= field.array.shape[0]) | (jj >= field.array.shape[1])
    return bad


def weights(field: WeightField, i, j) -> np.ndarray:
    """Vectorised :func:`weight`; ``i`` and ``j`` broadcast."""
    ii, jj = np.broadcast_arrays(np.asarray(i, dtype=np.int64), np.asarray(j, dtype=np.int64))
    if outside_support(field, ii, jj).any():
        raise DomainError("some sites are outside the field support")
    out = kernels.weights(field.kernel_params(), np.ascontiguousarray(ii.ravel()),
                          np.ascontiguousarray(jj.ravel()))
    return np.asarray(out).reshape(ii.shape)


# --- Poisson point fields -------------------------------------------------


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 >= self.x0 and self.y1 >= self.y0):
            raise ConfigError(f"degenerate rectangle {self}")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains_rect(self, other: "Rect") -> bool:
        return (self.x0 <= other.x0 and other.x1 <= self.x1
                and self.y0 <= other.y0 and other.y1 <= self.y1)


@dataclass(frozen=True)
class HalfPlane:
    """The rotated half-plane ``{x + y >= offset}``."""

    offset: float = 0.0


@dataclass(frozen=True)
class BoundarySources:
    """1-d Poisson processes on the positive x-axis (``bottom``) and y-axis (``left``)."""

    bottom: float
    left: float

    def __post_init__(self):
        if self.bottom < 0 or self.left < 0:
            raise ConfigError("boundary source intensities must be non-negative")


@dataclass(frozen=True)
class PointField:
    seed: int
    intensity: float
    region: Union[Rect, HalfPlane] = Rect(0.0, 0.0, math.inf, math.inf)
    sources: Optional[BoundarySources] = None
    cell: Optional[float] = None  # side of the hashing grid; default gives ~1 point per cell

    def __post_init__(self):
        if not self.intensity >= 0:
            raise ConfigError(f"point intensity must be non-negative, got {self.intensity}")
        if self.cell is not None and not self.cell > 0:
            raise ConfigError("cell size must be positive")

    @property
    def cell_size(self) -> float:
        if self.cell is not None:
            return self.cell
        return 1.0 / math.sqrt(self.intensity) if self.intensity > 0 else 1.0

    def with_seed(self, seed: int) -> "PointField":
        return PointField(seed, self.intensity, self.region, self.sources, self.cell)


def _poisson_inverse(u: np.ndarray, mean: float) -> np.ndarray:
    """Inverse-CDF Poisson(mean) draw for each uniform in ``u``."""
    n = np.zeros(u.shape, dtype=np.int64)
    if mean <= 0 or u.size == 0:
        return n
    # work in log-space pieces for large means
    p = math.exp(-mean)
    if p == 0.0:
        raise ConfigError("per-cell Poisson mean too large; use a smaller cell size")
    cdf = p
    k = 0
    active = u >= cdf
    limit = int(mean + 40.0 * math.sqrt(mean) + 60)
    while active.any() and k < limit:
        n[active] += 1
        k += 1
        p *= mean / k
        cdf += p
        active &= u >= cdf
    return n


def _uniform_keys(keys: np.ndarray, i: int, j: int) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = keys + np.uint64((i * rng.STEP_I) & rng.MASK64) + np.uint64((j * rng.STEP_J) & rng.MASK64)
    return (rng.mix64_array(z) >> np.uint64(11)).astype(np.float64) * rng.INV_2_53


def _cell_points(key: int, mean: float, side: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All points of the cells ``(a[k], b[k])`` as an (n, 2) array; ``mean`` points per cell."""
    with np.errstate(over="ignore"):
        ck = rng.mix64_array(np.uint64(key) + a.astype(np.uint64) * np.uint64(rng.STEP_I)
                             + b.astype(np.uint64) * np.uint64(rng.STEP_J))
    counts = _poisson_inverse(_uniform_keys(ck, -1, 0), mean)
    xs, ys = [], []
    for k in range(int(counts.max(initial=0))):
        sel = counts > k
        xs.append((a[sel] + _uniform_keys(ck[sel], k, 1)) * side)
        ys.append((b[sel] + _uniform_keys(ck[sel], k, 2)) * side)
    if not xs:
        return np.zeros((0, 2))
    return np.column_stack([np.concatenate(xs), np.concatenate(ys)])


def sample_points(field: PointField, window: Rect) -> np.ndarray:
    """Bulk Poisson points of ``field`` inside ``window`` as an (n, 2) array.

    Points are generated per hashing cell, so overlapping windows of one field
    always agree on their common points. Rows are sorted by (x, y).
    """
    if isinstance(field.region, Rect) and not field.region.contains_rect(window):
        raise DomainError(f"window {window} is not inside the field region {field.region}")
    if field.intensity == 0 or window.area == 0:
        return np.zeros((0, 2))
    side = field.cell_size
    a0, a1 = math.floor(window.x0 / side), math.floor(window.x1 / side)
    b0, b1 = math.floor(window.y0 / side), math.floor(window.y1 / side)
    a, b = np.meshgrid(np.arange(a0, a1 + 1, dtype=np.int64), np.arange(b0, b1 + 1, dtype=np.int64),
                       indexing="ij")
    pts = _cell_points(rng.derive_seed(field.seed, rng.SALT_POINTS), field.intensity * side * side,
                       side, a.ravel(), b.ravel())
    keep = ((pts[:, 0] >= window.x0) & (pts[:, 0] < window.x1)
            & (pts[:, 1] >= window.y0) & (pts[:, 1] < window.y1))
    if isinstance(field.region, HalfPlane):
        keep &= pts[:, 0] + pts[:, 1] >= field.region.offset
    pts = pts[keep]
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    return pts[order]


def _axis_points(key: int, intensity: float, length: float, stream: int) -> np.ndarray:
    if intensity == 0 or length <= 0:
        return np.zeros(0)
    side = 1.0 / intensity
    a = np.arange(0, math.floor(length / side) + 1, dtype=np.int64)
    b = np.full(a.shape, -1 - stream, dtype=np.int64)
    pts = _cell_points(key, 1.0, side, a, b)
    # _cell_points spreads y over the cell as well; only x matters on an axis
    xs = np.sort(pts[:, 0])
    return xs[xs < length]


def sample_sources(field: PointField, x_max: float, y_max: float) -> tuple:
    """Boundary-source positions on ``[0, x_max)`` (bottom) and ``[0, y_max)`` (left)."""
    if field.sources is None:
        return np.zeros(0), np.zeros(0)
    key = rng.derive_seed(field.seed, rng.SALT_POINTS, 7)
    return (_axis_points(key, field.sources.bottom, x_max, 0),
            _axis_points(key, field.sources.left, y_max, 1))
