"""Passage values over a :class:`~kpzlab.environment.WeightField`.

Three semirings share one sweep: max-plus (last passage), min-plus (first
passage) and log-sum-exp at inverse temperature ``beta`` (polymer free
energy). Lattice points are 0-based ``(i, j)`` sites of the field.

Junction convention: a point-to-point value from ``p`` to ``q`` counts the
weight at ``q``. By default it also counts the weight at ``p``, which is the
ordinary single-cell-inclusive value; the compensator instead uses the
value with ``p`` excluded, so that the half-line value at ``q`` splits
exactly as ``L(p) + L_pp(p, q) + X`` with no site counted twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import kernels
from .environment import (HalfPlane, PointField, Rect, Support, WeightField, outside_support,
                          sample_points, sample_sources)
from .errors import ConfigError, DomainError

_MODE_CODES = {"maxplus": 0, "minplus": 1, "logsumexp": 2}


@dataclass(frozen=True)
class SemiringMode:
    kind: str = "maxplus"
    beta: float = math.inf

    def __post_init__(self):
        if self.kind not in _MODE_CODES:
            raise ConfigError(f"unknown semiring {self.kind!r}")
        if self.kind == "logsumexp" and not (self.beta > 0 and math.isfinite(self.beta)):
            raise ConfigError(f"log-sum-exp needs a finite positive beta, got {self.beta}")

    @property
    def code(self) -> int:
        return _MODE_CODES[self.kind]

    @property
    def kernel_beta(self) -> float:
        return self.beta if self.kind == "logsumexp" else 0.0

    @property
    def compensator_sign(self) -> int:
        """Sign the superadditivity compensator must have in this semiring."""
        return -1 if self.kind == "minplus" else 1


MaxPlus = SemiringMode("maxplus")
MinPlus = SemiringMode("minplus")


def LogSumExp(beta: float) -> SemiringMode:
    return SemiringMode("logsumexp", float(beta))


@dataclass(frozen=True)
class PassageQuery:
    field: WeightField
    targets: tuple
    mode: SemiringMode = MaxPlus
    source: Optional[tuple] = None  # None: half-line / corner sources; else a point p
    include_source: bool = True

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple((int(a), int(b)) for a, b in self.targets))
        if self.source is not None:
            object.__setattr__(self, "source", (int(self.source[0]), int(self.source[1])))


@dataclass(frozen=True)
class PassageValue:
    target: tuple
    value: float


def _check_targets(field: WeightField, targets: np.ndarray, source) -> None:
    if targets.size == 0:
        raise DomainError("no targets given")
    bad = outside_support(field, targets[:, 0], targets[:, 1])
    if bad.any():
        i, j = targets[int(np.argmax(bad))]
        raise DomainError(f"target ({i}, {j}) is outside the {field.support.value} support")
    if source is not None:
        px, py = source
        if not field.contains(px, py):
            raise DomainError(f"source {source} is outside the field support")
        bad = (targets[:, 0] < px) | (targets[:, 1] < py)
        if bad.any():
            k = int(np.argmax(bad))
            raise DomainError(f"target {tuple(targets[k])} does not dominate the source {source}")


def _evaluate(field, mode, source, include_source, targets) -> np.ndarray:
    targets = np.asarray(targets, dtype=np.int64).reshape(-1, 2)
    _check_targets(field, targets, source)
    order = np.lexsort((targets[:, 1], targets[:, 0]))
    sorted_t = np.ascontiguousarray(targets[order])
    px, py = source if source is not None else (0, 0)
    vals = kernels.passage(field.kernel_params(), mode.code, mode.kernel_beta, source is not None,
                           px, py, bool(include_source), sorted_t)
    out = np.empty(len(targets))
    out[order] = vals
    return out


def passage_array(q: PassageQuery) -> np.ndarray:
    """Values of ``q`` as a float array aligned with ``q.targets``."""
    return _evaluate(q.field, q.mode, q.source, q.include_source, q.targets)


def passage_values(q: PassageQuery) -> list:
    """One value per target, from a single sweep over one shared environment."""
    vals = passage_array(q)
    return [PassageValue(t, float(v)) for t, v in zip(q.targets, vals)]


def half_line(field: WeightField, targets, mode: SemiringMode = MaxPlus) -> np.ndarray:
    """Array shortcut for half-line (or corner) to point values."""
    return _evaluate(field, mode, None, True, targets)


def point_to_point(field: WeightField, mode: SemiringMode, p, q, include_source: bool = True) -> float:
    p = (int(p[0]), int(p[1]))
    return float(_evaluate(field, mode, p, include_source, [q])[0])


def superadditivity_check(field: WeightField, p, shifted, mode: SemiringMode = MaxPlus) -> float:
    """Compensator ``L(shifted) - L(p) - L_pp(p, shifted)`` on one environment.

    ``L_pp`` excludes the weight at ``p``. The result is >= 0 for max-plus and
    log-sum-exp and <= 0 for min-plus, exactly, on every sample.
    """
    p = (int(p[0]), int(p[1]))
    shifted = (int(shifted[0]), int(shifted[1]))
    if shifted[0] < p[0] or shifted[1] < p[1]:
        raise DomainError(f"{shifted} does not dominate {p}")
    hl = _evaluate(field, mode, None, True, [p, shifted])
    pp = _evaluate(field, mode, p, False, [shifted])[0]
    return float(hl[1] - hl[0] - pp)


def passage_grid(field: WeightField, shape, mode: SemiringMode = MaxPlus) -> np.ndarray:
    """Corner-source values on the whole box ``[0, nx) x [0, ny)`` of a quadrant field."""
    if field.support is not Support.QUADRANT:
        raise DomainError("passage_grid is defined on the quadrant support only")
    nx, ny = int(shape[0]), int(shape[1])
    if field.array is not None and (nx > field.array.shape[0] or ny > field.array.shape[1]):
        raise DomainError("box exceeds the explicit weight array")
    return np.asarray(kernels.passage_grid(field.kernel_params(), mode.code, mode.kernel_beta, nx, ny))


# --- Poisson points ----------------------------------------------------------


def lis_length(points) -> int:
    """Longest chain of points strictly increasing in both coordinates."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return 0
    return int(kernels.lis_length(np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])))


def _with_sources(field: PointField, bulk: np.ndarray, x: float, y: float) -> np.ndarray:
    bottom, left = sample_sources(field, x, y)
    if len(bottom) == 0 and len(left) == 0:
        return bulk
    # sources sit just off the axes: each family is a chain of its own that
    # precedes every bulk point and cannot be mixed with the other family
    ex = 0.5 * min(float(bulk[:, 0].min()) if len(bulk) else 1.0, 1e-9)
    ey = 0.5 * min(float(bulk[:, 1].min()) if len(bulk) else 1.0, 1e-9)
    eb = ey * (np.arange(1, len(bottom) + 1) / (len(bottom) + 1))
    el = ex * (np.arange(1, len(left) + 1) / (len(left) + 1))
    src = np.concatenate([np.column_stack([bottom, eb]), np.column_stack([el, left])])
    return np.concatenate([bulk, src]) if len(bulk) else src


def png_passage(field: PointField, target) -> int:
    """PNG passage value: longest increasing chain of points below ``target``.

    For a half-plane field the chain starts anywhere on ``{x + y >= offset}``
    (flat PNG); otherwise it lives in the quadrant cone ``[0, x) x [0, y)``
    (droplet), with boundary-source points merged in when configured.
    """
    x, y = float(target[0]), float(target[1])
    if isinstance(field.region, HalfPlane):
        off = field.region.offset
        if x + y < off:
            raise DomainError(f"target {target} is below the half-plane x + y >= {off}")
        pts = sample_points(field, Rect(off - y, off - x, x, y))
        return lis_length(pts)
    if x < 0 or y < 0:
        raise DomainError(f"target {target} is outside the quadrant")
    pts = sample_points(field, Rect(0.0, 0.0, x, y))
    return lis_length(_with_sources(field, pts, x, y))
