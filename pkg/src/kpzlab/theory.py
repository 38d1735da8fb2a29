"""Limit shapes, fluctuation constants, characteristic directions and
scaling frames for the exponential last-passage models.

Directions are ``p = (x, y)`` in site coordinates, with ``x`` along the
row ``j = 0`` (rate ``pi`` boundary) and ``y`` along the column ``i = 0``
(rate ``eta`` boundary).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import ConfigError, DomainError

GAMMA_PP = 1.0 / 3.0


class Case(str, enum.Enum):
    BULK = "bulk_gue"
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    CASE4 = "case4"
    CASE5 = "case5"
    CASE6 = "case6"


class Dist(str, enum.Enum):
    GUE = "GUE"
    GOE_SQ = "GOEsq"
    F0 = "F0"
    GAUSSIAN = "Gaussian"
    MAX_TWO_GAUSSIANS = "MaxTwoGaussians"


def lpp_shape(u) -> float:
    """Rate-1 point-to-point shape ``(sqrt(u1) + sqrt(u2))**2``."""
    u1, u2 = float(u[0]), float(u[1])
    if u1 < 0 or u2 < 0:
        raise DomainError(f"direction {u} is not in the quadrant")
    return (math.sqrt(u1) + math.sqrt(u2)) ** 2


def lpp_scale(u) -> float:
    """Rate-1 GUE fluctuation constant: ``L(tu) ~ t lpp_shape(u) + lpp_scale(u) t^(1/3) chi``."""
    u1, u2 = float(u[0]), float(u[1])
    if u1 <= 0 or u2 <= 0:
        raise DomainError(f"direction {u} must be strictly inside the quadrant")
    return (math.sqrt(u1) + math.sqrt(u2)) ** (4.0 / 3.0) * (u1 * u2) ** (-1.0 / 6.0)


@dataclass(frozen=True)
class CharacteristicInfo:
    case: Case
    p: tuple
    ell_hl: float
    gamma_hl: float
    c_hl: Optional[float]  # None when the constant is not known in closed form
    u: tuple
    ell_pp: float
    c_pp: float
    dist: Dist
    slow_decorrelation: bool
    kappa: Optional[dict] = None
    gamma_pp: float = GAMMA_PP
    dist_pp: Dist = Dist.GUE

    @property
    def nu_range(self) -> tuple:
        return (0.0, self.gamma_hl / self.gamma_pp)

    def scaled(self, factor: float) -> "CharacteristicInfo":
        """Same information for the direction ``factor * p``, with ``u`` rescaled alike.

        Used to put ``t`` in passage-time units (``ell_hl == 1``).
        """
        f = float(factor)
        return replace(self, p=(self.p[0] * f, self.p[1] * f), ell_hl=self.ell_hl * f,
                       c_hl=None if self.c_hl is None else self.c_hl * f ** self.gamma_hl,
                       u=(self.u[0] * f, self.u[1] * f), ell_pp=self.ell_pp * f,
                       c_pp=self.c_pp * f ** GAMMA_PP)

    def normalized(self) -> "CharacteristicInfo":
        return self.scaled(1.0 / self.ell_hl)


def bulk_info(p=(1.0, 1.0)) -> CharacteristicInfo:
    """Corner growth (rate-1 quadrant) along ``p``: GUE, characteristic ``u = p``."""
    p = (float(p[0]), float(p[1]))
    ell = lpp_shape(p)
    c = lpp_scale(p)
    return CharacteristicInfo(Case.BULK, p, ell, GAMMA_PP, c, p, ell, c, Dist.GUE, True)


def corner_limit_shape(v: float) -> float:
    """Almost sure limit of ``h(vt, t) / t`` for the step corner growth."""
    v = float(v)
    if abs(v) < 1.0:
        return 0.5 * (v * v + 1.0)
    return abs(v)


def corner_fluctuation_scale(v: float) -> float:
    """Height fluctuation constant ``2^(-1/3) (1 - v^2)^(2/3)`` (times ``t^(1/3)``)."""
    if not abs(v) < 1.0:
        raise DomainError("fluctuation scale is defined for |v| < 1")
    return 2.0 ** (-1.0 / 3.0) * (1.0 - v * v) ** (2.0 / 3.0)


def tasep_characteristic_speed(rho: float) -> float:
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"density must lie in [0, 1], got {rho}")
    return 1.0 - 2.0 * rho


def kappas(pi: float, eta: float) -> dict:
    """``kappa_eta``, ``kappa_pi`` and ``kappa_sh``; a rate >= 1 means no boundary on that side."""
    if not (pi > 0 and eta > 0):
        raise DomainError("boundary rates must be positive")
    k_eta = math.inf if eta >= 1.0 else eta / (1.0 - eta)
    k_pi = 0.0 if pi >= 1.0 else (1.0 - pi) / pi
    k_sh = math.sqrt(k_eta * k_pi) if math.isfinite(k_eta) else math.inf
    return {"eta": k_eta, "pi": k_pi, "sh": k_sh}


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-14)


def classify_two_sided(pi: float, eta: float, kappa: float) -> CharacteristicInfo:
    """Case of the two-sided boundary model at ``p = (1, kappa^2)``.

    Equalities between ``kappa`` and the critical values are decided with a
    relative tolerance of 1e-12.
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    k = kappas(pi, eta)
    k_eta, k_pi, k_sh = k["eta"], k["pi"], k["sh"]
    p = (1.0, kappa * kappa)
    eff_pi, eff_eta = min(pi, 1.0), min(eta, 1.0)
    gaussian = dict(gamma_hl=0.5, c_hl=None, slow_decorrelation=True, kappa=k)

    def along_eta():
        u = (1.0, k_eta ** 2)
        return dict(ell_hl=kappa ** 2 / eff_eta + 1.0 / (1.0 - eff_eta), u=u,
                    ell_pp=lpp_shape(u), c_pp=lpp_scale(u), dist=Dist.GAUSSIAN)

    def along_pi():
        u = (1.0, k_pi ** 2)
        return dict(ell_hl=1.0 / eff_pi + kappa ** 2 / (1.0 - eff_pi), u=u,
                    ell_pp=lpp_shape(u), c_pp=lpp_scale(u), dist=Dist.GAUSSIAN)

    rarefaction = pi + eta >= 1.0 or not (math.isfinite(k_eta) and k_pi > 0)
    if rarefaction:
        hi_eq = _close(kappa, k_eta)
        lo_eq = _close(kappa, k_pi)
        if (kappa < k_eta or hi_eq) and (kappa > k_pi or lo_eq):
            if hi_eq and lo_eq:
                dist = Dist.F0
            elif hi_eq or lo_eq:
                dist = Dist.GOE_SQ
            else:
                dist = Dist.GUE
            ell = (1.0 + kappa) ** 2
            c = lpp_scale(p)
            return CharacteristicInfo(Case.CASE1, p, ell, GAMMA_PP, c, p, ell, c, dist, True, k)
        if kappa > k_eta:
            return CharacteristicInfo(Case.CASE2, p, **along_eta(), **gaussian)
        return CharacteristicInfo(Case.CASE3, p, **along_pi(), **gaussian)
    if _close(kappa, k_sh):
        # both branches meet: kappa_sh^2 / eta + 1 / (1 - eta) = 1 / (pi (1 - eta))
        ell = 1.0 / (pi * (1.0 - eta))
        u = (1.0, k_eta ** 2)
        return CharacteristicInfo(Case.CASE6, p, ell, 0.5, None, u, lpp_shape(u), lpp_scale(u),
                                  Dist.MAX_TWO_GAUSSIANS, False, k)
    if kappa > k_sh:
        return CharacteristicInfo(Case.CASE4, p, **along_eta(), **gaussian)
    return CharacteristicInfo(Case.CASE5, p, **along_pi(), **gaussian)


@dataclass(frozen=True)
class Shape:
    """Deterministic first-order value of a half-line passage time at ``(x, y)``.

    ``kind`` is ``"bulk"`` (rate-1 quadrant) or ``"two_sided"``.
    """

    kind: str = "bulk"
    pi: float = 1.0
    eta: float = 1.0

    def __call__(self, x: float, y: float) -> float:
        x, y = float(x), float(y)
        if self.kind == "bulk":
            return lpp_shape((x, y))
        if x <= 0 or y <= 0:
            # on an axis only the boundary weights are collected
            return x / self.pi if y <= 0 else y / self.eta
        info = classify_two_sided(self.pi, self.eta, math.sqrt(y / x))
        return x * info.ell_hl


# --- scaling frames -----------------------------------------------------------


@dataclass(frozen=True)
class ScalingFrame:
    t: float
    nu: float = 0.0
    tau: float = 0.0
    theta: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError("t must be positive")
        if not 0.0 <= self.nu < 1.0:
            raise DomainError("nu must lie in [0, 1)")

    @property
    def point(self) -> tuple:
        return scaling_frame(self.t, self.nu, self.tau, self.theta, self.s)


def scaling_frame(t: float, nu: float, tau: float, theta: float, s: float) -> tuple:
    """Lattice point ``(x, y)`` and passage level ``ell`` of the corner-growth frame.

    ``x = floor((t + theta t^nu)/4 + tau 2^(-2/3) t^(2/3))``, ``y`` the same with
    ``-tau``, and ``ell = t + theta t^nu + (s - tau^2) 2^(2/3) t^(1/3)``.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if not 0.0 <= nu < 1.0:
        raise DomainError("nu must lie in [0, 1)")
    shift = theta * t ** nu
    base = 0.25 * (t + shift)
    lateral = tau * 2.0 ** (-2.0 / 3.0) * t ** (2.0 / 3.0)
    x = math.floor(base + lateral)
    y = math.floor(base - lateral)
    ell = t + shift + (s - tau * tau) * 2.0 ** (2.0 / 3.0) * t ** (1.0 / 3.0)
    return x, y, ell


def theta_for_slice(t: float, nu: float, tau: float) -> float:
    """``theta`` with ``theta t^nu = tau 2^(4/3) t^(2/3)``: the fixed ``y = t/4`` slice."""
    return tau * 2.0 ** (4.0 / 3.0) * t ** (2.0 / 3.0) / t ** nu


def theta_for_level(t: float, nu: float, tau: float, s: float) -> float:
    """``theta`` with ``theta t^nu = -(s - tau^2) 2^(2/3) t^(1/3)``: passage level ``ell = t``."""
    return -(s - tau * tau) * 2.0 ** (2.0 / 3.0) * t ** (1.0 / 3.0) / t ** nu


def offline_point(t: float, nu: float, tau: float, theta_tilde: float, s: float = 0.0) -> tuple:
    """Real point with ``x - y = tau 2^(1/3) t^(2/3)`` and
    ``x + y = (t + theta_tilde t^nu)/2 - (s - tau^2) 2^(-1/3) t^(1/3)``."""
    diff = tau * 2.0 ** (1.0 / 3.0) * t ** (2.0 / 3.0)
    total = 0.5 * (t + theta_tilde * t ** nu) - (s - tau * tau) * 2.0 ** (-1.0 / 3.0) * t ** (1.0 / 3.0)
    return 0.5 * (total + diff), 0.5 * (total - diff)


def project_to_reference_line(point, reference: float, direction=None, t: Optional[float] = None):
    """Move ``point`` along ``direction`` onto the line ``y = reference``.

    ``direction`` defaults to the ray through the origin, which is the
    characteristic of the corner growth model. Returns ``(x, y)`` of the
    projection and, when ``t`` is given, the lateral coordinate
    ``tau~ = (x - t/4) / (2^(1/3) t^(2/3))`` on the ``y = t/4`` slice.
    """
    x, y = float(point[0]), float(point[1])
    dx, dy = (x, y) if direction is None else (float(direction[0]), float(direction[1]))
    if dy == 0.0:
        raise DomainError("direction is parallel to the reference line")
    if dx < 0 or dy < 0:
        raise DomainError("direction must be time-like (both components >= 0)")
    lam = (reference - y) / dy
    px, py = x + lam * dx, float(reference)
    if t is None:
        return (px, py), None
    tau_tilde = (px - 0.25 * t) / (2.0 ** (1.0 / 3.0) * t ** (2.0 / 3.0))
    return (px, py), tau_tilde


def project_to_level_curve(point, t: float, s: float = 0.0) -> tuple:
    """Move ``point`` along the ray through the origin onto the ``theta_tilde = 0`` curve of
    :func:`offline_point` at level ``s``.

    The curve is ``x - y = tau' 2^(1/3) t^(2/3)``,
    ``x + y = t/2 - (s - tau'^2) 2^(-1/3) t^(1/3)``; the ray meets it where
    a quadratic in the ray parameter has its small root. Returns ``(x, y)``
    and the modified ``tau'``.
    """
    X, Y = float(point[0]), float(point[1])
    if X < 0 or Y < 0 or X + Y == 0:
        raise DomainError("point must lie in the open quadrant")
    a = 2.0 ** (1.0 / 3.0) * t ** (2.0 / 3.0)
    b = 2.0 ** (-1.0 / 3.0) * t ** (1.0 / 3.0)
    D, S = X - Y, X + Y
    A = D * D * b / (a * a)
    C = 0.5 * t - s * b
    disc = S * S - 4.0 * A * C
    if disc < 0 or C <= 0:
        raise DomainError("the ray through the point misses the level curve")
    lam = 2.0 * C / (S + math.sqrt(disc))
    return (lam * X, lam * Y), lam * D / a


class Which(str, enum.Enum):
    CHI1 = "chi1"
    CHI2 = "chi2"
    CHI3 = "chi3"


def rescale(raw: float, t: float, nu: float, info: CharacteristicInfo, which, scale: Optional[float] = None):
    """Normalized fluctuation variable for a raw passage value.

    ``chi1 = (raw - t ell_hl) / (c_hl t^gamma_hl)``,
    ``chi2 = (raw - t ell_hl - t^nu ell_pp) / (c_hl t^gamma_hl)``,
    ``chi3 = (raw - t^nu ell_pp) / (c_pp t^(nu gamma_pp))``.
    ``scale`` replaces ``c_hl`` when the constant is empirical.
    """
    which = Which(which)
    c_hl = scale if scale is not None else info.c_hl
    if which is Which.CHI3:
        s = t ** nu
        return (raw - s * info.ell_pp) / (info.c_pp * s ** info.gamma_pp)
    if c_hl is None:
        raise ConfigError(f"{info.case.value} has no closed-form c_hl; pass an empirical scale")
    centre = t * info.ell_hl
    if which is Which.CHI2:
        centre = centre + t ** nu * info.ell_pp
    return (raw - centre) / (c_hl * t ** info.gamma_hl)
