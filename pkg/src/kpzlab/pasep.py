"""Continuous-time PASEP on a finite window by the graphical construction.

Every bond carries right arrows at rate ``p`` and left arrows at rate
``q = 1 - p``. By superposition the arrows of all bonds form one Poisson
stream of rate ``n_bonds`` with independent uniform bond marks and a
right/left coin of bias ``p``, which is how they are drawn here: from the
counter-based hash, so every coupled copy of the system reads the same
arrows. A particle follows an arrow leaving its site unless the target
site is occupied.

Heights follow ``h(x) - h(x - 1) = 1 - 2 eta(x)`` with ``h(0, 0) = 0``; a
jump across the bond ``(x, x + 1)`` moves ``h(x)`` by +-2 and nothing else.
The integrated current is reported as ``I(x, t) = (h(x, t) - x) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import rng
from ._backend import kernels
from .errors import ConfigError, DomainError

# --- initial conditions ----------------------------------------------------------


@dataclass(frozen=True)
class Step:
    """Sites ``x <= 0`` occupied, ``x > 0`` empty."""


@dataclass(frozen=True)
class StepBernoulli:
    """Sites ``x <= 0`` empty, ``x > 0`` occupied independently with probability ``rho_plus``."""

    rho_plus: float


@dataclass(frozen=True)
class TwoSidedBernoulli:
    rho_minus: float
    rho_plus: float


@dataclass(frozen=True)
class Occupied:
    """Exactly the listed sites occupied (``all_sites=True``: the whole window)."""

    sites: tuple = ()
    all_sites: bool = False


InitialCondition = object


def _check_density(*rhos):
    for r in rhos:
        if not 0.0 <= r <= 1.0:
            raise ConfigError(f"density {r} outside [0, 1]")


@dataclass(frozen=True)
class PasepConfig:
    p: float
    initial: object
    horizon: float
    seed: int = 0
    monitor: tuple = (0, 0)  # x-range whose observables must be exact
    half_width: Optional[int] = None
    margin: float = 1.5

    def __post_init__(self):
        if not 0.5 < self.p <= 1.0:
            raise ConfigError(f"right rate p must lie in (1/2, 1], got {self.p}")
        if not self.horizon >= 0:
            raise ConfigError("horizon must be non-negative")
        ic = self.initial
        if isinstance(ic, StepBernoulli):
            _check_density(ic.rho_plus)
        elif isinstance(ic, TwoSidedBernoulli):
            _check_density(ic.rho_minus, ic.rho_plus)
        elif not isinstance(ic, (Step, Occupied)):
            raise ConfigError(f"unknown initial condition {ic!r}")
        reach = max(abs(int(self.monitor[0])), abs(int(self.monitor[1])))
        if self.half_width is not None and not self.half_width > self.horizon + reach:
            raise ConfigError(f"window half-width {self.half_width} violates the light cone: need > "
                              f"horizon + monitored range = {self.horizon + reach}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def drift(self) -> float:
        return self.p - self.q

    @property
    def L(self) -> int:
        if self.half_width is not None:
            return int(self.half_width)
        reach = max(abs(int(self.monitor[0])), abs(int(self.monitor[1])))
        return int(math.ceil(self.margin * self.horizon)) + reach + 4

    def with_seed(self, seed: int) -> "PasepConfig":
        return PasepConfig(self.p, self.initial, self.horizon, seed, self.monitor, self.half_width,
                           self.margin)


@dataclass
class ArrowEnvironment:
    """All arrows of the window up to ``horizon``, in time order."""

    times: np.ndarray
    bonds: np.ndarray
    right: np.ndarray
    n_bonds: int
    horizon: float

    @classmethod
    def build(cls, seed: int, n_bonds: int, p: float, horizon: float) -> "ArrowEnvironment":
        key = rng.derive_seed(seed, rng.SALT_ARROWS)
        times, bonds, right = kernels.pasep_events(key, int(n_bonds), float(p), float(horizon))
        return cls(np.asarray(times), np.asarray(bonds), np.asarray(right), int(n_bonds), float(horizon))


@dataclass
class PasepState:
    t: float
    L: int
    eta: np.ndarray  # int8 occupations of sites -L..L
    h: np.ndarray  # int64 heights at sites -L..L
    flux: np.ndarray  # net right jumps across (x, x+1), for x = -L..L

    def _index(self, x) -> int:
        k = int(x) + self.L
        if not 0 <= k < len(self.eta):
            raise DomainError(f"site {x} outside the window [-{self.L}, {self.L}]")
        return k

    def occupation(self, x) -> int:
        return int(self.eta[self._index(x)])

    def height(self, x) -> int:
        return int(self.h[self._index(x)])

    def current(self, x) -> float:
        return 0.5 * (self.height(x) - int(x))

    def copy(self) -> "PasepState":
        return PasepState(self.t, self.L, self.eta.copy(), self.h.copy(), self.flux.copy())

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.L, self.L + 1)


def initial_occupation(ic, L: int, seed: int) -> np.ndarray:
    x = np.arange(-L, L + 1)
    if isinstance(ic, Step):
        return (x <= 0).astype(np.int8)
    if isinstance(ic, Occupied):
        if ic.all_sites:
            return np.ones(len(x), dtype=np.int8)
        eta = np.zeros(len(x), dtype=np.int8)
        for s in ic.sites:
            if not -L <= s <= L:
                raise DomainError(f"initial site {s} outside the window")
            eta[s + L] = 1
        return eta
    key = rng.derive_seed(seed, rng.SALT_INIT)
    u = rng.uniform2_array(key, x, 0)
    if isinstance(ic, StepBernoulli):
        return ((x > 0) & (u < ic.rho_plus)).astype(np.int8)
    if isinstance(ic, TwoSidedBernoulli):
        rho = np.where(x <= 0, ic.rho_minus, ic.rho_plus)
        return (u < rho).astype(np.int8)
    raise ConfigError(f"unknown initial condition {ic!r}")


def heights_from_occupation(eta: np.ndarray, L: int, h0: int = 0, anchor: int = 0) -> np.ndarray:
    """Heights with ``h(anchor) = h0`` and slopes ``1 - 2 eta``."""
    slope = 1 - 2 * eta.astype(np.int64)
    h = np.concatenate([[0], np.cumsum(slope[1:])])  # h[k] - h[0] = sum of slopes of sites 1..k
    return h - h[anchor + L] + h0


class PasepSystem:
    """One PASEP copy driven by a shared :class:`ArrowEnvironment`."""

    def __init__(self, arrows: ArrowEnvironment, L: int, eta: np.ndarray, h: np.ndarray, t: float = 0.0,
                 next_event: int = 0):
        if len(eta) != arrows.n_bonds + 1 or len(eta) != 2 * L + 1:
            raise ConfigError("window and arrow environment disagree")
        self.arrows = arrows
        self.state = PasepState(t, L, np.ascontiguousarray(eta, dtype=np.int8),
                                np.ascontiguousarray(h, dtype=np.int64), np.zeros(len(eta), dtype=np.int64))
        self.next_event = int(next_event)

    def advance(self, t: float) -> PasepState:
        if t < self.state.t:
            raise DomainError("cannot run backwards in time")
        if t > self.arrows.horizon:
            raise DomainError(f"time {t} beyond the arrow horizon {self.arrows.horizon}")
        a = self.arrows
        self.next_event = int(kernels.pasep_run(self.state.eta, self.state.h, self.state.flux, a.times,
                                                a.bonds, a.right, self.next_event, float(t)))
        self.state.t = float(t)
        return self.state


def start(config: PasepConfig) -> PasepSystem:
    L = config.L
    arrows = ArrowEnvironment.build(config.seed, 2 * L, config.p, config.horizon)
    eta = initial_occupation(config.initial, L, config.seed)
    return PasepSystem(arrows, L, eta, heights_from_occupation(eta, L))


def simulate(config: PasepConfig, times: Sequence[float]) -> list:
    """States at the requested (non-decreasing) times."""
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ConfigError("sample times must be non-decreasing")
    if times and times[-1] > config.horizon:
        raise ConfigError(f"sample time {times[-1]} beyond the horizon {config.horizon}")
    system = start(config)
    return [system.advance(t).copy() for t in times]


def height_and_current(state: PasepState, x) -> tuple:
    h = state.height(x)
    return h, 0.5 * (h - int(x))


@dataclass(frozen=True)
class StepResetResult:
    x0: int
    x1: int
    t: float
    s: float
    h_before: int  # h(x0, t)
    h_main: int  # h(x1, t + s)
    h_step: int  # step-reset copy at (x1, t + s)
    i_before: float
    i_main: float
    i_step: float
    x_t: float  # i_main - i_before - i_step, always <= 0


def coupled_step_reset(config: PasepConfig, v: float, u: float, nu: float, t: float) -> StepResetResult:
    """Current decomposition across the space-time segment ``(vt, t) -> (vt + u t^nu, t + t^nu)``.

    At time ``t`` a second copy is started from step data centred at
    ``x0 = round(vt)`` (sites ``<= x0`` full), with heights matched at
    ``x0``. Both copies then run on the same arrows. By attractiveness the
    copy dominates the original, so ``X_t = (h(x1) - h'(x1)) / 2 <= 0``.
    """
    if t < 0:
        raise ConfigError("t must be non-negative")
    s = t ** nu if t > 0 else 0.0
    if t + s > config.horizon:
        raise ConfigError(f"t + t^nu = {t + s} exceeds the horizon {config.horizon}")
    x0 = int(round(v * t))
    x1 = int(round(v * t + u * s))
    reach = max(abs(x0), abs(x1))
    L = config.L
    if not L > config.horizon + reach:
        raise ConfigError(f"window half-width {L} violates the light cone for sites up to {reach}")
    main = start(config)
    st = main.advance(t)
    h_before = st.height(x0)
    sites = st.sites
    eta_step = (sites <= x0).astype(np.int8)
    h_step0 = h_before + np.abs(sites - x0)
    step = PasepSystem(main.arrows, L, eta_step, h_step0, t, main.next_event)
    h_main = main.advance(t + s).height(x1)
    h_step = step.advance(t + s).height(x1)
    i_before = 0.5 * (h_before - x0)
    i_main = 0.5 * (h_main - x1)
    i_step = 0.5 * (h_step - h_before - (x1 - x0))
    return StepResetResult(x0, x1, float(t), float(s), int(h_before), int(h_main), int(h_step),
                           i_before, i_main, i_step, i_main - i_before - i_step)


def attractiveness_gap(config: PasepConfig, lower, upper, times: Sequence[float]) -> int:
    """Smallest ``h_upper - h_lower`` over the window and the given times.

    The two initial conditions run on one arrow environment; their initial
    heights must be ordered. The result is >= 0 on every sample.
    """
    L = config.L
    arrows = ArrowEnvironment.build(config.seed, 2 * L, config.p, config.horizon)
    systems = []
    for ic in (lower, upper):
        eta = initial_occupation(ic, L, config.seed)
        systems.append(PasepSystem(arrows, L, eta, heights_from_occupation(eta, L)))
    gap = systems[1].state.h - systems[0].state.h
    if (gap < 0).any():
        raise ConfigError("initial heights are not ordered")
    best = int(gap.min())
    for t in times:
        a = systems[0].advance(t)
        b = systems[1].advance(t)
        best = min(best, int((b.h - a.h).min()))
    return best


def step_current_shape(u: float, drift: float = 1.0) -> float:
    """Law of large numbers for the step current: ``I(us, s) / s -> drift (1 - u/drift)^2 / 4``."""
    w = u / drift
    if w <= -1.0:
        return -u  # every site left of the origin has been emptied: I = (h - x)/2 with h = |x|
    if w >= 1.0:
        return 0.0
    return drift * (1.0 - w) ** 2 / 4.0
