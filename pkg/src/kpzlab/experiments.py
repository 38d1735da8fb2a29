"""Monte Carlo harnesses: slow decorrelation, exponent fits, one-point laws,
projections, and the PASEP and polymer variants.

Every sample draws a fresh environment from ``sample_seed(seed, k, t_index)``
and evaluates all passage values it needs on that single environment, so
the compensator ``X_t`` is computed exactly per sample. Work is split in
fixed chunks of sample indices and concatenated in index order, which makes
every report independent of the worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, is_dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import pasep as ps
from . import rng
from .environment import Exponential, TwoSided, WeightField
from .errors import ConfigError, FitError
from .models import ModelSpec, polymer
from .passage import MaxPlus, _evaluate
from .refdist import Empirical, ReferenceDistribution, ks_statistic
from .theory import CharacteristicInfo, Shape, bulk_info, lpp_scale, lpp_shape, offline_point, \
    project_to_level_curve, project_to_reference_line

CHUNK = 250  # samples per work unit


# --- plumbing -----------------------------------------------------------------------


def _pmap(fn: Callable, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _chunks(n: int):
    return [(k, min(k + CHUNK, n)) for k in range(0, n, CHUNK)]


def _field_for(model: ModelSpec, seed: int, k: int, t_index: int):
    return model.field.with_seed(rng.sample_seed(seed, k, t_index))


def site_offset(field: WeightField) -> int:
    """Offset between a 0-based site and its continuous coordinate.

    The boundary model indexes its row and column as coordinate 0, so site
    ``(i, j)`` sits at ``(i, j)``. Without a boundary the site ``(i, j)`` is
    the cell ``(i + 1, j + 1)`` of the corner growth picture.
    """
    return 0 if isinstance(field.boundary, TwoSided) else 1


def lattice_site(field: WeightField, point) -> tuple:
    off = site_offset(field)
    return (max(int(round(point[0])) - off, 0), max(int(round(point[1])) - off, 0))


def default_shape(model: ModelSpec) -> Optional[Shape]:
    f = model.field
    if not isinstance(f, WeightField) or model.mode != MaxPlus or f.array is not None:
        return None
    if not (isinstance(f.bulk, Exponential) and f.bulk.rate == 1.0):
        return None
    if isinstance(f.boundary, TwoSided):
        return Shape("two_sided", f.boundary.pi, f.boundary.eta)
    if f.boundary is None and f.support.value == "quadrant":
        return Shape("bulk")
    return None


def _tail_rows(delta: np.ndarray, t: float, gamma: float, m_grid) -> list:
    n = len(delta)
    rows = []
    for M in m_grid:
        prob = float(np.mean(np.abs(delta) >= M * t ** gamma))
        rows.append({"t": t, "M": float(M), "prob": prob, "se": math.sqrt(prob * (1.0 - prob) / n)})
    return rows


def _corr(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.std() == 0 or b.std() == 0:
        return 1.0 if np.array_equal(a - a.mean(), b - b.mean()) else float("nan")
    return float(np.corrcoef(a, b)[0, 1])


# --- decorrelation -------------------------------------------------------------------


@dataclass(frozen=True)
class DecorrConfig:
    model: ModelSpec
    info: Optional[CharacteristicInfo]  # None: centre and scale everything empirically
    nu: float
    t_grid: tuple
    m_grid: tuple = (1.0,)
    samples: int = 1000
    seed: int = 0
    u: Optional[tuple] = None  # shift direction; defaults to the characteristic info.u
    p: Optional[tuple] = None  # base direction; defaults to info.p
    allow_no_decorrelation: bool = False
    workers: int = 1

    @property
    def direction(self) -> tuple:
        if self.p is not None:
            return tuple(float(x) for x in self.p)
        if self.info is None:
            raise ConfigError("a base direction p is required without characteristic info")
        return self.info.p

    @property
    def shift(self) -> tuple:
        if self.u is not None:
            return tuple(float(x) for x in self.u)
        if self.info is None:
            raise ConfigError("a shift direction u is required without characteristic info")
        return self.info.u

    def validate(self, off_characteristic: bool = False) -> None:
        if not 0.0 < self.nu < 1.0:
            raise ConfigError(f"nu must lie in (0, 1), got {self.nu}")
        if not self.t_grid or any(not t > 0 for t in self.t_grid):
            raise ConfigError("t grid must be non-empty and positive")
        if any(not m > 0 for m in self.m_grid):
            raise ConfigError("M grid must be positive")
        if self.samples < 2:
            raise ConfigError("need at least two samples")
        if not isinstance(self.model.field, WeightField):
            raise ConfigError("decorrelation runs on lattice models")
        info = self.info
        if info is not None:
            if not info.slow_decorrelation and not self.allow_no_decorrelation:
                raise ConfigError(f"{info.case.value} has no slow decorrelation; set the override flag "
                                  "to run it as a control")
            if not off_characteristic and not self.nu < info.gamma_hl / info.gamma_pp:
                raise ConfigError(f"nu = {self.nu} must be below gamma_hl / gamma_pp = "
                                  f"{info.gamma_hl / info.gamma_pp:.4g}")
            if off_characteristic and not self.nu > info.gamma_pp:
                raise ConfigError(f"the off-characteristic control needs nu > gamma_pp = {info.gamma_pp:.4g}")


@dataclass
class DecorrReport:
    experiment: str
    config: dict
    targets: list  # per t: {"t", "p_site", "q_site", "nu_achieved", "ell_pp"}
    table: list  # per (t, M): {"t", "M", "prob", "se"}
    compensator: list  # per t: {"t", "min", "mean", "max", "mean_scaled"}
    violations: int
    correlation: list  # per t: corr(chi1, chi2)
    samples: dict  # column name -> array, stacked over t
    flags: list = field(default_factory=list)

    def probs(self, M: float = 1.0) -> list:
        return [(r["t"], r["prob"], r["se"]) for r in self.table if r["M"] == M]

    def chi(self, which: str, t: float) -> np.ndarray:
        mask = self.samples["t"] == t
        return self.samples[which][mask]


def _decorr_chunk(args):
    model, seed, t_index, k0, k1, p_site, q_site, sign = args
    field_ = model.field
    mode = model.mode
    out = np.empty((k1 - k0, 3))
    for r, k in enumerate(range(k0, k1)):
        f = field_.with_seed(rng.sample_seed(seed, k, t_index))
        hl = _evaluate(f, mode, None, True, [p_site, q_site])
        pp = _evaluate(f, mode, p_site, False, [q_site])[0]
        out[r] = (hl[0], hl[1], pp)
    return out


def _decorr(cfg: DecorrConfig, experiment: str, off_characteristic: bool) -> DecorrReport:
    cfg.validate(off_characteristic)
    model, info = cfg.model, cfg.info
    f0 = model.field
    p, u = cfg.direction, cfg.shift
    shape = default_shape(model) if info is not None else None
    off = site_offset(f0)
    sign = model.mode.compensator_sign
    gamma = info.gamma_hl if info is not None else 1.0 / 3.0
    flags = []
    targets, raw = [], []
    for ti, t in enumerate(cfg.t_grid):
        s = t ** cfg.nu
        p_site = lattice_site(f0, (t * p[0], t * p[1]))
        q_site = lattice_site(f0, (t * p[0] + s * u[0], t * p[1] + s * u[1]))
        if q_site[0] < p_site[0] or q_site[1] < p_site[1]:
            raise ConfigError("the shifted point must dominate the base point")
        d = (q_site[0] - p_site[0], q_site[1] - p_site[1])
        u_len = abs(u[0]) + abs(u[1])
        nu_ach = math.log((d[0] + d[1]) / u_len) / math.log(t) if d[0] + d[1] > 0 and t > 1 else float("nan")
        tasks = [(model, cfg.seed, ti, a, b, p_site, q_site, sign) for a, b in _chunks(cfg.samples)]
        vals = np.concatenate(_pmap(_decorr_chunk, tasks, cfg.workers))
        raw.append(vals)
        targets.append({"t": float(t), "s": s, "p_site": p_site, "q_site": q_site, "d": d,
                        "nu_achieved": nu_ach})

    # centring constants at the achieved lattice points
    for tg, vals in zip(targets, raw):
        d = tg["d"]
        if info is not None and shape is not None:
            tg["centre_p"] = shape(tg["p_site"][0] + off, tg["p_site"][1] + off)
            tg["centre_q"] = shape(tg["q_site"][0] + off, tg["q_site"][1] + off)
        else:
            tg["centre_p"] = float(vals[:, 0].mean())
            tg["centre_q"] = float(vals[:, 1].mean())
        if info is not None and model.mode == MaxPlus:
            tg["ell_pp"] = lpp_shape(d)
            tg["scale_pp"] = lpp_scale(d) if min(d) > 0 else None
        else:
            tg["ell_pp"] = float(vals[:, 2].mean())
            tg["scale_pp"] = None
    if info is None or shape is None:
        flags.append("empirical centring: shapes are sample means")

    # fluctuation scale of chi1 / chi2
    T = targets[-1]["t"]
    if info is not None and info.c_hl is not None and shape is not None:
        c_hl = info.c_hl
    else:
        resid = raw[-1][:, 0] - targets[-1]["centre_p"]
        c_hl = float(resid.std()) / T ** gamma
        flags.append("empirical scale: chi divided by the sample std at the largest t")
        if c_hl == 0:
            c_hl = 1.0

    cols = {k: [] for k in ("t", "k", "L_p", "L_q", "L_pp", "X", "delta", "chi1", "chi2", "chi3")}
    table, comp, corrs = [], [], []
    violations = 0
    for tg, vals in zip(targets, raw):
        t = tg["t"]
        Lp, Lq, Lpp = vals[:, 0], vals[:, 1], vals[:, 2]
        X = Lq - Lp - Lpp
        # exact in real arithmetic; allow float round-off in the two summation orders
        tol = 1e-9 * (np.abs(Lq) + 1.0)
        violations += int(np.count_nonzero(sign * X < -tol))
        delta = Lq - Lp - tg["ell_pp"]
        chi1 = (Lp - tg["centre_p"]) / (c_hl * t ** gamma)
        chi2 = (Lq - tg["centre_q"]) / (c_hl * t ** gamma)
        if tg["scale_pp"]:
            chi3 = (Lpp - tg["ell_pp"]) / tg["scale_pp"]
        else:
            sd = Lpp.std()
            chi3 = (Lpp - Lpp.mean()) / (sd if sd > 0 else 1.0)
        n = len(Lp)
        for name, arr in (("t", np.full(n, t)), ("k", np.arange(n, dtype=np.float64)), ("L_p", Lp),
                          ("L_q", Lq), ("L_pp", Lpp), ("X", X), ("delta", delta), ("chi1", chi1),
                          ("chi2", chi2), ("chi3", chi3)):
            cols[name].append(arr)
        table.extend(_tail_rows(delta, t, gamma, cfg.m_grid))
        comp.append({"t": t, "min": float(X.min()), "mean": float(X.mean()), "max": float(X.max()),
                     "mean_scaled": float(X.mean()) / t ** gamma})
        corrs.append({"t": t, "corr": _corr(chi1, chi2)})
    samples = {k: np.concatenate(v) for k, v in cols.items()}
    return DecorrReport(experiment, describe(cfg), targets, table, comp, violations, corrs, samples, flags)


def run_decorrelation(cfg: DecorrConfig) -> DecorrReport:
    """Tail probabilities of ``Delta_t = L(tp + t^nu u) - L(tp) - t^nu ell_pp`` along the characteristic."""
    return _decorr(cfg, "decorr", off_characteristic=False)


def run_off_characteristic_control(cfg: DecorrConfig) -> DecorrReport:
    """Same pipeline with a shift ``u`` that need not be characteristic; needs ``nu > gamma_pp``."""
    return _decorr(cfg, "off-char", off_characteristic=True)


# --- exponent fit --------------------------------------------------------------------


@dataclass
class ExponentFit:
    t_grid: list
    std: list
    slope: float
    stderr: float
    intercept: float
    residuals: list


def _values_chunk(args):
    model, seed, t_index, k0, k1, sites = args
    out = np.empty((k1 - k0, len(sites)))
    for r, k in enumerate(range(k0, k1)):
        f = model.field.with_seed(rng.sample_seed(seed, k, t_index))
        out[r] = _evaluate(f, model.mode, None, True, sites)
    return out


def sample_values(model: ModelSpec, sites: list, samples: int, seed: int, t_index: int = 0,
                  workers: int = 1) -> np.ndarray:
    """Half-line values at ``sites`` (one environment per row), shape ``(samples, len(sites))``."""
    tasks = [(model, seed, t_index, a, b, list(sites)) for a, b in _chunks(samples)]
    return np.concatenate(_pmap(_values_chunk, tasks, workers))


def fit_loglog(t_grid: Sequence[float], std: Sequence[float]) -> ExponentFit:
    t = np.asarray(t_grid, dtype=np.float64)
    s = np.asarray(std, dtype=np.float64)
    if len(t) < 4:
        raise ConfigError("an exponent fit needs at least 4 time points")
    if t.max() / t.min() < 10.0:
        raise ConfigError("the t grid must span at least one decade")
    if (s <= 0).any() or not np.isfinite(s).all():
        raise FitError("degenerate variance: some standard deviation is zero")
    x, y = np.log(t), np.log(s)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = len(x) - 2
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(A.T @ A)
    return ExponentFit(t.tolist(), s.tolist(), float(coef[0]), float(math.sqrt(cov[0, 0])), float(coef[1]),
                       resid.tolist())


def run_exponent_fit(model: ModelSpec, p, t_grid: Sequence[float], samples: int, seed: int = 0,
                     workers: int = 1) -> ExponentFit:
    """Slope of ``log std L(tp)`` against ``log t``."""
    if len(t_grid) < 4:
        raise ConfigError("an exponent fit needs at least 4 time points")
    if max(t_grid) / min(t_grid) < 10.0:
        raise ConfigError("the t grid must span at least one decade")
    stds = []
    for ti, t in enumerate(t_grid):
        site = lattice_site(model.field, (t * p[0], t * p[1]))
        vals = sample_values(model, [site], samples, seed, ti, workers)[:, 0]
        stds.append(float(vals.std(ddof=1)))
    return fit_loglog(t_grid, stds)


# --- one-point law ---------------------------------------------------------------------


@dataclass
class DistributionResult:
    t: float
    site: tuple
    ks: float
    quantiles: list  # (level, sample quantile, reference quantile)
    sample: np.ndarray
    flags: list


def reference_quantile(ref: ReferenceDistribution, level: float, lo: float = -12.0, hi: float = 12.0) -> float:
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if ref.cdf(mid) < level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


LEVELS = (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95)


def run_distribution_test(model: ModelSpec, info: CharacteristicInfo, t: float, samples: int,
                          ref: ReferenceDistribution, seed: int = 0, standardize: str = "theory",
                          workers: int = 1) -> DistributionResult:
    """KS distance between normalized ``L(tp)`` samples and ``ref``.

    ``standardize="theory"`` centres on the limit shape at the achieved
    lattice point and divides by ``c_hl t^gamma_hl``; ``"empirical"``
    uses the sample mean and standard deviation (for cases whose constants
    are not available in closed form).
    """
    site = lattice_site(model.field, (t * info.p[0], t * info.p[1]))
    raw = sample_values(model, [site], samples, seed, 0, workers)[:, 0]
    flags = []
    if standardize == "empirical" or info.c_hl is None:
        chi = (raw - raw.mean()) / raw.std(ddof=1)
        flags.append("empirical standardization")
    elif standardize == "theory":
        shape = default_shape(model)
        if shape is None:
            raise ConfigError("no closed-form shape for this model; use empirical standardization")
        off = site_offset(model.field)
        centre = shape(site[0] + off, site[1] + off)
        chi = (raw - centre) / (info.c_hl * t ** info.gamma_hl)
    else:
        raise ConfigError(f"unknown standardization {standardize!r}")
    ks = ks_statistic(chi, ref)
    qs = []
    if not isinstance(ref, Empirical):
        for lv in LEVELS:
            qs.append((lv, float(np.quantile(chi, lv)), reference_quantile(ref, lv)))
    return DistributionResult(float(t), site, ks, qs, chi, flags)


# --- projection ------------------------------------------------------------------------


@dataclass
class ProjectionReport:
    nu: float
    tau: float
    rows: list  # {"t", "theta", "off_site", "proj_site", "tau_tilde", "corr"}
    control: list  # {"t", "site", "corr"}: lateral offset of order t
    target: str = "level"


def run_projection_experiment(model: ModelSpec, t_grid: Sequence[float], nu: float, thetas: Sequence[float],
                              samples: int, tau: float = 0.5, seed: int = 0, control_shift: float = 0.0,
                              workers: int = 1, target: str = "level") -> ProjectionReport:
    """Correlation of fluctuations at ``offline_point(t, nu, tau, theta)`` and at its projection
    along the ray through the origin.

    ``target="level"`` projects onto the ``theta = 0`` curve of the same
    frame (time ``t``), ``target="slice"`` onto the line ``y = t/4``.
    ``control_shift > 0`` adds the point ``control_shift * t`` to the left of
    the first projection on the same row, a space-like separation.
    """
    if not 0.0 <= nu < 1.0:
        raise ConfigError("nu must lie in [0, 1)")
    if target not in ("level", "slice"):
        raise ConfigError(f"unknown projection target {target!r}")
    f0 = model.field
    rows, control = [], []
    for ti, t in enumerate(t_grid):
        sites, meta = [], []
        for th in thetas:
            off = offline_point(t, nu, tau, th)
            if target == "level":
                proj, tau_tilde = project_to_level_curve(off, t)
            else:
                proj, tau_tilde = project_to_reference_line(off, 0.25 * t, t=t)
            a, b = lattice_site(f0, off), lattice_site(f0, proj)
            meta.append((th, a, b, tau_tilde))
            sites.extend([a, b])
        ctrl = None
        if control_shift > 0:
            base = meta[0][2]
            ctrl = (max(base[0] - int(round(control_shift * t)), 0), base[1])
            sites.append(ctrl)
        vals = sample_values(model, sites, samples, seed, ti, workers)
        for m, (th, a, b, tt) in enumerate(meta):
            rows.append({"t": float(t), "theta": float(th), "off_site": a, "proj_site": b, "tau_tilde": tt,
                         "corr": _corr(vals[:, 2 * m], vals[:, 2 * m + 1])})
        if ctrl is not None:
            control.append({"t": float(t), "site": ctrl, "corr": _corr(vals[:, 1], vals[:, -1])})
    return ProjectionReport(float(nu), float(tau), rows, control, target)


# --- PASEP ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class PasepDecorrConfig:
    p: float
    initial: object
    v: float
    u: float
    nu: float
    t_grid: tuple
    m_grid: tuple = (1.0,)
    samples: int = 1000
    seed: int = 0
    workers: int = 1


def _pasep_chunk(args):
    cfg, ti, t, k0, k1 = args
    s = t ** cfg.nu
    reach = int(abs(cfg.v * t) + abs(cfg.u * s)) + 2
    out = np.empty((k1 - k0, 4))
    for r, k in enumerate(range(k0, k1)):
        pc = ps.PasepConfig(cfg.p, cfg.initial, t + s, rng.sample_seed(cfg.seed, k, ti), (-reach, reach))
        res = ps.coupled_step_reset(pc, cfg.v, cfg.u, cfg.nu, t)
        out[r] = (res.i_before, res.i_main, res.i_step, res.x_t)
    return out


def run_pasep_decorrelation(cfg: PasepDecorrConfig) -> DecorrReport:
    """Report for the current across ``(vt, t) -> (vt + u t^nu, t + t^nu)``.

    ``Delta_t = I_main - I(vt, t) - t^nu j(u)`` with ``j`` the step-current
    shape of drift ``p - q``; the compensator is the exact ``X_t <= 0``.
    """
    if not isinstance(cfg.initial, (ps.Step, ps.StepBernoulli, ps.Occupied)):
        raise ConfigError("PASEP decorrelation is defined for step-type initial data")
    if not 0.0 < cfg.nu < 1.0:
        raise ConfigError("nu must lie in (0, 1)")
    drift = 2.0 * cfg.p - 1.0
    gamma = 1.0 / 3.0
    targets, table, comp, corrs = [], [], [], []
    cols = {k: [] for k in ("t", "k", "I_before", "I_main", "I_step", "X", "delta")}
    violations = 0
    for ti, t in enumerate(cfg.t_grid):
        s = t ** cfg.nu
        tasks = [(cfg, ti, float(t), a, b) for a, b in _chunks(cfg.samples)]
        vals = np.concatenate(_pmap(_pasep_chunk, tasks, cfg.workers))
        ib, im, ist, X = vals.T
        ell = s * ps.step_current_shape(cfg.u, drift)
        delta = im - ib - ell
        violations += int(np.count_nonzero(X > 0))
        n = len(ib)
        for name, arr in (("t", np.full(n, float(t))), ("k", np.arange(n, dtype=np.float64)), ("I_before", ib),
                          ("I_main", im), ("I_step", ist), ("X", X), ("delta", delta)):
            cols[name].append(arr)
        targets.append({"t": float(t), "s": s, "x0": int(round(cfg.v * t)), "x1": int(round(cfg.v * t + cfg.u * s)),
                        "ell": ell})
        table.extend(_tail_rows(delta, t, gamma, cfg.m_grid))
        comp.append({"t": float(t), "min": float(X.min()), "mean": float(X.mean()), "max": float(X.max()),
                     "mean_scaled": float(X.mean()) / t ** gamma})
        corrs.append({"t": float(t), "corr": _corr(ib, im)})
    samples = {k: np.concatenate(v) for k, v in cols.items()}
    return DecorrReport("pasep", describe(cfg), targets, table, comp, violations, corrs, samples,
                        ["current convention I = (h - x)/2"])


# --- polymer -------------------------------------------------------------------------------


def run_polymer_decorrelation(beta: float, bulk, p, u, nu: float, t_grid: Sequence[float], samples: int,
                              seed: int = 0, m_grid=(1.0,), workers: int = 1) -> DecorrReport:
    """Decorrelation of the point-to-point polymer free energy at inverse temperature ``beta``.

    No closed-form free energy is used: shapes are sample means (flagged).
    """
    if not beta > 0:
        raise ConfigError("beta must be positive")
    cfg = DecorrConfig(polymer(beta, bulk), None, nu, tuple(t_grid), tuple(m_grid), samples, seed,
                       u=tuple(u), p=tuple(p), workers=workers)
    rep = _decorr(cfg, "polymer", off_characteristic=False)
    return rep


# --- output --------------------------------------------------------------------------------


def _plain(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        d = {"type": type(obj).__name__}
        d.update({k: _plain(v) for k, v in asdict(obj).items()})
        return d
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def describe(cfg) -> dict:
    d = _plain(cfg)
    if isinstance(d, dict):
        d.pop("workers", None)  # results do not depend on it
    return d


def config_hash(config: dict) -> str:
    blob = json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    if isinstance(v, (tuple, list)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


def rows_to_csv(rows: list, header: dict) -> str:
    buf = io.StringIO()
    for k in sorted(header):
        buf.write(f"# {k}={header[k]}\n")
    if rows:
        cols = list(rows[0].keys())
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def columns_to_csv(cols: dict, header: dict) -> str:
    names = list(cols.keys())
    n = len(cols[names[0]]) if names else 0
    rows = [{c: float(cols[c][i]) for c in names} for i in range(n)]
    return rows_to_csv(rows, header)


def write_outputs(out_dir: str, experiment: str, header: dict, tables: dict, summary: dict) -> list:
    """Write ``{experiment}.csv`` (first table), ``{experiment}_{name}.csv`` for the rest and
    ``{experiment}.json``. Every file carries ``header`` (config hash and seed)."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for idx, (name, content) in enumerate(tables.items()):
        fname = f"{experiment}.csv" if idx == 0 else f"{experiment}_{name}.csv"
        path = os.path.join(out_dir, fname)
        with open(path, "w", newline="") as fh:
            fh.write(content)
        paths.append(path)
    path = os.path.join(out_dir, f"{experiment}.json")
    body = dict(header)
    body.update(_plain(summary))
    with open(path, "w") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(path)
    return paths


def report_tables(rep: DecorrReport, header: dict) -> dict:
    return {"samples": columns_to_csv(rep.samples, header), "tail": rows_to_csv(rep.table, header),
            "compensator": rows_to_csv(rep.compensator, header)}


def report_summary(rep: DecorrReport) -> dict:
    targets = [{k: v for k, v in tg.items()} for tg in rep.targets]
    return {"experiment": rep.experiment, "config": rep.config, "targets": targets, "table": rep.table,
            "compensator": rep.compensator, "violations": rep.violations, "correlation": rep.correlation,
            "flags": rep.flags,
            "calibration": "M grid, t grid and pass thresholds are calibration choices"}


# convenient preset used by the CLI and the acceptance suite
def corner_info() -> CharacteristicInfo:
    """Corner growth along the diagonal in passage-time units (``ell_hl = 1``)."""
    return bulk_info((1.0, 1.0)).normalized()
