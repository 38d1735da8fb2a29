"""The twelve acceptance criteria as plain functions.

Shared by ``kpzlab verify`` and ``tests/test_acceptance.py``. Each returns a
:class:`CriterionResult`; thresholds are the stated ones and are never
relaxed. The ``fast`` suite runs the exact oracle and numerics criteria in
full and the property criteria at reduced sample counts.
"""

from __future__ import annotations

import math
import os
import tempfile
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import experiments as E
from . import models as M
from . import pasep as ps
from . import refdist as rd
from . import rng, theory
from .environment import WeightField
from .oracles import enumerate_passage
from .passage import LogSumExp, MaxPlus, MinPlus, PassageQuery, passage_array, png_passage, \
    superadditivity_check


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, name: str, fn: Callable, *args, **kw) -> CriterionResult:
    t0 = time.perf_counter()
    passed, detail = fn(*args, **kw)
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)


# --- 1 -------------------------------------------------------------------------------------


def _oracle(grids: int = 500, seed: int = 11):
    gen = np.random.default_rng(seed)
    worst = 0.0
    for g in range(grids):
        nx, ny = gen.integers(1, 7, size=2)
        w = gen.exponential(1.0, size=(nx, ny))
        if g % 5 == 0:
            w = np.floor(w * 3)  # ties and zeros
        f = WeightField.from_array(w)
        targets = [(i, j) for i in range(nx) for j in range(ny)]
        beta = float(gen.choice([0.01, 0.5, 1.0, 5.0, 50.0]))
        px, py = int(gen.integers(0, nx)), int(gen.integers(0, ny))
        for mode in (MaxPlus, MinPlus, LogSumExp(beta)):
            got = passage_array(PassageQuery(f, targets, mode))
            for (i, j), v in zip(targets, got):
                ref = enumerate_passage(w, (i, j), mode.kind, beta)
                worst = max(worst, abs(v - ref) / max(1.0, abs(ref)))
            sub = [(i, j) for i, j in targets if i >= px and j >= py]
            for inc in (True, False):
                got = passage_array(PassageQuery(f, sub, mode, (px, py), inc))
                for (i, j), v in zip(sub, got):
                    if not inc and (i, j) == (px, py):
                        continue
                    ref = enumerate_passage(w, (i, j), mode.kind, beta, (px, py), inc)
                    worst = max(worst, abs(v - ref) / max(1.0, abs(ref)))
    return worst <= 1e-9, f"{grids} grids, worst relative error {worst:.2e} (tol 1e-9)"


def criterion_1(grids: int = 500) -> CriterionResult:
    return _timed(1, "oracle equivalence", _oracle, grids)


# --- 2 -------------------------------------------------------------------------------------


def _superadditivity(samples: int = 10_000, pasep_t: float = 100.0):
    counts = {}
    for mode in (MaxPlus, MinPlus, LogSumExp(1.0)):
        bad = 0
        for k in range(samples):
            key = rng.sample_seed(2, k)
            f = WeightField(key)
            a, b = rng.hash2(key, 1, 0), rng.hash2(key, 2, 0)
            p = (a % 12, (a >> 8) % 12)
            q = (p[0] + b % 10, p[1] + (b >> 8) % 10)
            x = superadditivity_check(f, p, q, mode)
            tol = 1e-9 * (1.0 + abs(x))
            if mode.compensator_sign * x < -tol:
                bad += 1
        counts[mode.kind] = bad
    bad = 0
    for k in range(samples):
        cfg = ps.PasepConfig(0.75, ps.Step(), pasep_t + pasep_t ** 0.5, rng.sample_seed(3, k), (-20, 20))
        if ps.coupled_step_reset(cfg, 0.0, 0.0, 0.5, pasep_t).x_t > 0:
            bad += 1
    counts["pasep"] = bad
    ok = all(v == 0 for v in counts.values())
    return ok, f"{samples} samples per engine, violations {counts}"


def criterion_2(samples: int = 10_000) -> CriterionResult:
    return _timed(2, "exact superadditivity", _superadditivity, samples)


# --- 3 -------------------------------------------------------------------------------------


def _limit_shape(samples: int = 200, t: float = 2000.0):
    h = [M.height_at_origin(WeightField(rng.sample_seed(5, k)), t) for k in range(samples)]
    ratio = float(np.mean(h)) / t
    return abs(ratio - 0.5) <= 0.02, f"mean h(0,t)/t = {ratio:.4f} at t={t:g}, N={samples} (tol 0.02)"


def criterion_3(samples: int = 200) -> CriterionResult:
    return _timed(3, "limit shape", _limit_shape, samples)


# --- 4 -------------------------------------------------------------------------------------


def _one_point(samples: int = 10_000, workers: int = 1):
    res = E.run_distribution_test(M.corner_growth(), E.corner_info(), 1000.0, samples, rd.GUE(), seed=7,
                                  workers=workers)
    return res.ks <= 0.05, f"KS vs GUE = {res.ks:.4f} at n=250, N={samples} (tol 0.05)"


def criterion_4(samples: int = 10_000, workers: int = 1) -> CriterionResult:
    return _timed(4, "one-point law", _one_point, samples, workers)


# --- 5 -------------------------------------------------------------------------------------

T_GRID_5 = (250.0, 500.0, 1000.0, 2000.0, 4000.0)


def case2_info() -> theory.CharacteristicInfo:
    return theory.classify_two_sided(2.0 / 3.0, 2.0 / 3.0, 3.0).normalized()


def _exponents(samples: int = 2000, workers: int = 1):
    f1 = E.run_exponent_fit(M.corner_growth(), E.corner_info().p, T_GRID_5, samples, seed=8, workers=workers)
    f2 = E.run_exponent_fit(M.two_sided(2.0 / 3.0, 2.0 / 3.0), case2_info().p, T_GRID_5, samples, seed=9,
                            workers=workers)
    ok = 0.28 <= f1.slope <= 0.38 and 0.45 <= f2.slope <= 0.55
    return ok, (f"Case1 slope {f1.slope:.3f}+-{f1.stderr:.3f} in [0.28, 0.38]; "
                f"Case2 slope {f2.slope:.3f}+-{f2.stderr:.3f} in [0.45, 0.55]; N={samples}")


def criterion_5(samples: int = 2000, workers: int = 1) -> CriterionResult:
    return _timed(5, "exponent regimes", _exponents, samples, workers)


# --- 6 -------------------------------------------------------------------------------------

T_GRID = (500.0, 2000.0, 8000.0)


def _strictly_decreasing(probs) -> bool:
    return all(a[1] - b[1] > 2.0 * math.hypot(a[2], b[2]) for a, b in zip(probs, probs[1:]))


def _slow_decorrelation(samples: int = 10_000, workers: int = 1, t_grid=T_GRID):
    cfg = E.DecorrConfig(M.corner_growth(), E.corner_info(), 0.5, tuple(t_grid), (1.0,), samples, seed=6,
                         workers=workers)
    rep = E.run_decorrelation(cfg)
    probs = rep.probs(1.0)
    corr = rep.correlation[-1]["corr"]
    ok = _strictly_decreasing(probs) and probs[-1][1] <= 0.1 and corr >= 0.9 and rep.violations == 0
    txt = ", ".join(f"t={t:g}: {p:.4f}+-{se:.4f}" for t, p, se in probs)
    return ok, f"tail probs {txt}; corr(chi1,chi2) at t={probs[-1][0]:g} = {corr:.4f}; violations {rep.violations}"


def criterion_6(samples: int = 10_000, workers: int = 1) -> CriterionResult:
    return _timed(6, "slow decorrelation", _slow_decorrelation, samples, workers)


# --- 7 -------------------------------------------------------------------------------------


def case6_info() -> theory.CharacteristicInfo:
    return theory.classify_two_sided(1.0 / 3.0, 1.0 / 3.0, 1.0).normalized()


def case6_shift() -> tuple:
    """Shift along the ``kappa_pi`` direction ``(1, kappa_pi^2)``, in passage-time units."""
    info = case6_info()
    k_pi = info.kappa["pi"]
    scale = info.p[0]  # the normalisation factor applied to p = (1, kappa^2)
    return (scale, scale * k_pi ** 2)


def _direction(samples: int = 2000, workers: int = 1, t_grid=T_GRID):
    off = E.run_off_characteristic_control(E.DecorrConfig(
        M.corner_growth(), E.corner_info(), 0.7, tuple(t_grid), (1.0,), samples, seed=12,
        u=(0.25, 1.0), workers=workers))
    probs = off.probs(1.0)
    nondecr = all(b[1] >= a[1] - 2.0 * math.hypot(a[2], b[2]) for a, b in zip(probs, probs[1:]))
    rising = probs[-1][1] - probs[0][1] > 2.0 * math.hypot(probs[0][2], probs[-1][2])
    ok_off = nondecr and rising and probs[-1][1] >= 0.9
    shock = E.run_off_characteristic_control(E.DecorrConfig(
        M.two_sided(1.0 / 3.0, 1.0 / 3.0), case6_info(), 0.7, tuple(t_grid), (1.0,), samples, seed=13,
        u=case6_shift(), allow_no_decorrelation=True, workers=workers))
    sp = shock.probs(1.0)
    ok_shock = all(p >= 0.2 for _, p, _ in sp)
    a = ", ".join(f"{p:.3f}" for _, p, _ in probs)
    b = ", ".join(f"{p:.3f}" for _, p, _ in sp)
    return ok_off and ok_shock, f"off-characteristic tail probs [{a}] rising to >= 0.9; shock tail probs [{b}] >= 0.2"


def criterion_7(samples: int = 2000, workers: int = 1) -> CriterionResult:
    return _timed(7, "direction specificity", _direction, samples, workers)


# --- 8 -------------------------------------------------------------------------------------


def _projection(samples: int = 10_000, workers: int = 1, t: float = 8000.0):
    rep = E.run_projection_experiment(M.corner_growth(), [t], 0.6, [-1.0, 1.0], samples, tau=0.5, seed=14,
                                      workers=workers)
    corrs = [r["corr"] for r in rep.rows]
    txt = ", ".join(f"theta={r['theta']:+g}: {r['corr']:.4f}" for r in rep.rows)
    return min(corrs) >= 0.9, f"t={t:g}, nu=0.6, N={samples}, onto the theta=0 curve: {txt} (tol 0.9)"


def criterion_8(samples: int = 10_000, workers: int = 1) -> CriterionResult:
    return _timed(8, "projection property", _projection, samples, workers)


# --- 9 -------------------------------------------------------------------------------------


def _pasep_cross(samples: int = 10_000, t: float = 50.0, law: bool = True):
    ks = 0.0
    if law:
        ks = _pasep_lpp_ks(samples, t)
    worst = None
    for k in range(samples):
        for p in (1.0, 0.75):
            cfg = ps.PasepConfig(p, ps.Step(), t, rng.sample_seed(17, k))
            gap = ps.attractiveness_gap(cfg, ps.TwoSidedBernoulli(0.5, 0.3), ps.Step(), [t / 4, t / 2, t])
            worst = gap if worst is None else min(worst, gap)
    ok = ks <= 0.03 and worst >= 0
    law_txt = f"two-sample KS of h(0,{t:g}) = {ks:.4f} (tol 0.03); " if law else ""
    return ok, f"{law_txt}min attractiveness gap {worst} (>= 0) over {samples} samples x 2 rates"


def _pasep_lpp_ks(samples: int, t: float) -> float:
    h_pasep = np.array([ps.simulate(ps.PasepConfig(1.0, ps.Step(), t, rng.sample_seed(15, k)), [t])[0].height(0)
                        for k in range(samples)])
    h_lpp = np.array([M.height_at_origin(WeightField(rng.sample_seed(16, k)), t) for k in range(samples)])
    return rd.ks_statistic(h_pasep, rd.Empirical(h_lpp))


def criterion_9(samples: int = 10_000) -> CriterionResult:
    return _timed(9, "PASEP cross-validation", _pasep_cross, samples)


# --- 10 ------------------------------------------------------------------------------------


def _png(samples: int = 200, n: float = 10_000.0):
    side = math.sqrt(n)
    from .environment import Rect, sample_points
    ratios = []
    for k in range(samples):
        model = M.png_droplet(1.0, rng.sample_seed(18, k))
        count = len(sample_points(model.field, Rect(0.0, 0.0, side, side)))
        ratios.append(png_passage(model.field, (side, side)) / math.sqrt(count))
    m = float(np.mean(ratios))
    return 1.90 <= m <= 2.05, f"mean LIS/sqrt(N) = {m:.4f} over {samples} squares of ~{n:g} points"


def criterion_10(samples: int = 200) -> CriterionResult:
    return _timed(10, "PNG sanity", _png, samples)


# --- 11 ------------------------------------------------------------------------------------


def _numerics():
    d40 = abs(rd.gue_det_raw(0.0, 40) - rd.gue_det_raw(0.0, 80))
    d60 = abs(rd.gue_det_raw(0.0, 60) - rd.gue_det_raw(0.0, 120))
    grid = np.linspace(-8.0, 5.0, 200)
    vals = np.array([rd.tw_gue_cdf(s) for s in grid])
    mono = bool(np.all(np.diff(vals) >= 0))
    xs = np.linspace(-10.0, 10.0, 401)
    h = 1e-4
    second = (rd.airy_prime(xs + h) - rd.airy_prime(xs - h)) / (2 * h)
    resid = float(np.max(np.abs(second - xs * rd.airy_fn(xs))))
    ok = d40 <= 1e-8 and d60 <= 1e-8 and mono and resid <= 1e-6
    return ok, (f"|F(0;40)-F(0;80)| = {d40:.1e}, |F(0;60)-F(0;120)| = {d60:.1e} (tol 1e-8); "
                f"monotone on 200 points: {mono}; Ai ODE residual {resid:.1e} (tol 1e-6)")


def criterion_11() -> CriterionResult:
    return _timed(11, "refdist numerics", _numerics)


# --- 12 ------------------------------------------------------------------------------------


DETERMINISM_CONFIG = {
    "schema_version": 1,
    "model": {"kind": "corner_growth"},
    "nu": 0.5,
    "t_grid": [40, 120],
    "m_grid": [0.5, 1.0],
    "samples": 600,
}


def _determinism(workers=(1, 2)):
    from .cli import run_experiment
    digests = []
    with tempfile.TemporaryDirectory() as tmp:
        for rep, w in enumerate([workers[0], *workers]):
            out = os.path.join(tmp, f"run{rep}")
            paths = run_experiment("decorr", dict(DETERMINISM_CONFIG), seed=21, out=out, workers=w, quiet=True)
            blobs = {}
            for p in sorted(paths):
                if p.endswith(".csv"):
                    with open(p, "rb") as fh:
                        blobs[os.path.basename(p)] = fh.read()
            digests.append(blobs)
    same = all(d == digests[0] for d in digests[1:]) and len(digests[0]) > 0
    return same, f"{len(digests)} runs (workers {[workers[0], *workers]}), {len(digests[0])} CSV files, identical: {same}"


def criterion_12() -> CriterionResult:
    return _timed(12, "determinism", _determinism)


# --- suites --------------------------------------------------------------------------------


def full_suite(workers: int = 1) -> list:
    return [
        lambda: criterion_1(),
        lambda: criterion_2(),
        lambda: criterion_3(),
        lambda: criterion_4(workers=workers),
        lambda: criterion_5(workers=workers),
        lambda: criterion_6(workers=workers),
        lambda: criterion_7(workers=workers),
        lambda: criterion_8(workers=workers),
        lambda: criterion_9(),
        lambda: criterion_10(),
        lambda: criterion_11(),
        lambda: criterion_12(),
    ]


def fast_suite(workers: int = 1) -> list:
    """Oracles and numerics in full; exact-property checks at reduced counts."""
    return [
        lambda: criterion_1(),
        lambda: _timed(2, "exact superadditivity (reduced)", _superadditivity, 500),
        lambda: _timed(9, "attractiveness (reduced)", _pasep_cross, 500, law=False),
        lambda: criterion_11(),
        lambda: criterion_12(),
    ]


SUITES = {"fast": fast_suite, "full": full_suite}
