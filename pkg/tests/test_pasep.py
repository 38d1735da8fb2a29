import numpy as np
import pytest

from kpzlab import pasep as P
from kpzlab import rng
from kpzlab.errors import ConfigError, DomainError


def test_single_particle_is_poisson():
    t = 30.0
    pos = []
    for k in range(4000):
        st = P.simulate(P.PasepConfig(1.0, P.Occupied((0,)), t, rng.sample_seed(1, k)), [t])[0]
        pos.append(int(np.flatnonzero(st.eta)[0]) - st.L)
    pos = np.array(pos)
    assert abs(pos.mean() - t) < 4 * np.sqrt(t / len(pos))
    assert abs(pos.var() - t) < 0.1 * t


def test_full_lattice_never_moves():
    cfg = P.PasepConfig(0.8, P.Occupied(all_sites=True), 20.0, 3)
    sys = P.start(cfg)
    h0 = sys.state.h.copy()
    st = sys.advance(20.0)
    assert st.eta.all() and np.array_equal(st.h, h0) and not st.flux.any()


def test_current_height_identity_along_trajectory():
    cfg = P.PasepConfig(0.7, P.TwoSidedBernoulli(0.4, 0.6), 40.0, 5)
    sys = P.start(cfg)
    h0 = sys.state.h.copy()
    for t in np.linspace(1, 40, 12):
        st = sys.advance(t)
        assert np.array_equal(st.h, h0 + 2 * st.flux)
        # slopes stay consistent with occupations
        assert np.array_equal(np.diff(st.h), 1 - 2 * st.eta[1:].astype(np.int64))
        x = 3
        h, i = P.height_and_current(st, x)
        assert i == 0.5 * (h - x)
    assert st.eta.sum() == P.initial_occupation(cfg.initial, cfg.L, cfg.seed).sum()


def test_height_at_origin_is_twice_the_current():
    st = P.simulate(P.PasepConfig(1.0, P.Step(), 25.0, 2), [25.0])[0]
    assert st.height(0) == 2 * st.current(0) == 2 * st.flux[st.L]


def test_tasep_heights_monotone():
    cfg = P.PasepConfig(1.0, P.Step(), 30.0, 9)
    sts = P.simulate(cfg, [5, 10, 20, 30])
    for a, b in zip(sts, sts[1:]):
        assert (b.h >= a.h).all()


def test_step_reset_trivial_cases():
    # no arrow before the reset time: both copies coincide
    res = P.coupled_step_reset(P.PasepConfig(1.0, P.Step(), 1e-3, 1), 0.0, 0.0, 1.0, 1e-4)
    assert res.x_t == 0.0
    empty = P.coupled_step_reset(P.PasepConfig(0.75, P.Occupied(()), 30.0, 1), 0.0, 0.0, 0.5, 20.0)
    assert empty.i_main == 0 and empty.i_before == 0


def test_step_reset_decomposition():
    cfg = P.PasepConfig(0.75, P.Step(), 120.0, 4, (-30, 30))
    r = P.coupled_step_reset(cfg, 0.1, 0.5, 0.5, 100.0)
    assert r.i_main == r.i_before + r.i_step + r.x_t
    assert r.x_t <= 0
    assert r.x0 == 10 and r.x1 == 15


def test_step_reset_nonpositive_property():
    for k in range(300):
        cfg = P.PasepConfig(0.75, P.StepBernoulli(0.5), 60.0, rng.sample_seed(8, k), (-20, 20))
        assert P.coupled_step_reset(cfg, 0.0, 0.3, 0.5, 50.0).x_t <= 0


@pytest.mark.slow
def test_step_reset_at_t400():
    bad = 0
    for k in range(10_000):
        cfg = P.PasepConfig(0.75, P.Step(), 420.0, rng.sample_seed(6, k), half_width=421)
        bad += P.coupled_step_reset(cfg, 0.0, 0.0, 0.5, 400.0).x_t > 0
    assert bad == 0


def test_attractiveness():
    for k in range(100):
        cfg = P.PasepConfig(0.7, P.Step(), 30.0, rng.sample_seed(9, k))
        assert P.attractiveness_gap(cfg, P.TwoSidedBernoulli(0.6, 0.2), P.Step(), [5, 15, 30]) >= 0
        assert P.attractiveness_gap(cfg, P.StepBernoulli(0.3), P.StepBernoulli(0.3), [30]) == 0
    with pytest.raises(ConfigError):
        P.attractiveness_gap(P.PasepConfig(0.7, P.Step(), 5.0, 1), P.Step(), P.TwoSidedBernoulli(0.5, 0.5), [1])


def test_drift_rescaled_current():
    # the current of step PASEP follows the TASEP law of large numbers on the time scale (p - q) t
    t = 300.0
    for p in (1.0, 0.75):
        cur = [P.simulate(P.PasepConfig(p, P.Step(), t, rng.sample_seed(10, k)), [t])[0].current(0)
               for k in range(60)]
        assert np.mean(cur) / ((2 * p - 1) * t) == pytest.approx(0.25, abs=0.03)


def test_config_errors():
    with pytest.raises(ConfigError):
        P.PasepConfig(0.5, P.Step(), 10.0)
    with pytest.raises(ConfigError):
        P.PasepConfig(0.8, P.Step(), 10.0, monitor=(-5, 5), half_width=14)
    with pytest.raises(ConfigError):
        P.PasepConfig(0.8, P.StepBernoulli(1.5), 10.0)
    with pytest.raises(ConfigError):
        P.simulate(P.PasepConfig(0.8, P.Step(), 10.0), [11.0])
    with pytest.raises(ConfigError):
        P.coupled_step_reset(P.PasepConfig(0.8, P.Step(), 10.0, half_width=12), 0.5, 1.0, 0.5, 9.0)
    st = P.simulate(P.PasepConfig(0.8, P.Step(), 2.0), [1.0])[0]
    with pytest.raises(DomainError):
        st.height(st.L + 1)


def test_reproducible():
    cfg = P.PasepConfig(0.75, P.TwoSidedBernoulli(0.5, 0.5), 15.0, 21)
    a = P.simulate(cfg, [15.0])[0]
    b = P.simulate(cfg, [15.0])[0]
    assert np.array_equal(a.h, b.h)
