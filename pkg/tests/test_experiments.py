import math

import numpy as np
import pytest

from kpzlab import experiments as E
from kpzlab import models as M
from kpzlab import pasep as ps
from kpzlab import theory
from kpzlab.environment import Constant, Exponential, WeightField
from kpzlab.errors import ConfigError, FitError
from kpzlab.models import ModelId, ModelSpec


def small_cfg(**kw):
    base = dict(model=M.corner_growth(), info=E.corner_info(), nu=0.5, t_grid=(30.0, 60.0), m_grid=(0.5, 1.0),
                samples=120, seed=3)
    base.update(kw)
    return E.DecorrConfig(**base)


def test_decorrelation_is_deterministic():
    a = E.run_decorrelation(small_cfg())
    b = E.run_decorrelation(small_cfg())
    for k in a.samples:
        assert np.array_equal(a.samples[k], b.samples[k])
    assert a.table == b.table


def test_decorrelation_does_not_depend_on_workers():
    a = E.run_decorrelation(small_cfg(samples=600))
    b = E.run_decorrelation(small_cfg(samples=600, workers=2))
    assert np.array_equal(a.samples["delta"], b.samples["delta"])


def test_compensator_nonnegative_and_report_shape():
    rep = E.run_decorrelation(small_cfg())
    assert rep.violations == 0
    assert (rep.samples["X"] >= -1e-9).all()
    assert len(rep.table) == 4
    assert [r["t"] for r in rep.compensator] == [30.0, 60.0]
    for tg in rep.targets:
        assert tg["q_site"][0] >= tg["p_site"][0] and tg["q_site"][1] >= tg["p_site"][1]


def test_zero_weights_give_minus_shape():
    model = ModelSpec(ModelId.CORNER_GROWTH, WeightField(0, bulk=Constant(0.0)))
    cfg = small_cfg(model=model, samples=10)
    rep = E.run_decorrelation(cfg)
    for tg in rep.targets:
        d = tg["d"]
        delta = rep.samples["delta"][rep.samples["t"] == tg["t"]]
        assert np.allclose(delta, -theory.lpp_shape(d))
    assert all(r["prob"] == 1.0 for r in rep.table if r["M"] == 0.5)


def test_nu_too_large_rejected():
    with pytest.raises(ConfigError):
        E.run_decorrelation(small_cfg(nu=1.0))
    with pytest.raises(ConfigError):
        E.run_decorrelation(small_cfg(nu=0.0))


def test_no_decorrelation_case_needs_override():
    info = theory.classify_two_sided(1 / 3, 1 / 3, 1.0).normalized()
    cfg = small_cfg(model=M.two_sided(1 / 3, 1 / 3), info=info, nu=0.7)
    with pytest.raises(ConfigError):
        E.run_off_characteristic_control(cfg)
    cfg = small_cfg(model=M.two_sided(1 / 3, 1 / 3), info=info, nu=0.7, allow_no_decorrelation=True, samples=20)
    rep = E.run_off_characteristic_control(cfg)
    assert rep.violations == 0


def test_off_characteristic_needs_large_nu():
    with pytest.raises(ConfigError):
        E.run_off_characteristic_control(small_cfg(nu=0.3, u=(0.25, 1.0)))


def test_fit_loglog_recovers_power():
    t = [10.0, 30.0, 100.0, 300.0, 1000.0]
    fit = E.fit_loglog(t, [2.0 * x ** 0.4 for x in t])
    assert fit.slope == pytest.approx(0.4, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(2.0), abs=1e-12)


def test_fit_guards():
    with pytest.raises(ConfigError):
        E.fit_loglog([1, 2, 3], [1, 1, 1])
    with pytest.raises(ConfigError):
        E.fit_loglog([10, 20, 40, 80], [1, 2, 3, 4])
    model = ModelSpec(ModelId.CORNER_GROWTH, WeightField(0, bulk=Constant(1.0)))
    with pytest.raises(FitError):
        E.run_exponent_fit(model, (1.0, 1.0), [5, 10, 25, 50], samples=5)


def test_projection_lands_on_slice():
    rep = E.run_projection_experiment(M.corner_growth(), [200.0], 0.6, [-1.0, 1.0], samples=200, seed=1,
                                      control_shift=0.2, target="slice")
    for row in rep.rows:
        assert row["proj_site"][1] == 49  # y = t/4 in 0-based sites
        assert 0.5 < row["corr"] <= 1.0
    assert rep.control[0]["corr"] < rep.rows[0]["corr"]


def test_projection_onto_level_curve():
    t = 200.0
    rep = E.run_projection_experiment(M.corner_growth(), [t], 0.6, [-1.0, 0.0, 1.0], samples=200, seed=1)
    on = rep.rows[1]
    assert on["off_site"] == on["proj_site"] and on["corr"] == pytest.approx(1.0)
    for row in (rep.rows[0], rep.rows[2]):
        a, b = row["off_site"], row["proj_site"]
        # the projection moves by about theta t^nu / 2 along the ray
        assert abs((b[0] + b[1]) - (a[0] + a[1]) - 0.5 * t ** 0.6 * -row["theta"]) <= 3
    with pytest.raises(ConfigError):
        E.run_projection_experiment(M.corner_growth(), [t], 0.6, [1.0], samples=10, target="plane")


def test_polymer_report():
    rep = E.run_polymer_decorrelation(1.0, Exponential(), (1.0, 1.0), (1.0, 1.0), 0.5, (20.0,), 40, seed=2)
    assert rep.violations == 0
    assert any("empirical" in f for f in rep.flags)
    with pytest.raises(ConfigError):
        E.run_polymer_decorrelation(0.0, Exponential(), (1, 1), (1, 1), 0.5, (20.0,), 10)


def test_polymer_sandwiched_by_lpp():
    # max <= free energy <= max + log(#paths)/beta at every site
    beta = 2.0
    sites = [(5, 5), (8, 3)]
    lse = E.sample_values(M.polymer(beta, Exponential()), sites, 20, seed=4)
    lpp = E.sample_values(M.corner_growth(), sites, 20, seed=4)
    counts = np.array([math.comb(i + j, i) for i, j in sites])
    assert (lse >= lpp - 1e-12).all()
    assert (lse <= lpp + np.log(counts) / beta + 1e-12).all()


def test_pasep_report():
    cfg = E.PasepDecorrConfig(p=0.75, initial=ps.Step(), v=0.0, u=0.25, nu=0.5, t_grid=(10.0, 20.0),
                              samples=30, seed=5)
    rep = E.run_pasep_decorrelation(cfg)
    assert rep.violations == 0
    assert (rep.samples["X"] <= 0).all()
    with pytest.raises(ConfigError):
        E.run_pasep_decorrelation(E.PasepDecorrConfig(0.75, ps.TwoSidedBernoulli(0.5, 0.5), 0.0, 0.25, 0.5,
                                                      (10.0,)))


def test_outputs_are_stable(tmp_path):
    rep = E.run_decorrelation(small_cfg(samples=20))
    header = {"experiment": "decorr", "hash": E.config_hash(E.describe(small_cfg(samples=20)))}
    paths = E.write_outputs(str(tmp_path), "decorr", header, E.report_tables(rep, header), E.report_summary(rep))
    assert paths
    for p in paths:
        if p.endswith(".csv"):
            text = open(p).read()
            assert text.startswith("# ")
    assert E.config_hash(E.describe(small_cfg(workers=4))) == E.config_hash(E.describe(small_cfg()))
