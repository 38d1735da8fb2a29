import math

import numpy as np
import pytest
from scipy import special

from kpzlab import refdist as R
from kpzlab.errors import AccuracyError, ConfigError, DomainError


def test_airy_against_scipy():
    x = np.linspace(-15, 30, 2001)
    ai, aip, _, _ = special.airy(x)
    assert np.max(np.abs(R.airy_fn(x) - ai)) < 1e-9
    assert np.max(np.abs(R.airy_prime(x) - aip)) < 1e-8
    rel = np.abs(R.airy_fn(x[x > 5]) / ai[x > 5] - 1)
    assert rel.max() < 2e-8


def test_airy_ode_residual():
    x = np.linspace(-10, 10, 201)
    h = 1e-4
    second = (R.airy_prime(x + h) - R.airy_prime(x - h)) / (2 * h)
    assert np.max(np.abs(second - x * R.airy_fn(x))) < 1e-6


def test_airy_domain():
    with pytest.raises(DomainError):
        R.airy_fn(-20.0)


def test_gue_literature_moments():
    # mean and variance of the GUE Tracy-Widom law, published to many digits
    grid, vals = R.gue_table()
    mean, std = R.moments_from_cdf(grid, vals)
    assert mean == pytest.approx(-1.7710868074, abs=2e-4)
    assert std**2 == pytest.approx(0.8131947928, abs=5e-4)


def test_goe_literature_moments():
    grid, vals = R.load_goe_table()
    mean, std = R.moments_from_cdf(grid, vals)
    assert mean == pytest.approx(-1.2065335746, abs=2e-4)
    assert std**2 == pytest.approx(1.6077810346, abs=1e-3)


def test_tw_cdf_stable_and_monotone():
    assert abs(R.gue_det_raw(0.0, 40) - R.gue_det_raw(0.0, 80)) < 1e-8
    s = np.linspace(-8, 5, 200)
    v = [R.tw_gue_cdf(x) for x in s]
    assert np.all(np.diff(v) >= 0)
    assert R.tw_gue_cdf(0.0) == pytest.approx(0.96937, abs=1e-5)
    assert R.tw_goe_cdf(0.0) == pytest.approx(0.83191, abs=1e-5)


def test_tw_table_matches_direct():
    for s in (-4.0, -1.77, 0.5):
        assert R.GUE().cdf(s) == pytest.approx(R.tw_gue_cdf(s), abs=1e-5)
        assert R.GOEsq().cdf(s) == pytest.approx(R.tw_goe_cdf(s) ** 2, abs=1e-5)


def test_accuracy_guards():
    # 20 nodes are not enough deep in the bulk of the law
    with pytest.raises(AccuracyError):
        R.tw_gue_cdf(-5.0, nodes=20)
    with pytest.raises(ConfigError):
        R.tw_gue_cdf(0.0, nodes=10)
    with pytest.raises(DomainError):
        R.tw_gue_cdf(50.0)


def test_gaussian_refs():
    assert R.Gaussian().cdf(0.0) == 0.5
    assert R.MaxTwoGaussians().cdf(0.0) == 0.25
    with pytest.raises(ConfigError):
        R.Gaussian(0.0, 0.0)


def test_ks_null_bound():
    gen = np.random.default_rng(1)
    z = gen.standard_normal(10_000)
    assert R.ks_statistic(z, R.Gaussian()) < 0.02
    # inverse transform sampling from the GUE table
    grid, vals = R.gue_table()
    u = gen.uniform(size=10_000)
    s = np.interp(u, vals, grid)
    assert R.ks_statistic(s, R.GUE()) < 0.02


def test_ks_matches_scipy():
    from scipy import stats
    gen = np.random.default_rng(2)
    a = gen.standard_normal(500)
    b = gen.standard_normal(700) + 0.2
    assert R.ks_statistic(a, R.Gaussian()) == pytest.approx(stats.kstest(a, "norm").statistic, abs=1e-12)
    assert R.ks_statistic(a, R.Empirical(b)) == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-12)
    ints = gen.integers(0, 5, 300).astype(float)
    ints2 = gen.integers(0, 5, 400).astype(float)
    assert R.ks_statistic(ints, R.Empirical(ints2)) == pytest.approx(stats.ks_2samp(ints, ints2).statistic, abs=1e-12)


def test_goe_table_roundtrip(tmp_path):
    p = tmp_path / "goe.txt"
    R.write_goe_table(p, step=0.5)
    g, v = R.load_goe_table(p)
    g0, v0 = R.load_goe_table()
    assert np.allclose(v, np.interp(g, g0, v0), atol=1e-9)
