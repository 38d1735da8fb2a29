import numpy as np
import pytest

from kpzlab import models as M
from kpzlab.environment import Support, TwoSided, WeightField, weight
from kpzlab.errors import ConfigError, DomainError
from kpzlab.passage import half_line


def test_two_sided_bernoulli_mapping():
    spec = M.map_tasep_initial_condition(M.TwoSidedBernoulli(0.3, 0.6))
    b = spec.field.boundary
    assert isinstance(b, TwoSided) and b.pi == pytest.approx(0.4) and b.eta == 0.3


def test_step_flat_halfflat_mapping():
    assert M.map_tasep_initial_condition(M.Step()).field.support is Support.QUADRANT
    assert M.map_tasep_initial_condition(M.Step()).field.boundary is None
    assert M.map_tasep_initial_condition(M.Flat()).field.support is Support.FLAT
    assert M.map_tasep_initial_condition(M.HalfFlat()).field.support is Support.HALF_FLAT


def test_mapping_errors():
    with pytest.raises(ConfigError):
        M.map_tasep_initial_condition(M.TwoSidedBernoulli(1.2, 0.5))
    with pytest.raises(ConfigError):
        M.map_tasep_initial_condition(M.TwoSidedBernoulli(0.0, 0.5))
    with pytest.raises(ConfigError):
        M.map_tasep_initial_condition("nope")


def test_current_from_height():
    assert M.current_from_height(5, 5) == 0
    assert M.current_from_height(10, 4) == 3
    assert M.current_from_height(8, 0) == 4  # h(0, t) = 2 I(0, t)


def test_height_at_time_zero():
    prof = M.height_from_passage(WeightField(1), 0.0, (-6, 6))
    assert np.array_equal(prof.values, np.abs(np.arange(-6, 7)))
    flat = M.height_from_passage(WeightField(1, Support.FLAT), 0.0, (-4, 4))
    assert np.array_equal(flat.values, np.arange(-4, 5) % 2)


def test_first_corner():
    f = WeightField(11)
    w = weight(f, 0, 0)
    nxt = min(half_line(f, [(1, 0), (0, 1)]))
    t = 0.5 * (w + nxt)
    prof = M.height_from_passage(f, t, (-1, 1))
    assert list(prof.values) == [1, 2, 1]
    assert M.height_from_passage(f, w * 0.999, (0, 0)).values[0] == 0


def test_height_monotone_in_time_and_lipschitz():
    f = WeightField(12)
    prev = None
    for t in (5.0, 20.0, 60.0):
        prof = M.height_from_passage(f, t, (-30, 30))
        assert np.all(np.abs(np.diff(prof.values)) == 1)
        if prev is not None:
            assert np.all(prof.values >= prev)
        prev = prof.values


def test_height_lpp_duality_exhaustive():
    f = WeightField(13)
    t = 12.0
    n = 16
    L = half_line(f, [(i, j) for i in range(n) for j in range(n)]).reshape(n, n)
    prof = M.height_from_passage(f, t, (-10, 10))
    for i in range(n):
        for j in range(n):
            x, y = i + 1, j + 1
            X = x - y
            if -10 <= X <= 10:
                assert (prof(X) >= x + y) == (L[i, j] <= t)


def test_height_interpolates_and_errors():
    prof = M.height_from_passage(WeightField(2), 10.0, (-3, 3))
    assert prof(0.5) == pytest.approx(0.5 * (prof(0) + prof(1)))
    with pytest.raises(DomainError):
        prof(4)
    with pytest.raises(DomainError):
        M.height_from_passage(WeightField(2), 30.0, (0, 0), depth=2)
    with pytest.raises(DomainError):
        M.height_from_passage(WeightField(2, boundary=TwoSided(0.5, 0.5)), 1.0, (0, 0))


def test_catalog_builds():
    for spec in (M.corner_growth(), M.two_sided(0.5, 0.5), M.thick_one_sided([0.5]), M.flat_tasep(),
                 M.half_flat_tasep(), M.png_droplet(), M.png_flat(), M.png_two_sources(1.0, 0.5, 0.5),
                 M.polymer(1.0), M.fpp()):
        assert spec.with_seed(3).field.seed == 3
    assert M.fpp().mode.kind == "minplus"
    assert not M.png_flat().is_lattice
