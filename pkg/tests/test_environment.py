import numpy as np
import pytest

from kpzlab import rng
from kpzlab.environment import (BoundarySources, Constant, Exponential, Geometric, HalfPlane, PointField, Rect,
                                Support, ThickOneSided, TwoSided, WeightField, sample_points, sample_sources,
                                weight, weights)
from kpzlab.errors import ConfigError, DomainError


def test_two_sided_origin_is_zero():
    f = WeightField(5, boundary=TwoSided(0.5, 0.5))
    assert weight(f, 0, 0) == 0.0


def test_weight_is_deterministic():
    f = WeightField(123)
    assert weight(f, 10, 20) == weight(f, 10, 20)
    assert weight(f, 10, 20) == weights(WeightField(123), [10], [20])[0]


def test_two_sided_boundary_mean():
    f = WeightField(1, boundary=TwoSided(0.5, 1.0))
    w = weights(f, np.arange(1, 100_001), 0)
    assert abs(w.mean() - 2.0) < 0.05
    col = weights(f, 0, np.arange(1, 100_001))
    assert abs(col.mean() - 1.0) < 0.02


@pytest.mark.parametrize("rate", [1.0, 2.5])
def test_exponential_bulk_moments(rate):
    n = 100_000
    w = weights(WeightField(4, bulk=Exponential(rate)), np.arange(n) % 400, np.arange(n) // 400)
    assert abs(w.mean() - 1 / rate) < 3 / rate / np.sqrt(n)
    assert abs(w.var() - 1 / rate**2) < 3 * np.sqrt(8) / rate**2 / np.sqrt(n)


def test_geometric_bulk_law():
    n = 100_000
    p = 0.3
    w = weights(WeightField(8, bulk=Geometric(p)), np.arange(n), 1)
    assert np.all(w == np.floor(w)) and w.min() >= 0
    mean = (1 - p) / p
    assert abs(w.mean() - mean) < 4 * np.sqrt((1 - p) / p**2 / n)
    assert abs(np.mean(w == 0) - p) < 0.01


def test_thick_boundary_rates():
    f = WeightField(2, boundary=ThickOneSided((0.25, 0.5)))
    j = np.arange(50_000)
    assert abs(weights(f, 0, j).mean() - 4.0) < 0.1
    assert abs(weights(f, 1, j).mean() - 2.0) < 0.05
    assert abs(weights(f, 2, j).mean() - 1.0) < 0.03


def test_distinct_sites_uncorrelated():
    f = WeightField(6)
    a = weights(f, np.arange(20_000), 0)
    b = weights(f, np.arange(20_000), 1)
    assert abs(np.corrcoef(a, b)[0, 1]) < 4 / np.sqrt(20_000)


def test_support_errors():
    with pytest.raises(DomainError):
        weight(WeightField(0), -1, 0)
    with pytest.raises(DomainError):
        weight(WeightField(0, Support.FLAT), -2, 1)
    assert weight(WeightField(0, Support.FLAT), -2, 2) >= 0
    with pytest.raises(DomainError):
        weight(WeightField(0, Support.HALF_FLAT), 3, -1)
    with pytest.raises(ConfigError):
        WeightField(0, Support.FLAT, boundary=TwoSided(0.5, 0.5))
    with pytest.raises(ConfigError):
        TwoSided(0.0, 1.0)
    with pytest.raises(ConfigError):
        WeightField.from_array([[1.0, -1.0]])


def test_constant_and_array_fields():
    assert weight(WeightField(0, bulk=Constant(2.0)), 4, 4) == 2.0
    f = WeightField.from_array([[1, 2], [3, 4]])
    assert weight(f, 1, 0) == 3.0
    with pytest.raises(DomainError):
        weight(f, 2, 0)


def test_points_zero_intensity():
    assert len(sample_points(PointField(1, 0.0), Rect(0, 0, 10, 10))) == 0
    with pytest.raises(ConfigError):
        PointField(1, -1.0)


def test_point_count_mean():
    counts = [len(sample_points(PointField(rng.sample_seed(1, k), 2.0), Rect(0, 0, 1, 1))) for k in range(10_000)]
    assert abs(np.mean(counts) - 2.0) < 0.1


def test_points_deterministic_and_window_consistent():
    f = PointField(3, 1.5)
    a = sample_points(f, Rect(0, 0, 20, 20))
    assert np.array_equal(a, sample_points(f, Rect(0, 0, 20, 20)))
    sub = sample_points(f, Rect(2, 3, 11, 17))
    inside = a[(a[:, 0] >= 2) & (a[:, 0] < 11) & (a[:, 1] >= 3) & (a[:, 1] < 17)]
    assert np.array_equal(np.sort(sub, axis=0), np.sort(inside, axis=0))
    assert ((a >= 0) & (a < 20)).all()


def test_disjoint_window_counts_uncorrelated():
    a, b = [], []
    for k in range(4000):
        f = PointField(rng.sample_seed(2, k), 1.0)
        a.append(len(sample_points(f, Rect(0, 0, 3, 3))))
        b.append(len(sample_points(f, Rect(3, 0, 6, 3))))
    assert abs(np.corrcoef(a, b)[0, 1]) < 4 / np.sqrt(4000)


def test_boundary_sources_counts():
    bottom, left = [], []
    for k in range(2000):
        f = PointField(rng.sample_seed(5, k), 1.0, sources=BoundarySources(0.5, 2.0))
        b, l = sample_sources(f, 10.0, 10.0)
        assert ((b >= 0) & (b < 10)).all() and ((l >= 0) & (l < 10)).all()
        bottom.append(len(b))
        left.append(len(l))
    assert abs(np.mean(bottom) - 5.0) < 0.2
    assert abs(np.mean(left) - 20.0) < 0.4


def test_half_plane_points_respect_region():
    f = PointField(1, 1.0, HalfPlane(0.0))
    pts = sample_points(f, Rect(-5, -5, 5, 5))
    assert (pts.sum(axis=1) >= 0).all()
