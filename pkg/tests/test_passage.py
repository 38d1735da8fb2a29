import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kpzlab import rng
from kpzlab.environment import Constant, PointField, Rect, Support, WeightField, sample_points
from kpzlab.errors import ConfigError, DomainError
from kpzlab.oracles import enumerate_passage, lis_bruteforce
from kpzlab.passage import (LogSumExp, MaxPlus, MinPlus, PassageQuery, half_line, lis_length, passage_array,
                            passage_grid, passage_values, png_passage, point_to_point, superadditivity_check)

BLOCK = WeightField.from_array([[1.0, 2.0], [3.0, 4.0]])

grids = st.integers(1, 6).flatmap(lambda nx: st.integers(1, 6).flatmap(
    lambda ny: st.lists(st.lists(st.floats(0, 10, allow_nan=False), min_size=ny, max_size=ny),
                        min_size=nx, max_size=nx)))


def test_two_by_two_block():
    assert passage_values(PassageQuery(BLOCK, [(1, 1)]))[0].value == 8.0
    assert point_to_point(BLOCK, MinPlus, (0, 0), (1, 1)) == 7.0
    f = point_to_point(BLOCK, LogSumExp(50.0), (0, 0), (1, 1))
    assert 8.0 <= f <= 8.0 + math.log(2) / 50


def test_compensator_block_convention():
    assert superadditivity_check(BLOCK, (0, 0), (1, 1)) == 0.0


def test_trivial_values():
    zero = WeightField(0, bulk=Constant(0.0))
    assert half_line(zero, [(5, 7)])[0] == 0.0
    assert superadditivity_check(zero, (1, 1), (4, 6)) == 0.0
    n = 7
    ones = WeightField.from_array(np.ones((n, n)))
    assert point_to_point(ones, MinPlus, (0, 0), (n - 1, n - 1)) == 2 * n - 1
    f = WeightField(9)
    from kpzlab.environment import weight
    assert point_to_point(f, MaxPlus, (3, 4), (3, 4)) == weight(f, 3, 4)


@settings(max_examples=150, deadline=None)
@given(grids, st.sampled_from([0.05, 1.0, 30.0]))
def test_dp_matches_enumeration(w, beta):
    w = np.array(w)
    f = WeightField.from_array(w)
    nx, ny = w.shape
    targets = [(i, j) for i in range(nx) for j in range(ny)]
    for mode in (MaxPlus, MinPlus, LogSumExp(beta)):
        got = passage_array(PassageQuery(f, targets, mode))
        ref = [enumerate_passage(w, t, mode.kind, beta) for t in targets]
        np.testing.assert_allclose(got, ref, rtol=1e-9, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(grids, st.data())
def test_point_source_matches_enumeration(w, data):
    w = np.array(w)
    f = WeightField.from_array(w)
    nx, ny = w.shape
    p = (data.draw(st.integers(0, nx - 1)), data.draw(st.integers(0, ny - 1)))
    targets = [(i, j) for i in range(p[0], nx) for j in range(p[1], ny)]
    for inc in (True, False):
        got = passage_array(PassageQuery(f, targets, MaxPlus, p, inc))
        for t, v in zip(targets, got):
            if t == p and not inc:
                continue
            assert v == pytest.approx(enumerate_passage(w, t, "maxplus", p=p, include_source=inc), abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**63), st.integers(0, 10), st.integers(0, 10), st.integers(0, 8), st.integers(0, 8))
def test_compensator_signs(seed, a, b, da, db):
    f = WeightField(seed)
    p, q = (a, b), (a + da, b + db)
    assert superadditivity_check(f, p, q, MaxPlus) >= -1e-9
    assert superadditivity_check(f, p, q, MinPlus) <= 1e-9
    assert superadditivity_check(f, p, q, LogSumExp(0.7)) >= -1e-9


@settings(max_examples=40, deadline=None)
@given(grids, st.data())
def test_monotone_in_a_single_weight(w, data):
    w = np.array(w)
    nx, ny = w.shape
    i, j = data.draw(st.integers(0, nx - 1)), data.draw(st.integers(0, ny - 1))
    w2 = w.copy()
    w2[i, j] += data.draw(st.floats(0.0, 5.0))
    t = [(nx - 1, ny - 1)]
    a, b = WeightField.from_array(w), WeightField.from_array(w2)
    assert half_line(b, t, MaxPlus)[0] >= half_line(a, t, MaxPlus)[0]
    assert half_line(b, t, MinPlus)[0] >= half_line(a, t, MinPlus)[0]


def test_beta_bracket_on_small_grids():
    for s in range(20):
        f = WeightField(s)
        L = half_line(f, [(7, 7)], MaxPlus)[0]
        F = half_line(f, [(7, 7)], LogSumExp(50.0))[0]
        assert 0 <= F - L <= math.log(math.comb(14, 7)) / 50.0 + 1e-12


def test_small_beta_two_by_two_enumeration():
    beta = 0.01
    F = half_line(BLOCK, [(1, 1)], LogSumExp(beta))[0]
    t1, t2 = 1 + 2 + 4, 1 + 3 + 4
    assert abs(F - math.log(math.exp(beta * t1) + math.exp(beta * t2)) / beta) < 1e-6


def test_large_beta_no_overflow():
    f = WeightField(1, bulk=Constant(1000.0))
    v = half_line(f, [(20, 20)], LogSumExp(1e6))[0]
    assert math.isfinite(v) and abs(v - 41_000.0) < 1e-3


def test_multi_target_equals_single_queries():
    f = WeightField(77)
    targets = [(30, 5), (3, 40), (25, 25), (0, 0), (12, 31)]
    joint = half_line(f, targets)
    for t, v in zip(targets, joint):
        assert half_line(f, [t])[0] == v


def test_grid_matches_targets():
    f = WeightField(5)
    g = passage_grid(f, (9, 6))
    assert g.shape == (9, 6)
    assert g[8, 5] == half_line(f, [(8, 5)])[0]
    assert g[3, 2] == half_line(f, [(3, 2)])[0]


def test_domain_errors():
    f = WeightField(1)
    with pytest.raises(DomainError):
        half_line(f, [(-1, 3)])
    with pytest.raises(DomainError):
        point_to_point(f, MaxPlus, (3, 3), (2, 5))
    with pytest.raises(DomainError):
        half_line(WeightField(0, Support.HALF_FLAT), [(3, -3)])
    with pytest.raises(ConfigError):
        LogSumExp(0.0)


def test_flat_support_half_line():
    f = WeightField(3, Support.FLAT)
    # a target on the boundary line only sees its own weight
    from kpzlab.environment import weight
    assert half_line(f, [(-4, 4)])[0] == weight(f, -4, 4)
    v = half_line(f, [(2, 2), (-3, 5)])
    assert (v > 0).all()
    # sources on the line i + j = 0: the value at (1, 0) is the best of two two-site paths or itself
    w = lambda i, j: weight(f, i, j)
    assert half_line(f, [(1, 0)])[0] == pytest.approx(w(1, 0) + max(w(0, 0), w(1, -1)))


def test_lis_basics():
    assert lis_length([]) == 0
    assert lis_length([(k, k) for k in range(1, 9)]) == 8
    assert lis_length([(1, 3), (2, 2), (3, 1)]) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**63))
def test_lis_matches_bruteforce(seed):
    u = rng.uniform2_array(rng.mix64(seed), np.arange(12), np.array([[0], [1]]))
    pts = np.column_stack([u[0], u[1]])
    assert lis_length(pts) == lis_bruteforce(pts)


def test_png_droplet_is_lis_of_cone():
    f = PointField(4, 1.0)
    pts = sample_points(f, Rect(0, 0, 6, 6))
    assert png_passage(f, (6, 6)) == lis_length(pts)
