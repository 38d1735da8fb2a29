import numpy as np
import pytest

from kpzlab import _backend, rng
from kpzlab.environment import Geometric, Support, ThickOneSided, TwoSided, WeightField

pytestmark = pytest.mark.skipif(_backend.BACKEND != "compiled", reason="compiled extension not built")

FIELDS = [
    WeightField(1),
    WeightField(2, Support.FLAT),
    WeightField(3, Support.HALF_FLAT),
    WeightField(4, bulk=Geometric(0.4)),
    WeightField(5, boundary=TwoSided(0.4, 0.7)),
    WeightField(6, boundary=ThickOneSided((0.5, 0.8))),
    WeightField.from_array(np.arange(20.0).reshape(4, 5)),
]


@pytest.mark.parametrize("field", FIELDS)
@pytest.mark.parametrize("mode,beta", [(0, 0.0), (1, 0.0), (2, 1.3)])
def test_passage_bitwise_equal(field, mode, beta):
    # max/min-plus only add and compare: bitwise equal. log-sum-exp goes through
    # libm vs numpy exp/log1p, which may differ in the last ulp.
    c, p = _backend.load("compiled"), _backend.load("python")
    same = np.array_equal if mode != 2 else (lambda a, b: np.allclose(a, b, rtol=1e-13, atol=0))
    targets = np.array([[0, 0], [1, 3], [2, 2], [3, 4]], dtype=np.int64)
    if field.support is not Support.QUADRANT:
        targets = np.array([[-2, 3], [0, 1], [2, 2], [3, 4]], dtype=np.int64)
    args = (field.kernel_params(), mode, beta, False, 0, 0, True, targets)
    assert same(np.asarray(c.passage(*args)), np.asarray(p.passage(*args)))
    if field.support is Support.QUADRANT:
        args = (field.kernel_params(), mode, beta, True, 1, 1, False, targets[2:])
        assert same(np.asarray(c.passage(*args)), np.asarray(p.passage(*args)))


def test_large_passage_equal():
    c, p = _backend.load("compiled"), _backend.load("python")
    f = WeightField(99)
    t = np.array([[150, 120], [199, 199]], dtype=np.int64)
    assert np.array_equal(np.asarray(c.passage(f.kernel_params(), 0, 0.0, False, 0, 0, True, t)),
                          np.asarray(p.passage(f.kernel_params(), 0, 0.0, False, 0, 0, True, t)))


def test_weights_and_lis_equal():
    c, p = _backend.load("compiled"), _backend.load("python")
    i = np.arange(-5, 50, dtype=np.int64)
    j = np.arange(55, dtype=np.int64)
    for f in FIELDS[:2]:
        assert np.array_equal(np.asarray(c.weights(f.kernel_params(), i, j)),
                              np.asarray(p.weights(f.kernel_params(), i, j)))
    u = rng.uniform2_array(3, np.arange(500), np.array([[0], [1]]))
    assert c.lis_length(u[0].copy(), u[1].copy()) == p.lis_length(u[0].copy(), u[1].copy())


def test_pasep_kernels_equal():
    c, p = _backend.load("compiled"), _backend.load("python")
    ec = c.pasep_events(rng.mix64(5), 40, 0.8, 20.0)
    ep = p.pasep_events(rng.mix64(5), 40, 0.8, 20.0)
    for a, b in zip(ec, ep):
        assert np.array_equal(np.asarray(a), np.asarray(b))
    eta0 = (np.arange(41) < 20).astype(np.int8)
    h0 = np.zeros(41, dtype=np.int64)
    out = []
    for mod in (c, p):
        eta, h, flux = eta0.copy(), h0.copy(), np.zeros(41, dtype=np.int64)
        k = mod.pasep_run(eta, h, flux, *[np.asarray(x) for x in ec], 0, 10.0)
        out.append((k, eta, h, flux))
    assert out[0][0] == out[1][0]
    for a, b in zip(out[0][1:], out[1][1:]):
        assert np.array_equal(a, b)
