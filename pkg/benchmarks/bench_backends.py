"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_backends.py [--repeat 3]

Each kernel is timed on the same inputs with both backends, and the
outputs are compared so a speedup never hides a wrong answer.
"""

import argparse
import time

import numpy as np

from kpzlab import _backend, rng
from kpzlab.environment import TwoSided, WeightField


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(k, size):
    field = WeightField(7).kernel_params()
    boundary = WeightField(7, boundary=TwoSided(0.5, 0.5)).kernel_params()
    targets = np.array([[size - 1, size - 1]], dtype=np.int64)
    gen = np.random.default_rng(3)
    pts = gen.random((size * size, 2))
    n = 2 * size
    key = rng.derive_seed(5, rng.SALT_ARROWS)
    horizon = size / 4.0

    def pasep():
        times, bonds, right = k.pasep_events(key, n, 0.75, horizon)
        eta = (np.arange(-size, size + 1) <= 0).astype(np.int8)
        h = np.abs(np.arange(-size, size + 1)).astype(np.int64)
        flux = np.zeros(n + 1, dtype=np.int64)
        k.pasep_run(eta, h, flux, times, bonds, right, 0, horizon)
        return h

    return {
        "passage maxplus": lambda: np.asarray(k.passage(field, 0, 1.0, False, 0, 0, True, targets)),
        "passage logsumexp": lambda: np.asarray(k.passage(field, 2, 1.0, False, 0, 0, True, targets)),
        "passage two-sided": lambda: np.asarray(k.passage(boundary, 0, 1.0, False, 0, 0, True, targets)),
        "lis": lambda: k.lis_length(np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])),
        "pasep": pasep,
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _backend.BACKEND != "compiled":
        print("compiled extension not built; only the fallback is available")
        return 1
    fast = cases(_backend.load("compiled"), args.size)
    slow = cases(_backend.load("python"), args.size)
    print(f"{'kernel':<20}{'compiled s':>12}{'fallback s':>12}{'speedup':>10}  agree")
    for name in fast:
        tc, a = best_of(fast[name], args.repeat)
        tp, b = best_of(slow[name], args.repeat)
        agree = np.allclose(a, b, rtol=1e-12, atol=0)
        print(f"{name:<20}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}  {agree}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
