"""Counter-based hashing shared by the compiled and fallback kernels.

Every random quantity in the package is a pure function of a 64-bit seed and
integer coordinates. The constants here are mirrored in ``_kernels.pyx`` and
``_fallback.py``; changing one without the others breaks cross-backend
agreement.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1

MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB
STEP_I = 0x9E3779B97F4A7C15
STEP_J = 0xD1B54A32D192ED03
STEP_K = 0x8CB92BA72F3D8DD7

# stream salts so that unrelated quantities never share a key
SALT_SAMPLE = 0x5A3C_91E7_0B6D_24F1
SALT_POINTS = 0x1D8E_4F2A_C7B3_6095
SALT_ARROWS = 0xE4B1_7C29_3A5F_D806
SALT_INIT = 0x72C6_A0D3_58E9_1B4F

INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int (wraps modulo 2**64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    s = mix64(seed & MASK64)
    for k in keys:
        s = mix64((s + (k & MASK64) * STEP_K) & MASK64)
    return s


def sample_seed(seed: int, index: int, stream: int = 0) -> int:
    """Seed of the ``index``-th independent sample of a run."""
    return derive_seed(seed, SALT_SAMPLE, stream, index)


def hash2(key: int, i: int, j: int) -> int:
    return mix64((key + (i & MASK64) * STEP_I + (j & MASK64) * STEP_J) & MASK64)


def uniform2(key: int, i: int, j: int) -> float:
    """Uniform on [0, 1) with 53 random bits."""
    return (hash2(key, i, j) >> 11) * INV_2_53


def exponential2(key: int, i: int, j: int, rate: float = 1.0) -> float:
    return -math.log(1.0 - uniform2(key, i, j)) / rate


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(MIX_A)
    z ^= z >> np.uint64(27)
    z *= np.uint64(MIX_B)
    z ^= z >> np.uint64(31)
    return z


def uniform2_array(key: int, i, j) -> np.ndarray:
    """Vectorised ``uniform2``; ``i`` and ``j`` broadcast against each other."""
    ii = np.asarray(i, dtype=np.int64).astype(np.uint64)
    jj = np.asarray(j, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key & MASK64) + ii * np.uint64(STEP_I) + jj * np.uint64(STEP_J)
    h = mix64_array(np.asarray(z, dtype=np.uint64))
    return (h >> np.uint64(11)).astype(np.float64) * INV_2_53
