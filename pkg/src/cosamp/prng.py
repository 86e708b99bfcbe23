"""Seeded, portable random primitives.

Every random draw in this package flows through the routines below so that
fixtures are reproducible bit-for-bit across runs, worker counts, and
platforms.  The generation pipeline is pinned:

* Raw 64-bit words come from the Philox-4x64-10 counter-based generator
  keyed by a single 64-bit seed (``numpy.random.Philox``).
* Uniforms in [0, 1) are ``(word >> 11) * 2**-53``.
* Normal deviates use the Box-Muller transform on uniform pairs.
* Sampling without replacement is a Fisher-Yates shuffle driven by raw
  words reduced modulo the remaining range.
* Derived seeds (per sweep cell, per trial) come from ``mix_seed``, a
  SplitMix64 fold of the master seed and the index tuple.

Changing any of these choices invalidates stored fixtures, so don't.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (next_state, output_word)."""
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    z = z ^ (z >> 31)
    return state, z


def mix_seed(*parts: int) -> int:
    """Fold integers into a single 64-bit seed.

    ``mix_seed(master, cell_index, trial_index, stream)`` is the documented
    derivation used by sweeps, so any cell/trial is re-runnable in isolation.
    """
    state = 0
    for part in parts:
        state = (state ^ (int(part) & _MASK64)) & _MASK64
        state, out = splitmix64(state)
        state = out
    return state


def raw_words(seed: int, count: int) -> np.ndarray:
    """``count`` raw uint64 words from Philox-4x64-10 keyed by ``seed``."""
    bg = np.random.Philox(key=int(seed) & _MASK64)
    return bg.random_raw(count)


def uniforms(seed: int, count: int) -> np.ndarray:
    """Uniform doubles in [0, 1), one per raw word."""
    words = raw_words(seed, count)
    return (words >> np.uint64(11)) * 2.0**-53


def normals(seed: int, count: int) -> np.ndarray:
    """Standard normal deviates via Box-Muller.

    Consumes 2*ceil(count/2) uniforms; pairs (u1, u2) map to
    sqrt(-2 ln(1-u1)) * (cos, sin)(2 pi u2).  The 1-u1 form keeps the log
    argument in (0, 1], so no special-casing of u1 == 0 is needed.
    """
    pairs = (count + 1) // 2
    u = uniforms(seed, 2 * pairs)
    u1 = u[0::2]
    u2 = u[1::2]
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]


def complex_normals(seed: int, count: int) -> np.ndarray:
    """Circular complex normals with E|z|^2 = 1 (re and im ~ N(0, 1/2))."""
    z = normals(seed, 2 * count)
    return (z[0::2] + 1j * z[1::2]) / np.sqrt(2.0)


def shuffled(seed: int, n: int) -> np.ndarray:
    """Fisher-Yates permutation of arange(n), driven by raw Philox words."""
    perm = np.arange(n, dtype=np.int64)
    if n < 2:
        return perm
    words = raw_words(seed, n - 1)
    for i in range(n - 1):
        j = i + int(words[i] % np.uint64(n - i))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def sample_without_replacement(seed: int, n: int, m: int) -> np.ndarray:
    """First ``m`` entries of a seeded Fisher-Yates shuffle of [0, n), sorted."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    picked = shuffled(seed, n)[:m]
    return np.sort(picked)


def signs(seed: int, count: int) -> np.ndarray:
    """Seeded +-1 array (uniform < 0.5 maps to -1)."""
    return np.where(uniforms(seed, count) < 0.5, -1.0, 1.0)
