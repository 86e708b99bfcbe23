"""Dense vector arithmetic, supports, and best-s-term approximation.

Signals live in C^N (or R^N on the real fast path) as plain 1-D numpy
arrays; index sets are :class:`SupportSet` instances carrying their ambient
dimension.  All indexing is 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np


def _validated_vector(entries, length: int | None, what: str) -> np.ndarray:
    arr = np.asarray(entries)
    if arr.ndim != 1:
        raise ValueError(f"{what} must be 1-D, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=True)
        finite = np.isfinite(arr.real) & np.isfinite(arr.imag)
    else:
        arr = arr.astype(np.float64, copy=True)
        finite = np.isfinite(arr)
    if not finite.all():
        raise ValueError(f"{what} contains non-finite entries")
    if length is not None and arr.size != length:
        raise ValueError(f"{what} has length {arr.size}, expected {length}")
    arr.flags.writeable = False
    return arr


def as_signal(entries, n: int | None = None) -> np.ndarray:
    """Validate a length-N signal: 1-D, finite, float64 or complex128.

    Returns a read-only copy, so signals are safe to share across threads.
    """
    return _validated_vector(entries, n, "signal")


def as_samples(entries, m: int | None = None) -> np.ndarray:
    """Validate a length-m sample vector (same rules as :func:`as_signal`)."""
    return _validated_vector(entries, m, "sample vector")


@dataclass(frozen=True)
class SupportSet:
    """Strictly increasing index set inside an ambient dimension ``n``."""

    indices: np.ndarray
    n: int

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64).copy()
        if idx.ndim != 1:
            raise ValueError("indices must be 1-D")
        if idx.size and (np.diff(idx) <= 0).any():
            raise ValueError("indices must be strictly increasing")
        if idx.size and (idx[0] < 0 or idx[-1] >= self.n):
            raise ValueError(f"indices must lie in [0, {self.n})")
        idx.flags.writeable = False
        object.__setattr__(self, "indices", idx)

    @classmethod
    def empty(cls, n: int) -> "SupportSet":
        return cls(np.empty(0, dtype=np.int64), n)

    @classmethod
    def full(cls, n: int) -> "SupportSet":
        return cls(np.arange(n, dtype=np.int64), n)

    @classmethod
    def from_any(cls, indices, n: int) -> "SupportSet":
        """Build from an unsorted, possibly duplicated index collection."""
        arr = np.unique(np.asarray(indices, dtype=np.int64))
        return cls(arr, n)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SupportSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.indices, other.indices)

    def union(self, other: "SupportSet") -> "SupportSet":
        if self.n != other.n:
            raise ValueError("ambient dimensions differ")
        return SupportSet(np.union1d(self.indices, other.indices), self.n)

    def complement(self) -> "SupportSet":
        mask = np.ones(self.n, dtype=bool)
        mask[self.indices] = False
        return SupportSet(np.flatnonzero(mask).astype(np.int64), self.n)

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        out[self.indices] = True
        return out


def support_of(x: np.ndarray) -> SupportSet:
    """Exact nonzero support of ``x``."""
    x = np.asarray(x)
    return SupportSet(np.flatnonzero(x != 0).astype(np.int64), x.size)


def best_s_approx(x, s: int) -> tuple[np.ndarray, SupportSet]:
    """Best s-term approximation ``x_s`` and its support.

    Keeps the ``s`` largest-magnitude entries (ties broken lexicographically,
    lower index wins) and zeroes the rest.  The returned support has
    cardinality ``min(s, l0(x))``: exact zeros are never selected.  ``x_s``
    minimizes ``||x - z||_p`` over s-sparse ``z`` for every p.
    """
    x = np.asarray(x)
    n = x.size
    if s < 0:
        raise ValueError("s must be nonnegative")
    mag = np.abs(x)
    if s == 0:
        return np.zeros_like(x), SupportSet.empty(n)
    # stable argsort keeps original (lexicographic) order among equal magnitudes
    order = np.argsort(-mag, kind="stable")
    chosen = order[: min(s, n)]
    chosen = chosen[mag[chosen] > 0]
    supp = SupportSet(np.sort(chosen).astype(np.int64), n)
    out = np.zeros_like(x)
    out[supp.indices] = x[supp.indices]
    return out, supp


def restrict(x, T: SupportSet) -> np.ndarray:
    """Signal equal to ``x`` on ``T`` and zero elsewhere."""
    x = np.asarray(x)
    if x.size != T.n:
        raise ValueError(f"signal length {x.size} != support ambient {T.n}")
    out = np.zeros_like(x)
    out[T.indices] = x[T.indices]
    return out


def embed(coeffs, T: SupportSet) -> np.ndarray:
    """Length-``T.n`` signal holding ``coeffs`` on ``T`` and zero elsewhere."""
    coeffs = np.asarray(coeffs)
    if coeffs.size != len(T):
        raise ValueError(f"got {coeffs.size} coefficients for |T| = {len(T)}")
    dtype = np.complex128 if np.iscomplexobj(coeffs) else np.float64
    out = np.zeros(T.n, dtype=dtype)
    out[T.indices] = coeffs
    return out


class Norms(NamedTuple):
    l1: float
    l2: float
    linf: float
    l0: int


def norms(x) -> Norms:
    """(l1, l2, linf, l0) of a vector; l0 counts exact nonzeros."""
    x = np.asarray(x)
    mag = np.abs(x)
    if x.size == 0:
        return Norms(0.0, 0.0, 0.0, 0)
    return Norms(
        float(mag.sum()),
        float(np.sqrt((mag * mag).sum())),
        float(mag.max()),
        int(np.count_nonzero(x)),
    )


def head_tail_l1_bound(x, t: int) -> float:
    """Upper bound ``||x||_1 / (2 sqrt(t))`` on the l2 tail ``||x - x_t||_2``."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return norms(x).l1 / (2.0 * math.sqrt(t))
