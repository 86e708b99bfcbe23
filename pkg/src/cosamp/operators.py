"""Matrix-free sampling operators: dense, Gaussian, partial Fourier, identity.

Every operator exposes ``apply`` / ``adjoint`` plus the column-submatrix
actions ``apply_sub`` / ``adjoint_sub``, implemented by embedding and
restricting so that matrix-free kinds never extract columns.  ``adjoint``
is the true conjugate transpose for all kinds.
"""

from __future__ import annotations

import abc
import math

import numpy as np

from . import prng
from .signals import SupportSet, embed


class DimensionMismatchError(ValueError):
    pass


def _check_length(vec, expected: int, what: str) -> np.ndarray:
    vec = np.asarray(vec)
    if vec.ndim != 1 or vec.size != expected:
        raise DimensionMismatchError(
            f"{what} must have length {expected}, got shape {vec.shape}"
        )
    return vec


class SamplingOperator(abc.ABC):
    """m x N linear map accessed only through its action on vectors."""

    m: int
    n: int
    #: True when the operator's samples are intrinsically complex.
    is_complex: bool = False

    @abc.abstractmethod
    def apply(self, x) -> np.ndarray:
        """Phi @ x for a length-N signal."""

    @abc.abstractmethod
    def adjoint(self, v) -> np.ndarray:
        """Phi* @ v for a length-m sample vector."""

    def apply_sub(self, T: SupportSet, coeffs) -> np.ndarray:
        """Phi_T @ c: embed c on T, then apply the full operator."""
        self._check_support(T)
        return self.apply(embed(coeffs, T))

    def adjoint_sub(self, T: SupportSet, v) -> np.ndarray:
        """Phi_T* @ v: apply the full adjoint, then restrict to T."""
        self._check_support(T)
        return self.adjoint(v)[T.indices]

    def materialize(self) -> np.ndarray:
        """Dense m x N matrix (oracle/diagnostic use; O(mN) memory)."""
        dtype = np.complex128 if self.is_complex else np.float64
        basis = np.zeros(self.n, dtype=dtype)
        cols = np.empty((self.m, self.n), dtype=np.complex128)
        for j in range(self.n):
            basis[j] = 1.0
            cols[:, j] = self.apply(basis)
            basis[j] = 0.0
        return cols if self.is_complex else cols.real

    def _check_support(self, T: SupportSet) -> None:
        if T.n != self.n:
            raise DimensionMismatchError(
                f"support ambient dimension {T.n} != operator columns {self.n}"
            )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"{type(self).__name__}(m={self.m}, n={self.n})"


class IdentityOperator(SamplingOperator):
    """The N x N identity; useful for exact short-circuit tests."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.m = n
        self.n = n

    def apply(self, x) -> np.ndarray:
        return _check_length(x, self.n, "signal").copy()

    def adjoint(self, v) -> np.ndarray:
        return _check_length(v, self.m, "sample vector").copy()

    def materialize(self) -> np.ndarray:
        return np.eye(self.n)


class DenseOperator(SamplingOperator):
    """Explicit m x N matrix with random access to columns."""

    def __init__(self, matrix):
        mat = np.asarray(matrix)
        if mat.ndim != 2:
            raise ValueError("matrix must be 2-D")
        if np.iscomplexobj(mat):
            mat = mat.astype(np.complex128, copy=True)
            self.is_complex = True
        else:
            mat = mat.astype(np.float64, copy=True)
        if not np.isfinite(mat).all():
            raise ValueError("matrix contains non-finite entries")
        mat.flags.writeable = False
        self.matrix = mat
        self.m, self.n = mat.shape

    def apply(self, x) -> np.ndarray:
        return self.matrix @ _check_length(x, self.n, "signal")

    def adjoint(self, v) -> np.ndarray:
        return self.matrix.conj().T @ _check_length(v, self.m, "sample vector")

    def apply_sub(self, T: SupportSet, coeffs) -> np.ndarray:
        self._check_support(T)
        coeffs = _check_length(coeffs, len(T), "coefficients")
        return self.matrix[:, T.indices] @ coeffs

    def adjoint_sub(self, T: SupportSet, v) -> np.ndarray:
        self._check_support(T)
        v = _check_length(v, self.m, "sample vector")
        return self.matrix[:, T.indices].conj().T @ v

    def materialize(self) -> np.ndarray:
        return np.array(self.matrix)


class GaussianOperator(DenseOperator):
    """Seeded Gaussian ensemble: entries i.i.d. N(0, 1/m).

    The matrix is filled row-major from the pinned Box-Muller stream
    (see :mod:`cosamp.prng`), so a fixed seed reproduces it byte-for-byte.
    """

    def __init__(self, m: int, n: int, seed: int):
        if not 0 < m <= n:
            raise ValueError(f"need 0 < m <= n, got m={m}, n={n}")
        entries = prng.normals(seed, m * n).reshape(m, n) / math.sqrt(m)
        super().__init__(entries)
        self.seed = int(seed)


class PartialFourierOperator(SamplingOperator):
    """sqrt(N/m) times m rows of the unitary DFT; power-of-two N only.

    Scaling is chosen so that E ||Phi x||^2 = ||x||^2 over the random row
    set (with m = N the operator is exactly unitary).  Rows are drawn
    without replacement by a seeded Fisher-Yates shuffle unless an explicit
    row set is given.  Apply/adjoint run in O(N log N) via the FFT.
    """

    is_complex = True

    def __init__(self, m: int, n: int, seed: int | None = None, rows=None):
        if not 0 < m <= n:
            raise ValueError(f"need 0 < m <= n, got m={m}, n={n}")
        if n & (n - 1):
            raise ValueError(f"N must be a power of two, got {n}")
        if rows is None:
            if seed is None:
                raise ValueError("need either a seed or an explicit row set")
            rows = prng.sample_without_replacement(seed, n, m)
        rows = np.asarray(rows, dtype=np.int64)
        if rows.size != m:
            raise ValueError(f"row set has {rows.size} rows, expected {m}")
        if np.unique(rows).size != m or rows.min() < 0 or rows.max() >= n:
            raise ValueError("rows must be distinct indices in [0, N)")
        rows = np.sort(rows)
        rows.flags.writeable = False
        self.m = int(m)
        self.n = int(n)
        self.seed = None if seed is None else int(seed)
        self.rows = rows

    def apply(self, x) -> np.ndarray:
        x = _check_length(x, self.n, "signal")
        # sqrt(N/m) * (unitary DFT rows) == fft(x)[rows] / sqrt(m)
        return np.fft.fft(x)[self.rows] / math.sqrt(self.m)

    def adjoint(self, v) -> np.ndarray:
        v = _check_length(v, self.m, "sample vector")
        padded = np.zeros(self.n, dtype=np.complex128)
        padded[self.rows] = v
        return np.fft.ifft(padded) * (self.n / math.sqrt(self.m))

    def materialize(self) -> np.ndarray:
        j = np.arange(self.n)
        phases = np.exp(-2j * np.pi * np.outer(self.rows, j) / self.n)
        return phases / math.sqrt(self.m)


def identity_operator(n: int) -> IdentityOperator:
    return IdentityOperator(n)


def dense_operator(matrix) -> DenseOperator:
    return DenseOperator(matrix)


def gaussian_operator(m: int, n: int, seed: int) -> GaussianOperator:
    return GaussianOperator(m, n, seed)


def partial_fourier_operator(
    m: int, n: int, seed: int | None = None, rows=None
) -> PartialFourierOperator:
    return PartialFourierOperator(m, n, seed=seed, rows=rows)
