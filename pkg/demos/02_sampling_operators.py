#!/usr/bin/env python3
"""Matrix-free sampling operators and their adjoints.

Every operator exposes apply / adjoint plus submatrix actions, and the
fast kinds (partial Fourier) never materialize a matrix.  This script
checks the adjoint inner-product identity and compares the fast Fourier
path against the explicitly materialized DFT rows.
"""

import time

import numpy as np

import cosamp
from cosamp import prng

# --- the adjoint is the true conjugate transpose ---------------------------

ops = {
    "identity 32x32": cosamp.identity_operator(32),
    "gaussian 16x32": cosamp.gaussian_operator(16, 32, seed=3),
    "partial Fourier 8x32": cosamp.partial_fourier_operator(8, 32, seed=3),
}
for name, op in ops.items():
    x = prng.complex_normals(10, op.n)
    v = prng.complex_normals(11, op.m)
    gap = abs(np.vdot(v, op.apply(x)) - np.vdot(op.adjoint(v), x))
    print(f"{name:24s} adjoint identity gap: {gap:.2e}")

# --- fast path vs dense materialization ------------------------------------

pf = cosamp.partial_fourier_operator(16, 64, seed=9)
dense = pf.materialize()
x = prng.complex_normals(12, 64)
err = np.linalg.norm(pf.apply(x) - dense @ x) / np.linalg.norm(dense @ x)
print(f"\nfast Fourier apply vs dense rows: {err:.2e} relative")

# --- the fast multiply is what makes large N practical ---------------------

for exp in (12, 14, 16):
    n = 2**exp
    op = cosamp.partial_fourier_operator(n // 4, n, seed=1)
    z = prng.complex_normals(13, n)
    op.apply(z)  # warm
    t0 = time.perf_counter()
    for _ in range(20):
        op.apply(z)
    per_apply = (time.perf_counter() - t0) / 20
    print(f"N = 2^{exp}: {per_apply * 1e6:8.1f} us per apply")

# --- submatrix actions without column extraction ----------------------------

T = cosamp.SupportSet(np.array([3, 17, 40]), 64)
coeffs = prng.complex_normals(14, 3)
direct = dense[:, T.indices] @ coeffs
print(f"\napply_sub matches explicit submatrix: "
      f"{np.linalg.norm(pf.apply_sub(T, coeffs) - direct):.2e}")
