#!/usr/bin/env python3
"""Walk through one sparse recovery from 4x undersampled measurements.

A length-256 signal with 10 nonzero spikes is measured by a seeded
Gaussian operator with only 64 samples, then rebuilt by the greedy loop.
The trace shows the per-iteration sample-residual norm and true error.
"""

import numpy as np

import cosamp

N, M, S = 256, 64, 10

op = cosamp.gaussian_operator(M, N, seed=7)
x = cosamp.make_sparse(N, S, "flat", position_seed=1, sign_seed=2)
u = op.apply(x)
print(f"signal: N={N}, s={S}, ||x|| = {np.linalg.norm(x):.3f}")
print(f"samples: m={M}  (compression {N // M}x)")

config = cosamp.RecoveryConfig(
    s=S,
    halting=[cosamp.SampleNorm(1e-9), cosamp.FixedIterations(40)],
)
report = cosamp.recover(op, u, config, truth=x)

print(f"\nhalted after {report.iterations_run} iterations ({report.halt_reason})")
print(f"{'k':>3} {'||v||':>12} {'||x - a_k||':>12}")
for row in report.trace:
    print(f"{row.k:>3} {row.v_norm:>12.3e} {row.err_l2:>12.3e}")

recovered = report.approximation
print(f"\nsupport recovered exactly: {list(report.support) == np.flatnonzero(x).tolist()}")
print(f"relative error: {np.linalg.norm(x - recovered) / np.linalg.norm(x):.2e}")

snr, rsnr = cosamp.snr_metrics(x, recovered, cosamp.unrecoverable_energy(x, S, 1e-12))
print(f"reconstruction SNR: {rsnr:.1f} dB")
