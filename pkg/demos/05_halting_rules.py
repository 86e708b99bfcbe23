#!/usr/bin/env python3
"""The three halting rules and what each one certifies.

Fixed iteration counts are the simplest.  The sample-norm rule halts when
||v|| <= epsilon and certifies ||x - a|| <= 1.06 (epsilon + ||e||).  The
proxy rule watches ||y||_inf, costs no extra multiply, and controls the
sup-norm error instead.
"""

import numpy as np

import cosamp
from cosamp import prng

N, M, S = 128, 64, 5
op = cosamp.gaussian_operator(M, N, seed=31)
x = cosamp.make_sparse(N, S, "flat", position_seed=32, sign_seed=33)
e = prng.normals(34, M)
e *= 0.05 / np.linalg.norm(e)
u = op.apply(x) + e
e_norm = np.linalg.norm(e)

eps = 3 * e_norm
rules = {
    "fixed 8 iterations": cosamp.FixedIterations(8),
    f"sample norm <= {eps:.3f}": cosamp.SampleNorm(eps),
    "proxy sup-norm": cosamp.ProxyInfinityNorm(20 * np.sqrt(2 * S) * e_norm),
}
for label, rule in rules.items():
    cfg = cosamp.RecoveryConfig(s=S, halting=rule, max_iterations=40)
    report = cosamp.recover(op, u, cfg, truth=x)
    err = np.linalg.norm(x - report.approximation)
    print(f"{label:28s} halted at k={report.iterations_run:2d} ({report.halt_reason}), "
          f"error {err:.3e}")

# the sample-norm certificate, checked against the planted truth
cfg = cosamp.RecoveryConfig(s=S, halting=cosamp.SampleNorm(eps), max_iterations=40)
report = cosamp.recover(op, u, cfg, truth=x)
err = np.linalg.norm(x - report.approximation)
bound = 1.06 * (eps + e_norm)
print(f"\ncertificate: ||x - a|| = {err:.4f} <= 1.06 (eps + ||e||) = {bound:.4f}")

# rules compose: whichever fires first wins
cfg = cosamp.RecoveryConfig(
    s=S,
    halting=[cosamp.FixedIterations(30), cosamp.SampleNorm(1e-9)],
)
report = cosamp.recover(op, u, cfg)
print(f"composed rules: halted by {report.halt_reason} at k={report.iterations_run}")
