#!/usr/bin/env python3
"""Signal models: compressible decay, dyadic bands, unrecoverable energy.

Power-law signals with sorted magnitudes R i^(-1/p) are the standard
model of "almost sparse".  The unrecoverable energy nu is the baseline no
algorithm can beat; the band profile predicts how many iterations the
greedy loop needs.
"""

import numpy as np

import cosamp
from cosamp.models import CompressibleSpec

N = 1024

# --- compressible signals and their tail bounds ----------------------------

print(f"{'p':>4} {'s':>4} {'l1 tail':>10} {'bound':>10} {'l2 tail':>10} {'bound':>10}")
for p in (0.3, 0.5):
    spec = CompressibleSpec(p=p, magnitude=1.0, n=N, sign_seed=1, permutation_seed=2)
    x = cosamp.make_compressible(spec)
    for s in (16, 64):
        tail = x - cosamp.best_s_approx(x, s)[0]
        l1_bound, l2_bound = cosamp.compressible_tail_bounds(spec, s)
        t = cosamp.norms(tail)
        print(f"{p:>4} {s:>4} {t.l1:>10.4f} {l1_bound:>10.4f} {t.l2:>10.4f} {l2_bound:>10.4f}")

# --- unrecoverable energy ---------------------------------------------------

spec = CompressibleSpec(p=0.5, magnitude=1.0, n=N, sign_seed=3, permutation_seed=4)
x = cosamp.make_compressible(spec)
print("\nunrecoverable energy nu (s, value, power-law bound):")
for s in (4, 16, 64):
    nu = cosamp.unrecoverable_energy(x, s)
    bound = cosamp.compressible_energy_bound(spec, s)
    print(f"  s={s:<3d} nu = {nu:.4f} <= {bound:.4f}")

# --- bands and the iteration-count forecast ---------------------------------

flat = cosamp.make_sparse(64, 8, "flat", position_seed=5, sign_seed=6)
decaying = cosamp.make_sparse(64, 8, "exponential", alpha=0.4, position_seed=5, sign_seed=6)
for label, sig in (("flat", flat), ("exponential", decaying)):
    bp = cosamp.band_profile(sig)
    bound = cosamp.iteration_bound(sig, 8)
    print(f"\n{label} signal: profile {bp.profile}, iteration bound {bound} "
          f"(universal cap {6 * 9})")
    for j, members in bp.bands.items():
        print(f"  band {j}: indices {list(members)}")

# folding a tail into the noise: samples of x equal samples of x_s plus
# an effective noise whose norm the tail controls
op = cosamp.gaussian_operator(256, N, seed=7)
fold = cosamp.noise_fold(op, x, 16)
print(f"\nnoise folding at s=16: ||e_tilde|| = {fold.norm:.4f}, bound {fold.bound:.4f}")
