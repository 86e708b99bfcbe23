#!/usr/bin/env python3
"""A small phase-transition study over the sample count m.

Success probability climbs sharply once m passes a few multiples of the
sparsity.  The sweep harness derives every seed from (master, cell,
trial), so the whole table is reproducible and worker-count independent.
The same study runs from the command line via `cosamp sweep`.
"""

from cosamp.experiment import run_sweep, sweep_csv

S = 8
config = {
    "version": "config_v1",
    "master_seed": 2718,
    "operator": {"kind": "gaussian", "m": 64, "n": 256},
    "signal": {"kind": "sparse", "n": 256, "s": S, "law": "flat"},
    "noise": None,
    "recovery": {
        "s": S,
        "halting": [
            {"kind": "sample_norm", "epsilon": 1e-8},
            {"kind": "fixed_iterations", "count": 40},
        ],
    },
    "trials": 40,
    "sweep": {"m": [2 * S, 3 * S, 4 * S, 6 * S, 8 * S]},
}

results = run_sweep(config, jobs=1)
print(f"{'m':>4} {'m/s':>5} {'success':>8} {'median iters':>13} {'median error':>13}")
for res in results:
    m = res.cell["m"]
    print(
        f"{m:>4} {m / S:>5.1f} {res.success_rate:>8.2f} "
        f"{res.median_iterations:>13.1f} {res.median_final_error:>13.3e}"
    )

print("\nresults CSV (byte-stable across reruns and --jobs):\n")
print(sweep_csv(results, 256))
