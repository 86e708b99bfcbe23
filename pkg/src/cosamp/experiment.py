"""Experiment harness: JSON configs, seeded single recoveries, parameter
sweeps, and the per-step timing bench.

Configs are versioned ``config_v1`` and carry every seed explicitly.
Per-cell, per-trial seeds derive from the master seed as
``mix_seed(master_seed, cell_index, trial_index, stream)`` with the stream
constants below, so any cell is re-runnable in isolation and sweep output
is independent of worker count.  Numeric CSV cells are formatted %.12e so
reruns are byte-identical; wall-clock timings live in a separate file that
is excluded from that contract.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import prng
from .lsq import LsqConfig
from .models import CompressibleSpec, make_compressible, make_sparse
from .operators import SamplingOperator
from .recovery import (
    FixedIterations,
    ProxyInfinityNorm,
    RecoveryConfig,
    RecoveryReport,
    SampleNorm,
    recover,
)
from .serialize import operator_from_descriptor, signal_to_json
from .variants import final_polish, recover_prune_first_variant, recover_residual_variant

CONFIG_VERSION = "config_v1"
REPORT_VERSION = "report_v1"

# seed-stream constants for mix_seed(master, cell, trial, stream)
STREAM_OPERATOR = 1
STREAM_SIGNAL_POSITIONS = 2
STREAM_SIGNAL_SIGNS = 3
STREAM_NOISE = 4
STREAM_PERMUTATION = 5

TRACE_COLUMNS = ("k", "v_norm", "y_inf", "err_l2", "err_linf", "step_times_us")
SWEEP_COLUMNS = (
    "cell_index",
    "m",
    "n",
    "s",
    "noise_norm",
    "trials",
    "success_rate",
    "median_iterations",
    "median_final_error",
)


class ConfigError(ValueError):
    pass


def _fmt(value: float) -> str:
    return "%.12e" % float(value)


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    version = cfg.get("version")
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version!r}, expected {CONFIG_VERSION!r}")
    return cfg


def parse_halting(entries) -> list:
    rules = []
    for entry in entries or []:
        kind = entry.get("kind")
        if kind == "fixed_iterations":
            rules.append(FixedIterations(int(entry["count"])))
        elif kind == "sample_norm":
            rules.append(SampleNorm(float(entry["epsilon"])))
        elif kind == "proxy_infinity_norm":
            rules.append(ProxyInfinityNorm(float(entry["eta"])))
        else:
            raise ConfigError(f"unknown halting rule kind {kind!r}")
    return rules


def parse_recovery(cfg: dict) -> RecoveryConfig:
    try:
        lsq_cfg = cfg.get("lsq", {})
        lsq = LsqConfig(
            solver=lsq_cfg.get("solver", "cg"),
            iterations=int(lsq_cfg.get("iterations", 3)),
            warm_start=lsq_cfg.get("warm_start", "current"),
        )
        return RecoveryConfig(
            s=int(cfg["s"]),
            halting=parse_halting(cfg.get("halting")),
            max_iterations=cfg.get("max_iterations"),
            lsq=lsq,
            identify_width=cfg.get("identify_width"),
            prune_width=cfg.get("prune_width"),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid recovery section: {exc}") from exc


def build_operator(desc: dict) -> SamplingOperator:
    desc = dict(desc)
    try:
        return operator_from_descriptor(desc)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid operator descriptor: {exc}") from exc


def build_signal(spec: dict, seeds: tuple[int, int, int]) -> np.ndarray:
    """Instantiate the signal model; explicit per-spec seeds win over derived."""
    position_seed, sign_seed, permutation_seed = seeds
    kind = spec.get("kind")
    if kind == "sparse":
        return make_sparse(
            int(spec["n"]),
            int(spec["s"]),
            spec.get("law", "flat"),
            alpha=float(spec.get("alpha", 0.5)),
            magnitudes=spec.get("magnitudes"),
            scale=float(spec.get("scale", 1.0)),
            position_seed=int(spec.get("position_seed", position_seed)),
            sign_seed=int(spec.get("sign_seed", sign_seed)),
        )
    if kind == "compressible":
        return make_compressible(
            CompressibleSpec(
                p=float(spec["p"]),
                magnitude=float(spec.get("magnitude", 1.0)),
                n=int(spec["n"]),
                sign_seed=int(spec.get("sign_seed", sign_seed)),
                permutation_seed=int(spec.get("permutation_seed", permutation_seed)),
            )
        )
    raise ConfigError(f"unknown signal kind {kind!r}")


def build_noise(spec: dict | None, m: int, complex_samples: bool, seed: int) -> np.ndarray | None:
    """Noise vector in sample space; scalar kind follows the operator."""
    if not spec:
        return None
    noise_seed = int(spec.get("seed", seed))
    if complex_samples:
        direction = prng.complex_normals(noise_seed, m)
    else:
        direction = prng.normals(noise_seed, m)
    if "norm" in spec:
        norm = float(spec["norm"])
        if norm == 0.0:
            return np.zeros_like(direction)
        return direction * (norm / float(np.linalg.norm(direction)))
    if "sigma" in spec:
        return direction * float(spec["sigma"])
    raise ConfigError("noise spec needs either 'norm' or 'sigma'")


@dataclass(frozen=True)
class TrialOutcome:
    report: RecoveryReport
    truth: np.ndarray
    noise_norm: float
    relative_error: float
    success: bool
    iteration_time_us: float


def run_trial(
    cfg: dict,
    *,
    cell: dict | None = None,
    cell_index: int = 0,
    trial_index: int = 0,
    variant: str = "standard",
    polish: bool = False,
) -> TrialOutcome:
    """One fully seeded recovery; ``cell`` overrides m/s/noise for sweeps."""
    master = int(cfg.get("master_seed", 0))
    cell = cell or {}

    op_desc = dict(cfg["operator"])
    if "m" in cell:
        op_desc["m"] = cell["m"]
    derived_op_seed = prng.mix_seed(master, cell_index, trial_index, STREAM_OPERATOR)
    if op_desc.get("kind") in ("gaussian", "partial_fourier") and "seed" not in op_desc:
        op_desc["seed"] = derived_op_seed
    op = build_operator(op_desc)

    signal_spec = dict(cfg["signal"])
    if "s" in cell:
        signal_spec["s"] = cell["s"]
    truth = build_signal(
        signal_spec,
        (
            prng.mix_seed(master, cell_index, trial_index, STREAM_SIGNAL_POSITIONS),
            prng.mix_seed(master, cell_index, trial_index, STREAM_SIGNAL_SIGNS),
            prng.mix_seed(master, cell_index, trial_index, STREAM_PERMUTATION),
        ),
    )

    noise_spec = cfg.get("noise")
    if "noise_norm" in cell:
        noise_spec = {"norm": cell["noise_norm"]}
    noise = build_noise(
        noise_spec,
        op.m,
        op.is_complex,
        prng.mix_seed(master, cell_index, trial_index, STREAM_NOISE),
    )

    recovery_cfg = parse_recovery(dict(cfg["recovery"]))
    if "s" in cell:
        recovery_cfg = replace(recovery_cfg, s=int(cell["s"]))

    u = op.apply(truth)
    if noise is not None:
        u = u + noise

    start = time.perf_counter()
    report = _dispatch(variant)(op, u, recovery_cfg, truth)
    elapsed_us = (time.perf_counter() - start) * 1e6
    if polish:
        polished = final_polish(op, u, report.approximation)
        report = replace(report, approximation=polished)

    truth_norm = float(np.linalg.norm(truth))
    err = float(np.linalg.norm(truth - report.approximation))
    rel = err / truth_norm if truth_norm > 0 else err
    noise_norm = float(np.linalg.norm(noise)) if noise is not None else 0.0
    success = rel <= success_threshold(cfg, truth_norm, noise_norm)
    per_iter_us = elapsed_us / max(report.iterations_run, 1)
    return TrialOutcome(report, truth, noise_norm, rel, success, per_iter_us)


def _dispatch(variant: str):
    if variant == "standard":
        return recover
    if variant == "residual":
        return recover_residual_variant
    if variant == "prune-first":
        return recover_prune_first_variant
    raise ConfigError(f"unknown variant {variant!r}")


def success_threshold(cfg: dict, truth_norm: float, noise_norm: float) -> float:
    """Relative-error success bar: 1e-4 noiseless, 15 ||e|| / ||x|| noisy."""
    explicit = cfg.get("success_threshold")
    if explicit is not None:
        return float(explicit)
    if noise_norm == 0.0:
        return 1e-4
    return 15.0 * noise_norm / truth_norm if truth_norm > 0 else math.inf


def report_payload(outcome: TrialOutcome) -> dict:
    report = outcome.report
    return {
        "version": REPORT_VERSION,
        "iterations_run": report.iterations_run,
        "halt_reason": report.halt_reason,
        "final": {
            "support": [int(i) for i in report.support.indices],
            "values": signal_to_json(report.approximation[report.support.indices]),
            "n": int(report.approximation.size),
        },
        "relative_error": outcome.relative_error,
        "noise_norm": outcome.noise_norm,
        "success": outcome.success,
        "diverged_iterations": list(report.diverged_iterations),
        "trace": [
            {
                "k": row.k,
                "v_norm": row.v_norm,
                "y_inf": row.y_inf,
                "err_l2": row.err_l2,
                "err_linf": row.err_linf,
                "step_times_us": row.step_times_us,
            }
            for row in report.trace
        ],
    }


def write_trace_csv(path, report: RecoveryReport) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in report.trace:
            writer.writerow(
                [
                    row.k,
                    _fmt(row.v_norm),
                    _fmt(row.y_inf),
                    _fmt(row.err_l2) if row.err_l2 is not None else "",
                    _fmt(row.err_linf) if row.err_linf is not None else "",
                    _fmt(row.total_time_us()),
                ]
            )


def sweep_cells(cfg: dict) -> list[dict]:
    """Row-major cell grid over the sweep axes (single cell when absent)."""
    sweep = cfg.get("sweep") or {}
    m_axis = sweep.get("m", [cfg["operator"].get("m")])
    s_axis = sweep.get("s", [cfg["recovery"].get("s")])
    noise_axis = sweep.get("noise_norm")
    if noise_axis is None:
        base_noise = cfg.get("noise") or {}
        noise_axis = [base_noise.get("norm", 0.0)]
    if not m_axis or not s_axis or not noise_axis:
        raise ConfigError("sweep axes must be nonempty")
    if any(v is None for axis in (m_axis, s_axis, noise_axis) for v in axis):
        raise ConfigError("sweep axes need explicit values (m, s, noise_norm)")
    cells = []
    index = 0
    for m in m_axis:
        for s in s_axis:
            for noise_norm in noise_axis:
                cells.append(
                    {"cell_index": index, "m": int(m), "s": int(s), "noise_norm": float(noise_norm)}
                )
                index += 1
    return cells


@dataclass(frozen=True)
class CellResult:
    cell: dict
    trials: int
    success_rate: float
    median_iterations: float
    median_final_error: float
    median_iteration_time_us: float
    failures: int = 0


def run_cell(cfg: dict, cell: dict, trials: int) -> CellResult:
    outcomes = []
    failures = 0
    for t in range(trials):
        try:
            outcomes.append(run_trial(cfg, cell=cell, cell_index=cell["cell_index"], trial_index=t))
        except Exception:
            failures += 1
    if not outcomes:
        return CellResult(cell, trials, 0.0, math.nan, math.nan, math.nan, failures)
    return CellResult(
        cell,
        trials,
        sum(o.success for o in outcomes) / len(outcomes),
        float(np.median([o.report.iterations_run for o in outcomes])),
        float(np.median([o.relative_error for o in outcomes])),
        float(np.median([o.iteration_time_us for o in outcomes])),
        failures,
    )


def _run_cell_star(args) -> CellResult:
    return run_cell(*args)


def run_sweep(cfg: dict, jobs: int = 1) -> list[CellResult]:
    cells = sweep_cells(cfg)
    trials = int(cfg.get("trials", 1))
    n = int(cfg["signal"]["n"])
    for cell in cells:
        if cell["m"] > n:
            raise ConfigError(f"cell m={cell['m']} exceeds N={n}")
    work = [(cfg, cell, trials) for cell in cells]
    if jobs <= 1 or len(cells) == 1:
        results = [_run_cell_star(item) for item in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell_star, work))
    return sorted(results, key=lambda r: r.cell["cell_index"])


def sweep_csv(results: list[CellResult], n: int) -> str:
    """Deterministic results CSV (no wall-clock columns)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for res in results:
        writer.writerow(
            [
                res.cell["cell_index"],
                res.cell["m"],
                n,
                res.cell["s"],
                _fmt(res.cell["noise_norm"]),
                res.trials,
                _fmt(res.success_rate),
                _fmt(res.median_iterations),
                _fmt(res.median_final_error),
            ]
        )
    return buf.getvalue()


def sweep_timing_csv(results: list[CellResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("cell_index", "median_iteration_time_us"))
    for res in results:
        writer.writerow([res.cell["cell_index"], _fmt(res.median_iteration_time_us)])
    return buf.getvalue()


BENCH_STEPS = ("proxy", "identify", "merge", "estimate", "prune", "update")


def bench_operator(op: SamplingOperator, s: int, iterations: int, seed: int) -> dict[str, float]:
    """Median per-step microseconds over the recovery loop's iterations."""
    truth = make_sparse(
        op.n,
        s,
        "flat",
        position_seed=prng.mix_seed(seed, 1),
        sign_seed=prng.mix_seed(seed, 2),
    )
    u = op.apply(truth)
    config = RecoveryConfig(s=s, halting=FixedIterations(iterations), lsq=LsqConfig())
    report = recover(op, u, config)
    medians: dict[str, float] = {}
    for step in BENCH_STEPS:
        samples = [row.step_times_us.get(step, 0.0) for row in report.trace]
        medians[step] = float(np.median(samples)) if samples else 0.0
    medians["total"] = float(np.median([row.total_time_us() for row in report.trace]))
    return medians


def bench_csv(rows: list[tuple[str, dict[str, float]]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step"] + [label for label, _ in rows])
    for step in BENCH_STEPS + ("total",):
        writer.writerow([step] + [_fmt(med[step]) for _, med in rows])
    return buf.getvalue()
