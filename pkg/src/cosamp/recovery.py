"""The five-step greedy recovery loop with pluggable halting rules.

Each iteration forms the proxy y = Phi* v, identifies the largest proxy
components, merges their support with the current approximation's, solves
a least-squares problem on the merged support against the ORIGINAL
samples, prunes the estimate back to s terms, and updates the current
samples v = u - Phi a so they reflect the residual.

Halting is composable: any rule firing stops the loop.  The proxy
infinity-norm rule is evaluated on the proxy already computed that
iteration (no extra multiply), and when it fires the loop returns the
approximation whose residual produced that proxy.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .lsq import LsqConfig, LsqResult, solve
from .operators import SamplingOperator
from .signals import SupportSet, best_s_approx, embed, restrict, support_of


@dataclass(frozen=True)
class FixedIterations:
    count: int

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError("iteration count must be nonnegative")


@dataclass(frozen=True)
class SampleNorm:
    """Fires when the current-sample norm ||v||_2 drops to epsilon or below."""

    epsilon: float

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")


@dataclass(frozen=True)
class ProxyInfinityNorm:
    """Fires when ||y||_inf <= eta / sqrt(2 s) for the current proxy."""

    eta: float

    def __post_init__(self) -> None:
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")


HaltingRule = Union[FixedIterations, SampleNorm, ProxyInfinityNorm]


@dataclass(frozen=True)
class RecoveryConfig:
    """Run parameters for :func:`recover`.

    ``max_iterations`` defaults to 6 (s + 1), the worst-case bound for
    exact arithmetic.  ``identify_width`` / ``prune_width`` default to the
    canonical 2s / s widths.
    """

    s: int
    halting: HaltingRule | Sequence[HaltingRule] = ()
    max_iterations: int | None = None
    lsq: LsqConfig = field(default_factory=LsqConfig)
    identify_width: int | None = None
    prune_width: int | None = None
    record_diagnostics: bool = False

    def __post_init__(self) -> None:
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")

    def rules(self) -> tuple[HaltingRule, ...]:
        if isinstance(self.halting, (FixedIterations, SampleNorm, ProxyInfinityNorm)):
            return (self.halting,)
        return tuple(self.halting)

    def effective_max_iterations(self) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return 6 * (self.s + 1)

    def widths(self, n: int) -> tuple[int, int]:
        identify = self.identify_width if self.identify_width is not None else 2 * self.s
        prune = self.prune_width if self.prune_width is not None else self.s
        return min(identify, n), min(prune, n)


@dataclass(frozen=True)
class RecoveryState:
    """Everything the loop knows after an iteration: approximation a,
    previous approximation, current samples v, the proxy y that drove the
    iteration, the identified and merged supports, and the pre-prune
    estimate b."""

    k: int
    s: int
    a: np.ndarray
    a_prev: np.ndarray
    v: np.ndarray
    y: np.ndarray | None
    omega: SupportSet
    T: SupportSet
    b: np.ndarray | None
    lsq_result: LsqResult | None = None


def initial_state(op: SamplingOperator, u, s: int) -> RecoveryState:
    u = np.asarray(u)
    dtype = np.complex128 if (op.is_complex or np.iscomplexobj(u)) else np.float64
    zero = np.zeros(op.n, dtype=dtype)
    return RecoveryState(
        k=0,
        s=s,
        a=zero,
        a_prev=zero.copy(),
        v=u.astype(dtype, copy=True),
        y=None,
        omega=SupportSet.empty(op.n),
        T=SupportSet.empty(op.n),
        b=None,
    )


def identify(y, width: int) -> SupportSet:
    """Support of the best ``width``-term approximation of the proxy.

    Ties break lexicographically; exact zeros are never selected, so a zero
    proxy yields the empty set.
    """
    _, supp = best_s_approx(np.asarray(y), width)
    return supp


def merge_support(omega: SupportSet, prev: SupportSet) -> SupportSet:
    """Sorted union of the newly identified set with the previous support."""
    return omega.union(prev)


def check_halt(state: RecoveryState, rule: HaltingRule) -> bool:
    """Whether ``rule`` fires on ``state``.

    The proxy rule reads the proxy stored in the state, i.e. the one
    computed during that iteration; it never triggers an extra multiply.
    """
    if isinstance(rule, FixedIterations):
        return state.k >= rule.count
    if isinstance(rule, SampleNorm):
        return float(np.linalg.norm(state.v)) <= rule.epsilon
    if isinstance(rule, ProxyInfinityNorm):
        if state.y is None:
            return False
        y_inf = float(np.abs(state.y).max()) if state.y.size else 0.0
        return y_inf <= rule.eta / np.sqrt(2.0 * state.s)
    raise TypeError(f"unknown halting rule {rule!r}")


def _estimate(op, T, u, a_prev, config: RecoveryConfig) -> tuple[np.ndarray, LsqResult | None]:
    if len(T) == 0:
        return np.zeros_like(a_prev), None
    z0 = a_prev[T.indices] if config.lsq.warm_start == "current" else None
    result = solve(op, T, u, z0, config.lsq)
    return embed(result.coefficients, T), result


def cosamp_iteration(
    state: RecoveryState, op: SamplingOperator, u, config: RecoveryConfig
) -> RecoveryState:
    """One full iteration: proxy, identify, merge, estimate, prune, update."""
    n = op.n
    identify_width, prune_width = config.widths(n)
    y = op.adjoint(state.v)
    omega = identify(y, identify_width)
    T = merge_support(omega, support_of(state.a))
    b, lsq_result = _estimate(op, T, u, state.a, config)
    a_next, _ = best_s_approx(b, prune_width)
    v_next = np.asarray(u) - op.apply(a_next)
    return RecoveryState(
        k=state.k + 1,
        s=state.s,
        a=a_next,
        a_prev=state.a,
        v=v_next,
        y=y,
        omega=omega,
        T=T,
        b=b,
        lsq_result=lsq_result,
    )


@dataclass(frozen=True)
class TraceRow:
    k: int
    v_norm: float
    y_inf: float
    err_l2: float | None
    err_linf: float | None
    step_times_us: dict[str, float]

    def total_time_us(self) -> float:
        return float(sum(self.step_times_us.values()))


@dataclass(frozen=True)
class StepBound:
    name: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-12 * max(1.0, abs(self.rhs))


def iteration_diagnostics(state: RecoveryState, truth, noise) -> tuple[StepBound, ...]:
    """Per-iteration audit of the identification / merger / estimation /
    pruning inequalities against a planted s-sparse truth.

    ``state`` must be a completed iteration (k >= 1); the residual is taken
    against the approximation that began the iteration.  The estimation
    inequality assumes the exact least-squares solution, so audit runs
    should use the direct solver.
    """
    if state.k < 1 or state.b is None or state.y is None:
        raise ValueError("diagnostics need a completed iteration")
    x = np.asarray(truth)
    e_norm = float(np.linalg.norm(noise)) if noise is not None else 0.0
    r = x - state.a_prev
    r_off_omega = float(np.linalg.norm(restrict(r, state.omega.complement())))
    r_norm = float(np.linalg.norm(r))
    x_off_t = float(np.linalg.norm(restrict(x, state.T.complement())))
    est_err = float(np.linalg.norm(x - state.b))
    prune_err = float(np.linalg.norm(x - state.a))
    return (
        StepBound("identification", r_off_omega, 0.2223 * r_norm + 2.34 * e_norm),
        StepBound("support_merger", x_off_t, r_off_omega),
        StepBound("estimation", est_err, 1.112 * x_off_t + 1.06 * e_norm),
        StepBound("pruning", prune_err, 2.0 * est_err),
    )


@dataclass(frozen=True)
class RecoveryReport:
    """Audited outcome of one recovery run."""

    approximation: np.ndarray
    support: SupportSet
    iterations_run: int
    halt_reason: str
    trace: tuple[TraceRow, ...]
    step_audits: tuple[tuple[StepBound, ...], ...] = ()
    diverged_iterations: tuple[int, ...] = ()

    @property
    def final_error(self) -> float | None:
        if self.trace and self.trace[-1].err_l2 is not None:
            return self.trace[-1].err_l2
        return None


class SolverFailure(RuntimeError):
    """Least-squares failure surfaced with the iteration index."""

    def __init__(self, iteration: int, cause: Exception):
        self.iteration = iteration
        self.cause = cause
        super().__init__(f"least-squares solver failed at iteration {iteration}: {cause}")


def recover(
    op: SamplingOperator, u, config: RecoveryConfig, truth=None, noise=None
) -> RecoveryReport:
    """Run the loop until a halting rule fires or the iteration cap is hit.

    When ``truth`` is supplied, per-iteration errors are recorded in the
    trace; with ``config.record_diagnostics`` the per-step bound audit runs too
    (requires truth, and uses ``noise`` for the noise-energy terms).
    """
    u = np.asarray(u)
    if u.size != op.m:
        raise ValueError(f"sample vector length {u.size} != m = {op.m}")
    if 4 * config.s > op.n:
        warnings.warn(
            f"4 s = {4 * config.s} exceeds N = {op.n}; recovery guarantees assume 4 s <= N",
            stacklevel=2,
        )
    rules = config.rules()
    proxy_rules = [r for r in rules if isinstance(r, ProxyInfinityNorm)]
    sample_rules = [r for r in rules if isinstance(r, SampleNorm)]
    fixed_rules = [r for r in rules if isinstance(r, FixedIterations)]
    max_iters = config.effective_max_iterations()
    for rule in fixed_rules:
        max_iters = min(max_iters, rule.count)

    state = initial_state(op, u, config.s)
    x = None if truth is None else np.asarray(truth)
    trace: list[TraceRow] = []
    audits: list[tuple[StepBound, ...]] = []
    diverged: list[int] = []
    halt_reason = "max_iterations"

    def fired(check_rules, probe) -> bool:
        return any(check_halt(probe, rule) for rule in check_rules)

    if fired(sample_rules, state):
        return RecoveryReport(state.a, support_of(state.a), 0, "sample_norm", ())
    if max_iters == 0:
        reason = "fixed_iterations" if fixed_rules else "max_iterations"
        return RecoveryReport(state.a, support_of(state.a), 0, reason, ())

    while state.k < max_iters:
        times: dict[str, float] = {}
        tick = time.perf_counter_ns()

        y = op.adjoint(state.v)
        times["proxy"] = (time.perf_counter_ns() - tick) / 1000.0
        if proxy_rules and fired(proxy_rules, replace(state, y=y)):
            halt_reason = "proxy_infinity_norm"
            break

        tick = time.perf_counter_ns()
        identify_width, prune_width = config.widths(op.n)
        omega = identify(y, identify_width)
        times["identify"] = (time.perf_counter_ns() - tick) / 1000.0

        tick = time.perf_counter_ns()
        T = merge_support(omega, support_of(state.a))
        times["merge"] = (time.perf_counter_ns() - tick) / 1000.0

        tick = time.perf_counter_ns()
        try:
            b, lsq_result = _estimate(op, T, u, state.a, config)
        except np.linalg.LinAlgError as exc:
            raise SolverFailure(state.k + 1, exc) from exc
        times["estimate"] = (time.perf_counter_ns() - tick) / 1000.0

        tick = time.perf_counter_ns()
        a_next, _ = best_s_approx(b, prune_width)
        times["prune"] = (time.perf_counter_ns() - tick) / 1000.0

        tick = time.perf_counter_ns()
        v_next = u - op.apply(a_next)
        times["update"] = (time.perf_counter_ns() - tick) / 1000.0

        state = RecoveryState(
            k=state.k + 1,
            s=state.s,
            a=a_next,
            a_prev=state.a,
            v=v_next,
            y=y,
            omega=omega,
            T=T,
            b=b,
            lsq_result=lsq_result,
        )
        if lsq_result is not None and lsq_result.diverged:
            diverged.append(state.k)

        err_l2 = err_linf = None
        if x is not None:
            diff = x - state.a
            err_l2 = float(np.linalg.norm(diff))
            err_linf = float(np.abs(diff).max()) if diff.size else 0.0
        y_inf = float(np.abs(y).max()) if y.size else 0.0
        trace.append(
            TraceRow(state.k, float(np.linalg.norm(state.v)), y_inf, err_l2, err_linf, times)
        )
        if config.record_diagnostics and x is not None:
            audits.append(iteration_diagnostics(state, x, noise))

        if fired(sample_rules, state):
            halt_reason = "sample_norm"
            break
        if fixed_rules and any(state.k >= rule.count for rule in fixed_rules):
            halt_reason = "fixed_iterations"
            break

    return RecoveryReport(
        approximation=state.a,
        support=support_of(state.a),
        iterations_run=state.k,
        halt_reason=halt_reason,
        trace=tuple(trace),
        step_audits=tuple(audits),
        diverged_iterations=tuple(diverged),
    )
