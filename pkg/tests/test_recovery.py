"""The recovery loop: identification, merging, iteration invariants,
halting rules, diagnostics, and determinism."""

import tracemalloc

import numpy as np
import pytest

import cosamp
from conftest import gated_operator, planted_instance
from cosamp import prng
from cosamp.lsq import LsqConfig
from cosamp.recovery import (
    FixedIterations,
    ProxyInfinityNorm,
    RecoveryConfig,
    SampleNorm,
    SolverFailure,
    check_halt,
    cosamp_iteration,
    identify,
    initial_state,
    iteration_diagnostics,
    merge_support,
    recover,
)
from cosamp.signals import SupportSet, support_of


class TestIdentify:
    def test_exact_nonzero_count(self):
        y = np.zeros(16)
        y[[2, 5, 9, 11]] = [1.0, -2.0, 0.5, 3.0]
        assert list(identify(y, 4)) == [2, 5, 9, 11]

    def test_all_equal_magnitudes_take_lowest_indices(self):
        assert list(identify(np.ones(10), 6)) == [0, 1, 2, 3, 4, 5]

    def test_matches_full_sort_oracle(self):
        y = prng.normals(404, 32)
        width = 8
        order = sorted(range(32), key=lambda i: (-abs(y[i]), i))
        assert list(identify(y, width)) == sorted(order[:width])

    def test_zero_proxy_gives_empty_set(self):
        assert len(identify(np.zeros(8), 4)) == 0


class TestMergeSupport:
    def test_empty_previous(self):
        omega = SupportSet(np.array([1, 3]), 8)
        assert merge_support(omega, SupportSet.empty(8)) == omega

    def test_idempotent(self):
        omega = SupportSet(np.array([2, 6]), 8)
        assert merge_support(omega, omega) == omega

    def test_sorted_union(self):
        a = SupportSet(np.array([1, 5]), 10)
        b = SupportSet(np.array([2, 5, 9]), 10)
        assert list(merge_support(a, b)) == [1, 2, 5, 9]


class TestIterationInvariants:
    def test_identity_recovers_in_one_iteration_exactly(self):
        op = cosamp.identity_operator(12)
        x = np.zeros(12)
        x[[1, 7]] = [2.0, -3.0]
        state = initial_state(op, x, 2)
        state = cosamp_iteration(state, op, x, RecoveryConfig(s=2))
        assert np.array_equal(state.a, x)
        assert not state.v.any()

    def test_zero_signal_stays_zero(self):
        op = cosamp.gaussian_operator(8, 16, seed=1)
        u = np.zeros(8)
        state = initial_state(op, u, 2)
        for _ in range(3):
            state = cosamp_iteration(state, op, u, RecoveryConfig(s=2))
            assert not state.a.any()
            assert not state.v.any()

    def test_cardinality_and_sample_identity(self):
        op = cosamp.gaussian_operator(32, 64, seed=2)
        x, _, u = planted_instance(op, 3, seed=40)
        config = RecoveryConfig(s=3)
        state = initial_state(op, u, 3)
        for _ in range(8):
            state = cosamp_iteration(state, op, u, config)
            assert len(state.omega) <= 2 * 3
            assert len(state.T) <= 3 * 3
            assert support_of(state.a).indices.size <= 3
            recomputed = u - op.apply(state.a)
            scale = max(np.linalg.norm(u), 1.0)
            assert np.linalg.norm(state.v - recomputed) <= 1e-12 * scale

    def test_zero_proxy_keeps_current_approximation(self):
        # consistent samples make v = 0, the proxy vanish, and the iteration
        # complete as a no-op
        from dataclasses import replace

        op = cosamp.gaussian_operator(16, 32, seed=14)
        a = cosamp.make_sparse(32, 2, "flat", position_seed=15, sign_seed=16)
        u = op.apply(a)
        state = replace(initial_state(op, u, 2), a=a, a_prev=a, v=u - op.apply(a))
        assert not state.v.any()  # bitwise zero: same computation both times
        follow = cosamp_iteration(state, op, u, RecoveryConfig(s=2))
        assert len(follow.omega) == 0
        assert np.array_equal(follow.a, a)
        assert not follow.v.any()

    def test_planted_error_sequence_converges(self):
        op = cosamp.gaussian_operator(32, 64, seed=3)
        x, _, u = planted_instance(op, 3, seed=41)
        report = recover(op, u, RecoveryConfig(s=3, halting=FixedIterations(20)), truth=x)
        errors = [row.err_l2 for row in report.trace]
        assert min(errors) <= 1e-6 * np.linalg.norm(x)
        reached = next(i for i, e in enumerate(errors) if e <= 1e-6 * np.linalg.norm(x))
        assert reached < 20
        for prev, cur in zip(errors[:reached], errors[1 : reached + 1]):
            assert cur <= prev + 1e-12


class TestRecover:
    def test_fixed_zero_iterations_returns_zero(self):
        op = cosamp.gaussian_operator(8, 16, seed=4)
        report = recover(op, np.ones(8), RecoveryConfig(s=2, halting=FixedIterations(0)))
        assert not report.approximation.any()
        assert report.iterations_run == 0
        assert report.halt_reason == "fixed_iterations"

    def test_zero_samples_halt_immediately(self):
        op = cosamp.gaussian_operator(8, 16, seed=5)
        report = recover(op, np.zeros(8), RecoveryConfig(s=2, halting=SampleNorm(1e-6)))
        assert report.iterations_run == 0
        assert report.halt_reason == "sample_norm"
        assert not report.approximation.any()

    def test_default_cap_is_six_s_plus_one(self):
        op = cosamp.gaussian_operator(8, 64, seed=6)
        u = op.apply(prng.normals(42, 64))  # dense target: never converges exactly
        report = recover(op, u, RecoveryConfig(s=2))
        assert report.iterations_run == 6 * 3
        assert report.halt_reason == "max_iterations"

    def test_warns_when_undersampled_in_sparsity(self):
        op = cosamp.gaussian_operator(8, 16, seed=7)
        with pytest.warns(UserWarning, match="4 s"):
            recover(op, np.ones(8), RecoveryConfig(s=5, halting=FixedIterations(1)))

    def test_deterministic_reports(self):
        op = cosamp.gaussian_operator(32, 64, seed=8)
        x, _, u = planted_instance(op, 3, seed=42)
        cfg = RecoveryConfig(s=3, halting=[SampleNorm(1e-9), FixedIterations(30)])
        a = recover(op, u, cfg, truth=x)
        b = recover(op, u, cfg, truth=x)
        assert np.array_equal(a.approximation, b.approximation)
        assert a.iterations_run == b.iterations_run
        assert a.halt_reason == b.halt_reason
        assert [r.v_norm for r in a.trace] == [r.v_norm for r in b.trace]
        assert [r.err_l2 for r in a.trace] == [r.err_l2 for r in b.trace]

    def test_solver_failure_carries_iteration(self):
        mat = prng.normals(43, 8 * 16).reshape(8, 16)
        mat[:, 1] = mat[:, 0]  # identical columns make the Gram singular
        op = cosamp.dense_operator(mat)
        u = op.apply(np.eye(16)[0] + np.eye(16)[1])
        cfg = RecoveryConfig(s=2, lsq=LsqConfig(solver="direct"))
        with pytest.raises(SolverFailure) as excinfo:
            recover(op, u, cfg)
        assert excinfo.value.iteration == 1

    def test_noise_floor_on_gated_instance(self, gated_16):
        op, delta = gated_16
        assert delta <= 0.1
        x, e, u = planted_instance(op, 2, seed=48, noise_norm=0.1)
        report = recover(op, u, RecoveryConfig(s=2, halting=FixedIterations(20)))
        assert np.linalg.norm(x - report.approximation) <= 15 * np.linalg.norm(e)

    def test_solver_equivalence_on_well_conditioned_instance(self):
        op = gated_operator(16, seed=9)
        x, _, u = planted_instance(op, 2, seed=43)
        outputs = []
        for solver in ("richardson", "cg", "direct"):
            cfg = RecoveryConfig(
                s=2,
                halting=FixedIterations(10),
                lsq=LsqConfig(solver=solver, iterations=25),
            )
            outputs.append(recover(op, u, cfg).approximation)
        scale = np.linalg.norm(x)
        for first in outputs:
            for second in outputs:
                assert np.linalg.norm(first - second) <= 1e-6 * scale

    def test_storage_stays_linear_in_signal_length(self):
        n, m, s = 4096, 1024, 8
        op = cosamp.partial_fourier_operator(m, n, seed=10)
        x = cosamp.make_sparse(n, s, "flat", position_seed=1, sign_seed=2)
        u = op.apply(x)
        cfg = RecoveryConfig(s=s, halting=FixedIterations(5))
        recover(op, u, cfg)  # warm any lazy allocations
        tracemalloc.start()
        recover(op, u, cfg)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        # a dense materialization would need m*n*16 = 67 MB; O(N) scratch stays far below
        assert peak < 50 * n * 16


class TestHaltingRules:
    def test_sample_norm_fires_on_zero(self):
        op = cosamp.identity_operator(4)
        state = initial_state(op, np.zeros(4), 1)
        assert check_halt(state, SampleNorm(0.0))

    def test_sample_norm_zero_epsilon_needs_zero_norm(self):
        op = cosamp.identity_operator(4)
        state = initial_state(op, np.ones(4), 1)
        assert not check_halt(state, SampleNorm(0.0))

    def test_proxy_rule_threshold(self):
        op = cosamp.identity_operator(8)
        state = initial_state(op, np.zeros(8), 2)
        probe = type(state)(
            k=1, s=2, a=state.a, a_prev=state.a_prev, v=state.v,
            y=np.full(8, 0.2), omega=state.omega, T=state.T, b=None,
        )
        eta = 0.2 * np.sqrt(4.0)  # threshold: ||y||_inf <= eta / sqrt(2 s)
        assert check_halt(probe, ProxyInfinityNorm(eta))
        assert not check_halt(probe, ProxyInfinityNorm(eta * 0.99))

    def test_proxy_halt_keeps_certified_approximation(self):
        # once the proxy is tiny, the loop stops before touching `a`
        op = cosamp.identity_operator(8)
        x = np.zeros(8)
        x[3] = 1.0
        u = x.copy()
        cfg = RecoveryConfig(s=1, halting=ProxyInfinityNorm(1e6))
        report = recover(op, u, cfg)
        assert report.halt_reason == "proxy_infinity_norm"
        assert report.iterations_run == 0

    def test_fixed_iterations_reason(self):
        op = cosamp.gaussian_operator(16, 32, seed=11)
        x, _, u = planted_instance(op, 2, seed=44)
        report = recover(op, u, RecoveryConfig(s=2, halting=FixedIterations(4)))
        assert report.iterations_run == 4
        assert report.halt_reason == "fixed_iterations"

    def test_any_rule_triggers(self):
        op = cosamp.gaussian_operator(32, 64, seed=12)
        x, _, u = planted_instance(op, 3, seed=45)
        cfg = RecoveryConfig(s=3, halting=[FixedIterations(40), SampleNorm(1e-8)])
        report = recover(op, u, cfg, truth=x)
        assert report.halt_reason == "sample_norm"
        assert report.iterations_run < 40


class TestDiagnostics:
    def test_identity_instance_all_hold_with_slack(self):
        op = cosamp.identity_operator(12)
        x = np.zeros(12)
        x[[2, 9]] = [1.0, -0.5]
        cfg = RecoveryConfig(s=2, halting=FixedIterations(2), record_diagnostics=True,
                             lsq=LsqConfig(solver="direct"))
        report = recover(op, x.copy(), cfg, truth=x)
        assert report.step_audits
        for margins in report.step_audits:
            for margin in margins:
                assert margin.holds

    def test_merger_inequality_unconditional(self):
        # holds on any instance: T^c is contained in Omega^c
        op = cosamp.gaussian_operator(8, 24, seed=13)
        x = prng.normals(46, 24)
        u = op.apply(x)
        state = initial_state(op, u, 2)
        for _ in range(5):
            state = cosamp_iteration(state, op, u, RecoveryConfig(s=2))
            margins = {m.name: m for m in iteration_diagnostics(state, x, None)}
            assert margins["support_merger"].holds

    def test_gated_instance_full_chain(self, gated_16):
        op, delta = gated_16
        assert delta <= 0.1
        x, e, u = planted_instance(op, 2, seed=47, noise_norm=0.02)
        cfg = RecoveryConfig(s=2, lsq=LsqConfig(solver="direct"))
        state = initial_state(op, u, 2)
        for _ in range(8):
            state = cosamp_iteration(state, op, u, cfg)
            for margin in iteration_diagnostics(state, x, e):
                assert margin.holds, margin

    def test_requires_completed_iteration(self):
        op = cosamp.identity_operator(4)
        state = initial_state(op, np.ones(4), 1)
        with pytest.raises(ValueError):
            iteration_diagnostics(state, np.ones(4), None)
