"""Iterative least-squares solvers against the direct reference."""

import numpy as np
import pytest

from conftest import gated_operator, planted_instance
from cosamp import prng
from cosamp.lsq import (
    LsqConfig,
    RankDeficiencyError,
    cg_solve,
    direct_solve,
    richardson_solve,
    solve,
)
from cosamp.operators import dense_operator, gaussian_operator, identity_operator
from cosamp.rip import gram_deviation
from cosamp.signals import SupportSet


def orthonormal_op(n=8, cols=8, seed=0):
    g = prng.normals(seed, n * n).reshape(n, n)
    q, _ = np.linalg.qr(g)
    return dense_operator(q[:, :cols])


class TestRichardson:
    def test_orthonormal_columns_one_step_exact(self):
        op = orthonormal_op()
        T = SupportSet(np.array([1, 4, 6]), op.n)
        u = prng.normals(5, op.m)
        exact = op.adjoint_sub(T, u)
        z0 = prng.normals(6, 3)  # arbitrary start: M = 0 kills it in one step
        result = richardson_solve(op, T, u, z0, iterations=1)
        assert np.allclose(result.coefficients, exact, rtol=1e-12, atol=1e-14)

    def test_exact_solution_is_fixed_point(self):
        op = gaussian_operator(16, 32, seed=2)
        T = SupportSet(np.array([3, 8, 20]), 32)
        u = prng.normals(7, 16)
        z_star = direct_solve(op, T, u).coefficients
        result = richardson_solve(op, T, u, z_star, iterations=5)
        assert np.allclose(result.coefficients, z_star, rtol=1e-10, atol=1e-12)

    def test_converges_to_direct_reference(self):
        op = gaussian_operator(32, 64, seed=1)
        T = SupportSet(prng.sample_without_replacement(prng.mix_seed(1, 9), 64, 6), 64)
        assert gram_deviation(op, T) < 0.45  # contraction fast enough for 1e-8 in 25
        u = prng.normals(prng.mix_seed(1, 10), 32)
        want = direct_solve(op, T, u).coefficients
        got = richardson_solve(op, T, u, None, iterations=25).coefficients
        assert np.linalg.norm(got - want) <= 1e-8 * np.linalg.norm(want)

    def test_contraction_ratio_bounded_by_gram_norm(self):
        op = gated_operator(16, seed=3)
        T = SupportSet(np.array([0, 4, 7, 11, 13]), 16)
        dev = gram_deviation(op, T)
        assert dev < 1
        u = prng.normals(11, 16)
        z_star = direct_solve(op, T, u).coefficients
        errors = [np.linalg.norm(np.zeros(5) - z_star)]
        for ell in range(1, 6):
            z = richardson_solve(op, T, u, None, iterations=ell).coefficients
            errors.append(np.linalg.norm(z - z_star))
        for prev, cur in zip(errors, errors[1:]):
            if prev > 1e-12 * np.linalg.norm(z_star):
                assert cur <= prev * (dev + 1e-10)

    def test_divergence_flagged_not_raised(self):
        op = dense_operator(3.0 * np.eye(4))  # ||Gram - I|| = 8: Richardson blows up
        T = SupportSet(np.array([0, 1]), 4)
        u = np.ones(4)
        result = richardson_solve(op, T, u, None, iterations=12)
        assert result.diverged

    def test_rejects_empty_support(self):
        with pytest.raises(ValueError):
            richardson_solve(identity_operator(4), SupportSet.empty(4), np.ones(4))


class TestConjugateGradient:
    def test_singleton_support_one_iteration(self):
        op = gaussian_operator(8, 16, seed=4)
        T = SupportSet(np.array([5]), 16)
        u = prng.normals(12, 8)
        want = direct_solve(op, T, u).coefficients
        got = cg_solve(op, T, u, None, iterations=1)
        assert np.allclose(got.coefficients, want, rtol=1e-12, atol=1e-14)
        assert got.iterations_used == 1

    def test_exact_solution_is_fixed_point(self):
        op = gaussian_operator(16, 32, seed=5)
        T = SupportSet(np.array([0, 9, 17, 30]), 32)
        u = prng.normals(13, 16)
        z_star = direct_solve(op, T, u).coefficients
        result = cg_solve(op, T, u, z_star, iterations=4)
        assert np.allclose(result.coefficients, z_star, rtol=1e-9, atol=1e-12)

    def test_finite_termination_matches_direct(self):
        op = gaussian_operator(24, 48, seed=6)
        T = SupportSet(np.array([2, 11, 23, 31, 40]), 48)
        u = prng.normals(14, 24)
        want = direct_solve(op, T, u).coefficients
        got = cg_solve(op, T, u, None, iterations=len(T)).coefficients
        assert np.linalg.norm(got - want) <= 1e-8 * np.linalg.norm(want)

    def test_error_bound_from_condition_number(self):
        op = gated_operator(16, seed=8)
        T = SupportSet(np.array([1, 3, 6, 10, 14]), 16)
        cols = op.matrix[:, T.indices]
        eigs = np.linalg.eigvalsh(cols.T @ cols)
        kappa = eigs[-1] / eigs[0]
        rho = (np.sqrt(kappa) - 1) / (np.sqrt(kappa) + 1)
        u = prng.normals(15, 16)
        z_star = direct_solve(op, T, u).coefficients
        start_err = np.linalg.norm(z_star)
        for ell in range(1, 5):
            z = cg_solve(op, T, u, None, iterations=ell).coefficients
            assert np.linalg.norm(z - z_star) <= 2 * rho**ell * start_err + 1e-12

    def test_complex_instance(self):
        op = __import__("cosamp").partial_fourier_operator(8, 16, seed=3)
        T = SupportSet(np.array([2, 7, 12]), 16)
        u = prng.complex_normals(16, 8)
        want = direct_solve(op, T, u).coefficients
        got = cg_solve(op, T, u, None, iterations=6).coefficients
        assert np.linalg.norm(got - want) <= 1e-8 * np.linalg.norm(want)


class TestDirect:
    def test_identity_restricts_samples(self):
        op = identity_operator(6)
        T = SupportSet(np.array([1, 4]), 6)
        u = prng.normals(17, 6)
        result = direct_solve(op, T, u)
        assert np.allclose(result.coefficients, u[[1, 4]], rtol=1e-14, atol=0)

    def test_orthonormal_columns_give_adjoint(self):
        op = orthonormal_op(seed=18)
        T = SupportSet(np.array([0, 2, 5]), op.n)
        u = prng.normals(19, op.m)
        result = direct_solve(op, T, u)
        assert np.allclose(result.coefficients, op.adjoint_sub(T, u), rtol=1e-12, atol=1e-14)

    def test_normal_equation_residual_vanishes(self):
        op = gaussian_operator(12, 20, seed=20)
        T = SupportSet(np.array([0, 3, 9, 15]), 20)
        u = prng.normals(21, 12)
        z = direct_solve(op, T, u).coefficients
        residual = op.adjoint_sub(T, u - op.apply_sub(T, z))
        assert np.linalg.norm(residual) <= 1e-10

    def test_rank_deficiency_reports_eigenvalue(self):
        mat = prng.normals(22, 6 * 8).reshape(6, 8)
        mat[:, 4] = mat[:, 1]
        op = dense_operator(mat)
        T = SupportSet(np.array([1, 4]), 8)
        with pytest.raises(RankDeficiencyError) as excinfo:
            direct_solve(op, T, np.ones(6))
        assert excinfo.value.smallest_eigenvalue <= 1e-12


class TestDispatch:
    def test_solver_names(self):
        op = gated_operator(16, seed=23)  # contraction certain: every delta < 0.1
        T = SupportSet(np.array([4, 9]), 16)
        u = prng.normals(24, 16)
        want = direct_solve(op, T, u).coefficients
        for name in ("richardson", "cg", "direct"):
            cfg = LsqConfig(solver=name, iterations=30)
            got = solve(op, T, u, None, cfg).coefficients
            assert np.linalg.norm(got - want) <= 1e-8 * np.linalg.norm(want)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LsqConfig(solver="qr")
        with pytest.raises(ValueError):
            LsqConfig(iterations=0)
        with pytest.raises(ValueError):
            LsqConfig(warm_start="previous")


class TestWarmStartBound:
    def test_initial_iterate_distance(self, gated_16):
        # on a gated instance the merged-support LS solution stays within
        # 2.112 ||x - a|| + 1.06 ||e|| of the incoming approximation
        op, _ = gated_16
        import cosamp

        x, e, u = planted_instance(op, 2, seed=30, noise_norm=0.05)
        config = cosamp.RecoveryConfig(s=2, lsq=LsqConfig(solver="direct"))
        state = cosamp.initial_state(op, u, 2)
        for _ in range(6):
            state = cosamp.cosamp_iteration(state, op, u, config)
            a_prev_on_t = state.a_prev[state.T.indices]
            z_star = direct_solve(op, state.T, u).coefficients
            lhs = np.linalg.norm(a_prev_on_t - z_star)
            rhs = 2.112 * np.linalg.norm(x - state.a_prev) + 1.06 * np.linalg.norm(e)
            assert lhs <= rhs + 1e-12
