"""Vector arithmetic, supports, and best-s-term selection."""

import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosamp.signals import (
    SupportSet,
    as_samples,
    as_signal,
    best_s_approx,
    embed,
    head_tail_l1_bound,
    norms,
    restrict,
    support_of,
)
from cosamp import prng


def brute_force_best_support(x, s):
    """Exhaustive search over all supports of size s for the l2-best one."""
    best_err, best_T = None, None
    for T in combinations(range(len(x)), s):
        z = np.zeros_like(x)
        idx = list(T)
        z[idx] = x[idx]
        err = np.linalg.norm(x - z)
        if best_err is None or err < best_err - 1e-15:
            best_err, best_T = err, T
    return best_err, best_T


class TestBestSApprox:
    def test_magnitude_order(self):
        xs, supp = best_s_approx(np.array([3.0, -2.0, 1.0]), 2)
        assert np.array_equal(xs, [3.0, -2.0, 0.0])
        assert list(supp) == [0, 1]

    def test_lexicographic_tie_break(self):
        _, supp = best_s_approx(np.ones(4), 2)
        assert list(supp) == [0, 1]

    def test_matches_brute_force_oracle(self):
        x = prng.normals(314, 16)
        xs, supp = best_s_approx(x, 4)
        oracle_err, _ = brute_force_best_support(x, 4)
        assert np.linalg.norm(x - xs) == pytest.approx(oracle_err, rel=1e-14)

    def test_zero_sparsity(self):
        xs, supp = best_s_approx(np.array([1.0, 2.0]), 0)
        assert not xs.any() and len(supp) == 0

    def test_support_excludes_exact_zeros(self):
        xs, supp = best_s_approx(np.array([0.0, 5.0, 0.0]), 3)
        assert list(supp) == [1]

    def test_complex_magnitudes(self):
        x = np.array([1 + 1j, 2.0, 0.5j])
        xs, supp = best_s_approx(x, 1)
        assert list(supp) == [1]
        assert xs[1] == 2.0

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=12),
        st.integers(0, 3),
    )
    def test_optimal_among_all_sparse(self, entries, s):
        x = np.array(entries)
        s = min(s, x.size)
        xs, _ = best_s_approx(x, s)
        err = np.linalg.norm(x - xs)
        for T in combinations(range(x.size), s):
            z = np.zeros_like(x)
            z[list(T)] = x[list(T)]
            assert err <= np.linalg.norm(x - z) + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=20),
        st.integers(1, 8),
    )
    def test_head_tail_bound(self, entries, t):
        x = np.array(entries)
        xs, _ = best_s_approx(x, t)
        assert np.linalg.norm(x - xs) <= head_tail_l1_bound(x, t) + 1e-12


class TestRestrict:
    def test_single_index(self):
        T = SupportSet(np.array([1]), 3)
        assert np.array_equal(restrict(np.array([5.0, 6.0, 7.0]), T), [0.0, 6.0, 0.0])

    def test_full_set_identity(self):
        x = prng.normals(7, 6)
        assert np.array_equal(restrict(x, SupportSet.full(6)), x)

    def test_empty_set_zero(self):
        x = prng.normals(8, 6)
        assert not restrict(x, SupportSet.empty(6)).any()

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            restrict(np.zeros(4), SupportSet.empty(5))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=16), st.data())
    def test_partition_is_exact(self, entries, data):
        x = np.array(entries)
        subset = data.draw(st.sets(st.integers(0, x.size - 1)))
        T = SupportSet(np.array(sorted(subset), dtype=np.int64), x.size)
        assert np.array_equal(restrict(x, T) + restrict(x, T.complement()), x)


class TestNorms:
    def test_three_four_five(self):
        assert norms(np.array([3.0, 4.0])) == (7.0, 5.0, 4.0, 2)

    def test_zero_vector(self):
        assert norms(np.zeros(5)) == (0.0, 0.0, 0.0, 0)

    def test_l2_against_compensated_summation(self):
        x = prng.normals(999, 257)
        expected = math.sqrt(math.fsum(float(v) ** 2 for v in x))
        assert norms(x).l2 == pytest.approx(expected, rel=1e-13)

    def test_l0_counts_exact_nonzeros(self):
        assert norms(np.array([0.0, 1e-300, -2.0])).l0 == 2


class TestValidators:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            as_signal([1.0, float("nan")])

    def test_rejects_inf_samples(self):
        with pytest.raises(ValueError):
            as_samples([float("inf")])

    def test_rejects_complex_nan(self):
        with pytest.raises(ValueError):
            as_signal(np.array([1.0 + 1j * float("nan")]))

    def test_read_only(self):
        x = as_signal([1.0, 2.0])
        with pytest.raises(ValueError):
            x[0] = 3.0

    def test_length_check(self):
        with pytest.raises(ValueError):
            as_signal([1.0, 2.0], n=3)


class TestRealComplexAgreement:
    def test_real_and_complex_paths_agree(self):
        # the real fast path must match the complex path to 1e-12 relative
        x_real = prng.normals(77, 32)
        x_complex = x_real.astype(np.complex128)
        for s in (0, 3, 7):
            real_s, real_supp = best_s_approx(x_real, s)
            complex_s, complex_supp = best_s_approx(x_complex, s)
            assert real_supp == complex_supp
            assert np.linalg.norm(real_s - complex_s) <= 1e-12 * max(np.linalg.norm(real_s), 1e-30)
        nr, nc = norms(x_real), norms(x_complex)
        for a, b in zip(nr[:3], nc[:3]):
            assert abs(a - b) <= 1e-12 * max(abs(a), 1e-30)
        assert nr.l0 == nc.l0


class TestSupportSet:
    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            SupportSet(np.array([1, 1]), 4)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            SupportSet(np.array([4]), 4)

    def test_union_and_complement(self):
        a = SupportSet(np.array([1, 5]), 10)
        b = SupportSet(np.array([2, 5, 9]), 10)
        assert list(a.union(b)) == [1, 2, 5, 9]
        assert list(a.complement()) == [0, 2, 3, 4, 6, 7, 8, 9]

    def test_from_any_sorts_and_dedupes(self):
        assert list(SupportSet.from_any([3, 1, 3], 5)) == [1, 3]

    def test_embed_inverts_restriction(self):
        T = SupportSet(np.array([0, 2]), 4)
        x = embed(np.array([1.5, -2.5]), T)
        assert np.array_equal(x, [1.5, 0.0, -2.5, 0.0])
        assert support_of(x) == T
