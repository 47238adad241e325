import numpy as np
import pytest
import scipy.linalg

from sparse_expsum.aak import hankel_con_eigen
from sparse_expsum.core import ExponentialSum, sample
from sparse_expsum.errors import NumericalError, ValidationError
from sparse_expsum.oracle import (
    blaschke_coefficients,
    g_sequence,
    toeplitz_isometry_defect,
    truncated_hankel_singular_values,
    truncated_rank,
    unimodularity_defect,
    verify_aak,
)
from sparse_expsum.prony import recover_detailed

from conftest import random_sum


class TestTruncatedHankel:
    def test_rank_one(self):
        sv = truncated_hankel_singular_values(ExponentialSum([1], [0.5]), 50)
        assert sv[0] == pytest.approx(4 / 3, rel=1e-10)
        assert np.all(sv[1:] <= 1e-12)

    def test_zero(self):
        assert np.all(truncated_hankel_singular_values(ExponentialSum(), 10) == 0)
        assert truncated_rank(ExponentialSum(), 10) == 0

    def test_example1_matches_con_eigen(self, ex1):
        sv = truncated_hankel_singular_values(ex1, 500)[:10]
        np.testing.assert_allclose(sv, hankel_con_eigen(ex1).sigmas, rtol=1e-6)

    def test_monotone_in_m(self, ex1):
        sig = hankel_con_eigen(ex1).sigmas
        prev = np.zeros(10)
        for m in (10, 20, 40, 80):
            sv = truncated_hankel_singular_values(ex1, m)[:10]
            assert np.all(sv >= prev - 1e-14 * sig[0])
            assert np.all(sv <= sig * (1 + 1e-10) + 1e-14 * sig[0])
            prev = sv

    def test_ranks(self, ex1, ex2):
        assert truncated_rank(ExponentialSum([1, 1], [0.5, -0.3]), 40, 1e-10) == 2
        # sigma_9 / sigma_0 = 2.4e-11, so a relative 1e-10 cut drops one
        assert truncated_rank(ex1, 100, 1e-10) == 9
        assert truncated_rank(ex1, 100, 1e-12) == 10
        assert truncated_rank(ex1, 100, 1e-10, relative=False) == 10
        assert truncated_rank(ex2, 150, 1e-8, relative=False) == 11

    def test_kronecker_random(self, rng):
        for _ in range(10):
            s = random_sum(rng, int(rng.integers(1, 7)), rmax=0.85)
            assert truncated_rank(s, max(4 * s.order, 40), 1e-10) == s.order


class TestBlaschke:
    def test_trivial(self):
        np.testing.assert_array_equal(blaschke_coefficients([], 4), [1, 0, 0, 0])
        np.testing.assert_allclose(blaschke_coefficients([0.0], 4), [0, 1, 0, 0])
        np.testing.assert_allclose(blaschke_coefficients([0.5], 4), [-0.5, 0.75, 0.375, 0.1875])

    def test_rejects(self):
        with pytest.raises(ValidationError):
            blaschke_coefficients([1.0], 4)

    def test_isometry(self):
        assert toeplitz_isometry_defect(np.r_[1.0, np.zeros(9)], 5) == 0
        assert toeplitz_isometry_defect(blaschke_coefficients([0.5], 2000), 500) <= 1e-10
        assert toeplitz_isometry_defect(np.r_[0.5, np.zeros(9)], 5) == pytest.approx(0.75)

    def test_defect_decays(self):
        al = [0.8, -0.3j]
        d = [toeplitz_isometry_defect(blaschke_coefficients(al, m + L), m) for m, L in
             [(20, 10), (20, 40), (20, 80)]]
        assert d[0] > d[1] > d[2]
        # geometric rate max |alpha|
        assert d[2] <= 10 * d[1] * 0.8 ** (2 * 40) + 1e-15


class TestZeroKernel:
    def test_prony_vector_annihilates(self, rng):
        for _ in range(5):
            s = random_sum(rng, 4, rmax=0.8)
            b = recover_detailed(sample(s, 20)).prony_coefficients
            # P_conj(v)(z_j) = 0 when conj(v) = b, so Gamma_f conj(v) vanishes
            m = 200
            f = sample(s, 2 * m - 2).values
            H = scipy.linalg.hankel(f[:m], f[m - 1:])
            v = np.conj(np.r_[b, np.zeros(m - b.size)])
            assert np.linalg.norm(H @ np.conj(v)) <= 1e-8 * np.linalg.norm(v)
            w = rng.normal(size=m) + 1j * rng.normal(size=m)
            assert np.linalg.norm(H @ np.conj(w)) > 1e-3 * np.linalg.norm(w)


class TestGSequence:
    def test_single_relation(self):
        # Gamma_g conj(v) = sigma_0 v on a 200-term truncation
        s = ExponentialSum([1], [0.5])
        g = g_sequence(s, 0, 400)
        v = 0.5 ** np.arange(200)  # P_v(z) = 1/(1 - z/2) up to phase
        H = scipy.linalg.hankel(g[:200], g[199:399])
        lhs = H @ np.conj(v)
        lam = lhs[0] / v[0]
        assert abs(lam) == pytest.approx(4 / 3, rel=1e-10)
        assert np.linalg.norm(lhs - lam * v) <= 1e-10

    def test_parseval(self, ex1):
        sy = hankel_con_eigen(ex1)
        for K in (1, 5):
            g = g_sequence(ex1, K, 512, system=sy)
            assert np.sum(np.abs(g) ** 2) <= sy.sigmas[K] ** 2 * (1 + 1e-10)

    def test_unimodular(self, ex1):
        for K in range(10):
            assert unimodularity_defect(ex1, K) <= 1e-10

    def test_grid_check(self, ex1):
        with pytest.raises(ValidationError):
            g_sequence(ex1, 5, 100, grid=100)

    def test_aliasing_detected(self, ex2):
        # Example 2 nodes crowd towards 1, so 8 points per term are not enough
        with pytest.raises(NumericalError):
            g_sequence(ex2, 5, 16)

    def test_residual_rank_example1(self, ex1):
        m = 150
        g = g_sequence(ex1, 5, 2 * m - 1)
        f = sample(ex1, 2 * m - 2).values
        sv = scipy.linalg.svdvals(scipy.linalg.hankel((f - g)[:m], (f - g)[m - 1:]))
        assert np.sum(sv > 1e-6 * sv[0]) == 5


class TestVerify:
    def test_single(self):
        rep = verify_aak(ExponentialSum([1], [0.5]), 0, 200)
        assert 4 / 3 - 1e-6 <= rep.gamma_g_norm_estimate <= 4 / 3 + 1e-12
        assert rep.residual_rank == 0 and rep.error_bound_holds

    def test_example1(self, ex1):
        rep = verify_aak(ex1, 5, 400)
        assert rep.residual_rank == 5
        assert rep.gamma_g_norm_estimate == pytest.approx(rep.sigma_K, abs=1e-8)
        # printed inputs carry 4 decimals; the printed sigma_5 agrees to 3 digits
        assert rep.gamma_g_norm_estimate == pytest.approx(7.8571e-05, rel=5e-4)
        assert rep.truncation_size == 400

    def test_random_n4(self, rng):
        s = random_sum(rng, 4, rmax=0.8)
        sy = hankel_con_eigen(s)
        for K in range(4):
            if sy.simplicity_flags[K]:
                assert verify_aak(s, K, 64).error_bound_holds

    def test_small_m(self, ex1):
        with pytest.raises(ValidationError):
            verify_aak(ex1, 5, 20)
