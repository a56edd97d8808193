import math
import warnings

import numpy as np
import pytest

from lagmart.blocks import BlockScheme, LagSpec, build_fixed_lag_blocks
from lagmart.ma import MovingAverageMoments, generate_ma_process
from lagmart.variance import (
    ArrayMoments,
    ConstantMoments,
    as_matrix_provider,
    psi_bar,
    psi_block,
    psi_major,
    vn_diagnostic,
)


def brute_force_psi_bar(provider, lag, s, k_n):
    """Independent re-summation with plain (uncompensated) arithmetic."""
    total = 0.0
    for k in range(s, k_n + 1):
        total += provider.var_at(k)
        for l in range(1, min(lag.p_at(k), k - s) + 1):
            total += 2.0 * provider.cov_at(k, l)
    return total


def brute_force_psi_major(provider, scheme, k_n):
    total = 0.0
    j = 1
    while j <= scheme.n_blocks and scheme.a[j - 1] - 1 <= k_n:
        b_j = scheme.b[j - 1]
        for k in range(b_j, scheme.a[j - 1]):
            total += provider.var_at(k)
            for l in range(1, min(scheme.lag.p_at(k), k - b_j) + 1):
                total += 2.0 * provider.cov_at(k, l)
        j += 1
    return total


class TestPsiBlock:
    def test_zero_covariance_gives_d_times_v(self):
        scheme = build_fixed_lag_blocks(p=1, s=2, k_max=60)
        prov = ConstantMoments(var=1.7)
        for j in (1, 2, 3):
            est = psi_block(prov, scheme, j)
            assert est.scalar == pytest.approx(scheme.d(j) * 1.7, rel=1e-14)

    def test_block_start_truncation(self):
        # block k in {2, 3} with p = 1: only k = 3 contributes a covariance pair
        scheme = BlockScheme(start_s=2, b=(2, 5), a=(4, 7), lag=LagSpec.fixed(1))
        c = 0.3
        prov = ConstantMoments(var=1.0, cov_by_lag=[c])
        est = psi_block(prov, scheme, 1)
        assert est.scalar == pytest.approx(2 + 2 * c, rel=1e-14)

    def test_ma1_block_sum_variance_monte_carlo(self):
        # Psi_j equals Var(B_j); check against the sample variance of B_j
        theta = [1.0, 0.8]
        prov = MovingAverageMoments(coeffs=theta, innovations_sd=1.0)
        scheme = build_fixed_lag_blocks(p=1, s=2, k_max=40)
        j = 4
        b_j, a_j = scheme.b[j - 1], scheme.a[j - 1]
        est = psi_block(prov, scheme, j).scalar
        reps = 10_000
        sums = np.empty(reps)
        for r in range(reps):
            path = generate_ma_process(q=1, p=1, coeffs=theta, innovations_sd=1.0,
                                       n=a_j, seed=(5000, r))
            sums[r] = path.values[b_j - path.start : a_j - path.start].sum()
        sample_var = sums.var(ddof=1)
        se = math.sqrt(2.0 / (reps - 1)) * est
        assert abs(sample_var - est) <= 3 * se

    def test_unmaterialized_block_rejected(self):
        scheme = build_fixed_lag_blocks(p=1, s=2, k_max=20)
        with pytest.raises(ValueError, match="not materialized"):
            psi_block(ConstantMoments(var=1.0), scheme, scheme.n_blocks + 1)


class TestPsiMajor:
    def test_single_block_reduction(self):
        scheme = build_fixed_lag_blocks(p=1, s=2, k_max=30)
        prov = ConstantMoments(var=2.0, cov_by_lag=[0.5])
        k_n = scheme.a[0] - 1
        assert psi_major(prov, scheme, k_n).scalar == psi_block(prov, scheme, 1).scalar

    def test_zero_provider(self):
        scheme = build_fixed_lag_blocks(p=1, s=2, k_max=30)
        est = psi_major(ConstantMoments(var=0.0), scheme, 20)
        assert est.scalar == 0.0

    def test_complete_blocks_only(self):
        scheme = BlockScheme(start_s=2, b=(2, 5, 8), a=(4, 7, 10), lag=LagSpec.fixed(1))
        prov = ConstantMoments(var=1.0)
        # k_n = 5: only block 1 complete (2 indices)
        assert psi_major(prov, scheme, 5).scalar == 2.0
        # k_n = 6: blocks 1 and 2 complete
        assert psi_major(prov, scheme, 6).scalar == 4.0


class TestPsiBar:
    def test_pure_variance_sum(self):
        prov = ConstantMoments(var=1.25)
        lag = LagSpec.fixed(2)
        est = psi_bar(prov, lag, s=3, k_n=12)
        assert est.scalar == pytest.approx(10 * 1.25, rel=1e-14)

    def test_start_truncation_hand_case(self):
        # p = 1, s = 2, k_n = 4: covariance pairs only at k = 3, 4
        prov = ConstantMoments(var=1.0, cov_by_lag=[0.25])
        est = psi_bar(prov, LagSpec.fixed(1), s=2, k_n=4)
        assert est.scalar == pytest.approx(3 + 4 * 0.25, rel=1e-14)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            p = int(rng.integers(0, 4))
            lag = LagSpec.fixed(p)
            prov = ConstantMoments(
                var=float(rng.uniform(0.5, 3.0)),
                cov_by_lag=list(rng.uniform(-0.4, 0.4, size=p)),
            )
            s = int(rng.integers(1, 4))
            k_n = s + int(rng.integers(1, 40))
            got = psi_bar(prov, lag, s, k_n).scalar
            want = brute_force_psi_bar(prov, lag, s, k_n)
            assert got == pytest.approx(want, rel=1e-12)

    def test_monte_carlo_sn_variance(self):
        # Var(S_n) over replicates matches the analytic full estimator
        theta = [1.0, 1.0]
        prov = MovingAverageMoments(coeffs=theta, innovations_sd=1.0)
        n = 256
        want = psi_bar(prov, LagSpec.fixed(1), s=2, k_n=n).scalar
        reps = 10_000
        sums = np.empty(reps)
        for r in range(reps):
            path = generate_ma_process(q=1, p=1, coeffs=theta, innovations_sd=1.0,
                                       n=n, seed=(777, r))
            sums[r] = path.values.sum()
        se = math.sqrt(2.0 / (reps - 1)) * want
        assert abs(sums.var(ddof=1) - want) <= 3 * se


class TestStructure:
    def test_symmetry_matrix_case(self):
        th0 = np.array([[1.0, 0.3], [0.0, 0.8]])
        th1 = np.array([[0.4, 0.1], [0.2, 0.5]])
        prov = MovingAverageMoments(coeffs=[th0, th1], innovations_sd=np.eye(2))
        est = psi_bar(prov, LagSpec.fixed(1), s=2, k_n=50)
        m = est.matrix
        assert np.abs(m - m.T).max() <= 1e-12 * np.abs(m).max()

    def test_scalar_and_matrix_paths_bit_identical(self):
        prov = ConstantMoments(var=1.37, cov_by_lag=[0.21, -0.05])
        lag = LagSpec.fixed(2)
        scalar = psi_bar(prov, lag, s=1, k_n=77).scalar
        matrix = psi_bar(as_matrix_provider(prov), lag, s=1, k_n=77).matrix[0, 0]
        assert scalar == matrix  # identical operation sequence, identical bits

    def test_full_minus_major_equals_omitted_terms(self):
        # term-by-term re-summation of the omitted indices and pairs, k_n <= 50
        rng = np.random.default_rng(5)
        for _ in range(10):
            p = int(rng.integers(1, 3))
            scheme = build_fixed_lag_blocks(p=p, s=p + 1, k_max=50)
            prov = ConstantMoments(
                var=float(rng.uniform(0.5, 2.0)),
                cov_by_lag=list(rng.uniform(-0.3, 0.3, size=p)),
            )
            k_n = int(rng.integers(scheme.a[0], 50))
            full = psi_bar(prov, scheme.lag, scheme.start_s, k_n).scalar
            major = psi_major(prov, scheme, k_n).scalar
            want_gap = (
                brute_force_psi_bar(prov, scheme.lag, scheme.start_s, k_n)
                - brute_force_psi_major(prov, scheme, k_n)
            )
            assert full - major == pytest.approx(want_gap, rel=1e-10, abs=1e-12)

    def test_negative_scalar_warns_not_raises(self):
        prov = ConstantMoments(var=0.1, cov_by_lag=[-1.0])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            est = psi_bar(prov, LagSpec.fixed(1), s=2, k_n=10)
        assert est.scalar < 0
        assert any("negative" in str(w.message) for w in caught)


class TestVnDiagnostic:
    def test_zero_provider(self):
        scheme = build_fixed_lag_blocks(p=1, s=2, k_max=40)
        d = vn_diagnostic(ConstantMoments(var=0.0), scheme, scheme.lag, 2, 30)
        assert d.absolute == 0.0
        assert d.normalized == 0.0

    def test_counts_omitted_indices(self):
        scheme = build_fixed_lag_blocks(p=1, s=2, k_max=40)
        prov = ConstantMoments(var=1.0)
        k_n = 30
        d = vn_diagnostic(prov, scheme, scheme.lag, 2, k_n)
        covered = 0
        j = 1
        while j <= scheme.n_blocks and scheme.a[j - 1] - 1 <= k_n:
            covered += scheme.d(j)
            j += 1
        omitted = (k_n - 2 + 1) - covered
        assert d.absolute == pytest.approx(float(omitted), rel=1e-12)

    def test_array_provider_roundtrip(self):
        var = np.linspace(1.0, 2.0, 29)
        cov = np.full(29, 0.1)
        prov = ArrayMoments(var=var, covs=[cov], start=2)
        est = psi_bar(prov, LagSpec.fixed(1), s=2, k_n=30)
        want = var.sum() + 2 * 0.1 * (29 - 1)
        assert est.scalar == pytest.approx(want, rel=1e-12)
