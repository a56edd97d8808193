import math

import numpy as np
import pytest

from lagmart.blocks import (
    BlockScheme,
    LagSpec,
    SeriesPath,
    build_diverging_blocks,
    build_fixed_lag_blocks,
    decompose,
    diagnose_conditions,
)


def closed_form_diverging(A, B, alpha, beta, s, j):
    """Independent oracle: direct evaluation of the defining prefix sums."""
    bsum = sum((l * B) ** beta for l in range(1, j))
    asum = sum((l * A) ** alpha for l in range(1, j))
    b_j = math.floor(bsum + asum) + s
    a_j = math.ceil(bsum + (j * B) ** beta + asum) + s
    return b_j, a_j


class TestDivergingBlocks:
    def test_matches_closed_form_sums(self):
        scheme = build_diverging_blocks(A=1, B=1, alpha=1, beta=2, s=1, k_max=10)
        # hand evaluation: b = (1, 3, 9, ...), a = (2, 7, 18, ...), d = (1, 4, 9, ...)
        assert scheme.b[:3] == (1, 3, 9)
        assert scheme.a[:3] == (2, 7, 18)
        assert tuple(scheme.d(j) for j in (1, 2, 3)) == (1, 4, 9)
        for j in range(1, scheme.n_blocks + 1):
            assert (scheme.b[j - 1], scheme.a[j - 1]) == closed_form_diverging(1, 1, 1, 2, 1, j)

    def test_first_block_empty_sum_offset(self):
        scheme = build_diverging_blocks(A=1, B=1, alpha=1, beta=2, s=1, k_max=10)
        assert scheme.b[0] == math.floor(0.0) + 1 == 1

    def test_blocks_separated_for_integer_sums(self):
        # integer prefix sums: the ceiling/floor separation gives c_j >= 1
        for (A, B, alpha, beta) in [(1, 1, 1, 2), (2, 1, 1, 2), (1, 2, 1, 3)]:
            scheme = build_diverging_blocks(A=A, B=B, alpha=alpha, beta=beta, s=1, k_max=500)
            for j in range(1, scheme.n_blocks):
                assert scheme.d(j) >= 1
                assert scheme.c(j) >= 1

    def test_fractional_sums_allow_empty_minors(self):
        # non-integer sums can shrink an early minor block to length 0;
        # minors never overlap the next major block
        scheme = build_diverging_blocks(A=1, B=1.37, alpha=0.8, beta=1.7, s=1, k_max=400)
        assert all(scheme.c(j) >= 0 for j in range(1, scheme.n_blocks))

    def test_invariants_b_a_ordering(self):
        scheme = build_diverging_blocks(A=1, B=1, alpha=1, beta=2, s=3, k_max=2000)
        for j in range(scheme.n_blocks - 1):
            assert scheme.b[j] < scheme.a[j] <= scheme.b[j + 1]

    def test_d_diverges_over_horizon(self):
        scheme = build_diverging_blocks(A=1, B=1, alpha=1, beta=2, s=1, k_max=100_000)
        n = scheme.n_blocks - 1
        assert scheme.d(n) > scheme.d(1)
        j = n // 2
        assert scheme.d(2 * j) > scheme.d(j)

    def test_alpha_beta_constraint(self):
        with pytest.raises(ValueError, match="alpha < beta"):
            build_diverging_blocks(A=1, B=1, alpha=3, beta=2, s=1, k_max=10)

    def test_gamma_constraint(self):
        lag = LagSpec.power(order_C=1.0, order_gamma=0.9)
        with pytest.raises(ValueError, match="order_gamma"):
            build_diverging_blocks(A=1, B=1, alpha=1, beta=2, s=1, k_max=10, lag=lag)

    def test_materialized_past_kmax(self):
        scheme = build_diverging_blocks(A=1, B=1, alpha=1, beta=2, s=1, k_max=50)
        assert scheme.b[-1] > 50
        assert scheme.b[-2] <= 50


class TestFixedLagBlocks:
    def test_hand_evaluation(self):
        scheme = build_fixed_lag_blocks(p=1, s=2, k_max=10, growth_B=2, growth_beta=1)
        assert tuple(scheme.d(j) for j in (1, 2, 3)) == (2, 4, 6)
        assert scheme.b[:3] == (2, 5, 10)
        assert scheme.a[:3] == (4, 9, 16)

    def test_b1_is_p_plus_1(self):
        scheme = build_fixed_lag_blocks(p=3, s=4, k_max=30)
        assert scheme.b[0] == 4

    def test_requires_start_convention(self):
        with pytest.raises(ValueError, match="s = p \\+ 1"):
            build_fixed_lag_blocks(p=2, s=1, k_max=10)

    def test_p0_contiguous_blocks(self):
        # lag 0 is a classical MDS: minor blocks vanish, majors touch
        scheme = build_fixed_lag_blocks(p=0, s=1, k_max=40)
        for j in range(1, scheme.n_blocks):
            assert scheme.c(j) == 0
            assert scheme.b[j] == scheme.a[j - 1]

    def test_minor_length_is_p(self):
        for p in (1, 2, 5):
            scheme = build_fixed_lag_blocks(p=p, s=p + 1, k_max=200)
            for j in range(1, scheme.n_blocks):
                assert scheme.c(j) == p

    def test_custom_scheme_validation(self):
        with pytest.raises(ValueError, match="b_1"):
            BlockScheme(start_s=1, b=(2, 5), a=(4, 8), lag=LagSpec.fixed(1))
        with pytest.raises(ValueError, match="overlap"):
            BlockScheme(start_s=2, b=(2, 5), a=(6, 9), lag=LagSpec.power(1.0, 0.2))


class TestLagSpec:
    def test_fixed_constant(self):
        lag = LagSpec.fixed(3)
        assert [lag.p_at(k) for k in (4, 10, 100)] == [3, 3, 3]

    def test_power_bound_holds(self):
        lag = LagSpec.power(order_C=2.0, order_gamma=0.5)
        lag.validate_range(1, 5000)

    def test_adaptedness_bound_violation(self):
        bad = LagSpec(kind="diverging", lag_fn=lambda k: k, order_gamma=0.5, order_C=1e9)
        with pytest.raises(ValueError, match="k - p_k - 1"):
            bad.validate_range(1, 10)


class TestDecompose:
    scheme = BlockScheme(start_s=2, b=(2, 5, 8), a=(4, 7, 10), lag=LagSpec.fixed(1))

    def test_hand_enumeration(self):
        path = SeriesPath(values=np.array([1.0, 2, 3, 4, 5]), start=2)
        d = decompose(path, self.scheme)
        assert d.major_sums[0] == 3.0
        assert d.minor_sums[0] == 3.0
        assert d.major_sums[1] == 9.0
        assert (d.s_a, d.s_b, d.s_c, d.s_n) == (3.0, 12.0, 0.0, 15.0)
        assert (d.j_a, d.j_b) == (1, 2)

    def test_all_zero_path(self):
        path = SeriesPath(values=np.zeros(5), start=2)
        d = decompose(path, self.scheme)
        assert d.s_a == d.s_b == d.s_c == d.s_n == 0.0

    def test_incomplete_final_block_goes_to_tail(self):
        # k_n = 5 sits in [b_2, a_2 - 2]: the truncated block is S_C, not S_B
        path = SeriesPath(values=np.array([1.0, 2, 3, 4]), start=2)
        d = decompose(path, self.scheme)
        assert d.j_b == 1
        assert d.s_b == 3.0
        assert d.s_c == 4.0
        assert d.s_a + d.s_b + d.s_c == d.s_n == 10.0

    def test_complete_final_block_counts_as_major(self):
        # k_n = a_2 - 1 = 6: block 2 is complete, S_C = 0
        path = SeriesPath(values=np.array([1.0, 2, 3, 4, 5]), start=2)
        d = decompose(path, self.scheme)
        assert d.j_b == 2
        assert d.s_c == 0.0

    def test_start_mismatch_rejected(self):
        path = SeriesPath(values=np.ones(3), start=3)
        with pytest.raises(ValueError, match="does not match"):
            decompose(path, self.scheme)

    def test_vector_path(self):
        rng = np.random.default_rng(3)
        vals = rng.standard_normal((5, 3))
        path = SeriesPath(values=vals, start=2)
        d = decompose(path, self.scheme)
        np.testing.assert_allclose(d.s_a + d.s_b + d.s_c, vals.sum(axis=0), rtol=1e-12)

    def test_identity_randomized(self):
        rng = np.random.default_rng(99)
        tail_seen = 0
        for _ in range(400):
            p = int(rng.integers(0, 3))
            scheme = build_fixed_lag_blocks(p=p, s=p + 1, k_max=int(rng.integers(p + 2, 120)))
            span = scheme.b[-1] - scheme.start_s
            length = int(rng.integers(1, span + 1))
            path = SeriesPath(values=rng.standard_normal(length) * 50, start=scheme.start_s)
            d = decompose(path, scheme)
            total = d.s_a + d.s_b + d.s_c
            assert abs(total - d.s_n) <= 1e-12 * max(1.0, abs(d.s_n))
            if d.s_c != 0.0:
                tail_seen += 1
        assert tail_seen > 0


class TestDiagnostics:
    def test_cn_small_and_decreasing(self):
        scheme = build_diverging_blocks(A=1, B=1, alpha=1, beta=2, s=1, k_max=350_000_000)
        assert scheme.n_blocks > 1000
        rep = diagnose_conditions(scheme, J=1000)
        assert rep.J == 1000
        assert rep.cn[-1] < 0.01
        tail = rep.cn[10:]
        assert all(tail[i + 1] <= tail[i] for i in range(len(tail) - 1))

    def test_fixed_lag_structural_from_first_block(self):
        scheme = build_fixed_lag_blocks(p=2, s=3, k_max=300)
        rep = diagnose_conditions(scheme, J=20)
        assert rep.lag_ok_from == 1

    def test_constant_d_adversarial(self):
        # constant majors: DN ratio is exactly 1/J but the growth flag fails
        b = tuple(1 + 3 * j for j in range(40))
        a = tuple(3 + 3 * j for j in range(40))
        scheme = BlockScheme(start_s=1, b=b, a=a, lag=LagSpec.fixed(1))
        rep = diagnose_conditions(scheme, J=30)
        assert rep.dn[-1] == pytest.approx(1.0 / 30)
        assert not rep.d_grows

    def test_diverging_structural_condition_eventually_holds(self):
        # early blocks are too short to absorb this lag; block 4 onward is
        lag = LagSpec.power(order_C=1.6, order_gamma=0.3)
        scheme = build_diverging_blocks(
            A=1, B=1, alpha=1, beta=2, s=1, k_max=300_000, lag=lag
        )
        rep = diagnose_conditions(scheme, J=scheme.n_blocks - 1)
        assert rep.lag_checked_through == rep.J
        assert rep.lag_ok_from == 4

    def test_requires_two_blocks(self):
        scheme = build_fixed_lag_blocks(p=1, s=2, k_max=50)
        with pytest.raises(ValueError, match="J"):
            diagnose_conditions(scheme, J=1)
