import pytest

from lagmart.causal import cov_w, tau_t
from lagmart.verify import (
    run_all_suites,
    suite_decomposition,
    suite_kernel_reference,
    suite_ma_moments,
    suite_moment_oracle,
)


class TestSuites:
    def test_all_pass_on_fresh_build(self):
        results = run_all_suites()
        assert [r.name for r in results] == [
            "moment_oracle",
            "decomposition_identity",
            "ma_moments",
            "kernel_reference",
        ]
        for r in results:
            assert r.passed, f"{r.name}: {r.detail}"

    def test_injected_sign_flip_detected(self):
        def broken_cov(bp, bc, policy, t, a_prev_prev):
            # sign flip on the correction term
            good = cov_w(bp, bc, policy, t, a_prev_prev)
            pr = policy.last_prob
            sign = 1.0 if a_prev_prev == 1 else -1.0
            correction = tau_t(bc) * (sign / (2.0 * pr)) * (
                bp.y[a_prev_prev, 0] + bp.y[a_prev_prev, 1]
            )
            return good + 2.0 * correction

        res = suite_moment_oracle(n_instances=200, cov_fn=broken_cov)
        assert not res.passed
        assert "cov_w" in res.detail and "enumeration" in res.detail
        # the failure message echoes the offending instance's state
        assert "treated=" in res.detail and "t=" in res.detail

    def test_injected_var_bias_detected(self):
        from lagmart.causal import var_w

        res = suite_moment_oracle(
            n_instances=200, var_fn=lambda b, p, t: var_w(b, p, t) * (1 + 1e-6)
        )
        assert not res.passed

    def test_decomposition_suite_covers_tail_case(self):
        res = suite_decomposition(n_pairs=300)
        assert res.passed
        assert "incomplete final block" in res.detail

    def test_ma_suite(self):
        assert suite_ma_moments(n=50_000).passed

    def test_kernel_suite(self):
        res = suite_kernel_reference(T=200, reps=3)
        assert res.passed
