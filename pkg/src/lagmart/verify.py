"""Self-contained verification suites: oracle equivalence and calibration.

Each suite checks one dual-route identity (closed form against brute force,
compiled kernel against the pure-Python reference, analytic moments against
sample moments) on seeded deterministic inputs.  The moment-oracle suite
accepts injectable formula implementations so a deliberately broken variant
can be shown to fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import causal
from .blocks import build_diverging_blocks, build_fixed_lag_blocks, decompose, SeriesPath
from .causal import AssignmentPolicy, PotentialBranch, enumerate_moments
from .ma import MovingAverageMoments, generate_ma_process
from .simulate import SimConfig, reference_replication, run_replication

__all__ = [
    "SuiteResult",
    "suite_moment_oracle",
    "suite_decomposition",
    "suite_ma_moments",
    "suite_kernel_reference",
    "run_all_suites",
]

ORACLE_RELTOL = 1e-10
UNBIASED_TOL = 1e-12
DECOMP_RELTOL = 1e-12


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    checked: int
    detail: str


def _random_instance(rng: np.random.Generator, switch_count: int = 100):
    """A random policy state (switch boundary included) plus branch pair."""
    boundary = rng.random() < 0.5
    if boundary:
        treated = int(rng.integers(switch_count - 2, switch_count))
        regime = "pre"
    else:
        regime = ("pre", "even", "odd")[int(rng.integers(0, 3))]
        treated = (
            int(rng.integers(0, switch_count))
            if regime == "pre"
            else int(rng.integers(switch_count, switch_count + 50))
        )
    a_m2 = int(rng.integers(0, 2))
    t = int(rng.integers(3, 500))
    pr_m2 = float(rng.uniform(0.05, 0.95))
    pol = AssignmentPolicy.with_state(treated, regime, a_m2, pr_m2, switch_count=switch_count)
    y_prev = rng.gamma(2.5, 1.0, size=(2, 2))
    y_cur = rng.gamma(2.5, 1.0, size=(2, 2))
    branch_prev = PotentialBranch(t=t - 1, y=y_prev, realized_prev=a_m2, realized_cur=0)
    branch_cur = PotentialBranch(t=t, y=y_cur, realized_prev=0, realized_cur=0)
    return pol, branch_prev, branch_cur, t, a_m2


def suite_moment_oracle(
    n_instances: int = 1000,
    seed: int = 20240,
    var_fn: Callable = causal.var_w,
    cov_fn: Callable = causal.cov_w,
) -> SuiteResult:
    """Closed-form variance/covariance against exact enumeration.

    Also asserts the enumeration's unbiasedness identity E(W_t | F_{t-2}) = 0.
    """
    rng = np.random.default_rng(seed)
    for i in range(n_instances):
        pol, bp, bc, t, a_m2 = _random_instance(rng)
        oracle = enumerate_moments(bp, bc, pol, t, a_m2)
        v = var_fn(bc, pol, t)
        c = cov_fn(bp, bc, pol, t, a_m2)
        scale = max(1.0, abs(oracle.var_w_cur), abs(oracle.cov))
        if abs(oracle.mean_w_cur) > UNBIASED_TOL * scale:
            return SuiteResult(
                "moment_oracle",
                False,
                i + 1,
                f"instance {i}: E(W_t|F) = {oracle.mean_w_cur!r} exceeds tolerance",
            )
        if abs(v - oracle.var_w_cur) > ORACLE_RELTOL * max(1.0, abs(oracle.var_w_cur)):
            return SuiteResult(
                "moment_oracle",
                False,
                i + 1,
                f"instance {i}: var_w {v!r} vs enumeration {oracle.var_w_cur!r} "
                f"(policy state treated={pol.treated_count} regime={pol.regime} "
                f"a_prev_prev={a_m2} t={t})",
            )
        if abs(c - oracle.cov) > ORACLE_RELTOL * max(1.0, abs(oracle.cov)):
            return SuiteResult(
                "moment_oracle",
                False,
                i + 1,
                f"instance {i}: cov_w {c!r} vs enumeration {oracle.cov!r} "
                f"(policy state treated={pol.treated_count} regime={pol.regime} "
                f"a_prev_prev={a_m2} t={t})",
            )
    return SuiteResult("moment_oracle", True, n_instances, "closed forms match enumeration")


def _random_scheme(rng: np.random.Generator):
    if rng.random() < 0.5:
        p = int(rng.integers(0, 4))
        return build_fixed_lag_blocks(
            p=p,
            s=p + 1,
            k_max=int(rng.integers(p + 2, 250)),
            growth_B=float(rng.uniform(0.5, 3.0)),
            growth_beta=float(rng.uniform(0.3, 1.5)),
        )
    alpha = float(rng.uniform(0.5, 1.5))
    beta = alpha + float(rng.uniform(0.3, 1.5))
    s = int(rng.integers(1, 5))
    # A, B >= 1 force the ceiling/floor separation c_j >= 1
    return build_diverging_blocks(
        A=float(rng.uniform(1.0, 2.0)),
        B=float(rng.uniform(1.0, 2.0)),
        alpha=alpha,
        beta=beta,
        s=s,
        k_max=s + int(rng.integers(1, 250)),
    )


def suite_decomposition(n_pairs: int = 2000, seed: int = 77) -> SuiteResult:
    """S_A + S_B + S_C against the direct compensated sum on random pairs."""
    rng = np.random.default_rng(seed)
    tail_cases = 0
    for i in range(n_pairs):
        scheme = _random_scheme(rng)
        span = scheme.b[-1] - scheme.start_s
        length = int(rng.integers(1, max(2, span + 1)))
        values = rng.standard_normal(length) * math.exp(rng.uniform(-2, 4))
        path = SeriesPath(values=values, start=scheme.start_s)
        d = decompose(path, scheme)
        if np.any(np.asarray(d.s_c) != 0.0):
            tail_cases += 1
        total = d.s_a + d.s_b + d.s_c
        if abs(total - d.s_n) > DECOMP_RELTOL * max(1.0, abs(d.s_n)):
            return SuiteResult(
                "decomposition_identity",
                False,
                i + 1,
                f"pair {i}: decomposed {total!r} vs direct {d.s_n!r}",
            )
    if tail_cases == 0:
        return SuiteResult(
            "decomposition_identity", False, n_pairs, "no incomplete-final-block case exercised"
        )
    return SuiteResult(
        "decomposition_identity",
        True,
        n_pairs,
        f"identity held on {n_pairs} pairs ({tail_cases} with an incomplete final block)",
    )


def suite_ma_moments(seed: int = 4242, n: int = 100_000) -> SuiteResult:
    """Scalar MA(1) sample moments against the analytic provider, 4 SE bands."""
    path = generate_ma_process(q=1, p=1, coeffs=[1.0, 1.0], innovations_sd=1.0, n=n, seed=seed)
    x = path.values
    prov = MovingAverageMoments(coeffs=[1.0, 1.0], innovations_sd=1.0)
    want_var, want_cov = prov.var_at(0), prov.cov_at(0, 1)
    m = x.size
    svar = float(x.var())
    scov = float(np.mean(x[1:] * x[:-1]) - x[1:].mean() * x[:-1].mean())
    # moment SEs for Gaussian-driven MA(1): var(x^2) = 2 var^2, similar order for the lag product
    se_var = math.sqrt(2.0 * want_var**2 / m)
    se_cov = math.sqrt((want_var**2 + want_cov**2) / m)
    if abs(svar - want_var) > 4.0 * se_var:
        return SuiteResult(
            "ma_moments", False, m, f"sample var {svar:.4f} vs analytic {want_var:.4f}"
        )
    if abs(scov - want_cov) > 4.0 * se_cov:
        return SuiteResult(
            "ma_moments", False, m, f"sample lag-1 cov {scov:.4f} vs analytic {want_cov:.4f}"
        )
    return SuiteResult(
        "ma_moments", True, m, f"var {svar:.4f} ~ {want_var}, cov {scov:.4f} ~ {want_cov}"
    )


def suite_kernel_reference(seed: int = 11, T: int = 400, reps: int = 5) -> SuiteResult:
    """Compiled kernel against the pure-Python operation-level reference, bitwise."""
    cfg = SimConfig(T=T, reps=reps, master_seed=seed, switch_count=20)
    for rep_id in range(reps):
        fast = run_replication(cfg, rep_id)
        slow = reference_replication(cfg, rep_id)
        if fast != slow:
            return SuiteResult(
                "kernel_reference",
                False,
                rep_id + 1,
                f"rep {rep_id}: kernel {fast} != reference {slow}",
            )
    return SuiteResult(
        "kernel_reference", True, reps, f"{reps} replicates bit-identical at T={T}"
    )


def run_all_suites(
    var_fn: Callable = causal.var_w,
    cov_fn: Callable = causal.cov_w,
) -> list[SuiteResult]:
    return [
        suite_moment_oracle(var_fn=var_fn, cov_fn=cov_fn),
        suite_decomposition(),
        suite_ma_moments(),
        suite_kernel_reference(),
    ]
