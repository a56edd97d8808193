"""Compiled inner loops for the replication study.

The replication kernel mirrors the arithmetic of ``causal`` statement for
statement so that a pure-Python pass over the same generator state produces
bit-identical results; keep the two in sync when touching either.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# regime encoding shared with the python layer
PRE = 0
EVEN = 1
ODD = 2


@njit(nogil=True, cache=True)
def standard_gamma(rng, shape):
    """Marsaglia-Tsang rejection draw from Gamma(shape, 1).

    Shapes below one are boosted through Gamma(shape + 1) and one extra
    uniform; stream consumption is a deterministic function of the stream.
    """
    boost = 1.0
    alpha = shape
    if alpha < 1.0:
        alpha = alpha + 1.0
    d = alpha - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    while True:
        x = rng.standard_normal()
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = rng.random()
        if u < 1.0 - 0.0331 * (x * x) * (x * x):
            break
        if np.log(u) < 0.5 * x * x + d * (1.0 - v + np.log(v)):
            break
    g = d * v
    if shape < 1.0:
        boost = rng.random() ** (1.0 / shape)
    return g * boost


@njit(nogil=True, cache=True, inline="always")
def _prob_treated(regime, a_prev, base, low):
    if regime == ODD and a_prev == 1:
        return low
    return base


@njit(nogil=True, cache=True)
def simulate_replication(
    rng,
    T,
    theta0,
    theta1,
    switch_count,
    base,
    low,
    store_moments,
    var_out,
    cov_out,
):
    """One replicate of the treatment study; returns the per-replicate summaries.

    Per time step the four potential outcomes are drawn in index order
    (0,0), (0,1), (1,0), (1,1) followed by the treatment uniform.  Moment
    formulas condition on the state two steps back, so the loop carries the
    policy state, treatment, and realized probability at both lags.

    Returns (tau, tau_hat, psi_bar, psi_naive, switch_time, treated_total).
    """
    treated = 0
    regime = PRE
    switch_time = 0

    # t = 1: no outcome table, treatment only
    p1 = _prob_treated(regime, 0, base, low)
    u = rng.random()
    a_t = 1 if u < p1 else 0
    pr_t = p1 if a_t == 1 else 1.0 - p1
    if a_t == 1:
        treated += 1
        if treated == switch_count:
            regime = ODD if 1 % 2 == 1 else EVEN
            switch_time = 1

    a_m1 = a_t
    a_m2 = 0
    pr_m1 = pr_t
    pr_m2 = 1.0
    tre_m2 = 0
    reg_m2 = PRE
    tre_m1 = treated
    reg_m1 = regime
    yp00 = yp01 = yp10 = yp11 = 0.0

    s_tau = 0.0
    c_tau = 0.0
    s_that = 0.0
    c_that = 0.0
    s_var = 0.0
    c_var = 0.0
    s_cov = 0.0
    c_cov = 0.0

    for t in range(2, T + 1):
        y00 = standard_gamma(rng, theta0)
        y01 = standard_gamma(rng, theta0)
        y10 = standard_gamma(rng, theta1)
        y11 = standard_gamma(rng, theta1)

        # conditional moments given the state through t - 2
        p1 = _prob_treated(reg_m2, a_m2, base, low)
        p0 = 1.0 - p1
        reg_h = reg_m2  # hypothetical A_{t-1} = 0 never triggers a switch
        q0 = _prob_treated(reg_h, 0, base, low)
        tre_h = tre_m2 + 1
        reg_h = reg_m2
        if reg_h == PRE and tre_h == switch_count:
            reg_h = ODD if (t - 1) % 2 == 1 else EVEN
        q1 = _prob_treated(reg_h, 1, base, low)

        r0 = y00 + y01
        r1 = y10 + y11
        term1 = (p0 * p1 / 4.0) * (r1 / p1 + r0 / p0) ** 2
        term2_0 = (y01 / q0 - y00 / (1.0 - q0)) ** 2 * (q0 * (1.0 - q0) / (4.0 * p0))
        term2_1 = (y11 / q1 - y10 / (1.0 - q1)) ** 2 * (q1 * (1.0 - q1) / (4.0 * p1))
        vw = term1 + term2_0 + term2_1

        tau = 0.5 * (y11 - y01) + 0.5 * (y10 - y00)

        cw = 0.0
        if t >= 3:
            sign = 1.0 if a_m2 == 1 else -1.0
            if a_m2 == 1:
                yp0 = yp10
                yp1 = yp11
            else:
                yp0 = yp00
                yp1 = yp01
            lead = (sign / (4.0 * pr_m2)) * (yp1 / p1 * r1 - yp0 / p0 * r0)
            correction = tau * (sign / (2.0 * pr_m2)) * (yp0 + yp1)
            cw = lead - correction

        if store_moments:
            var_out[t] = vw
            cov_out[t] = cw

        # draw the treatment at t from the state through t - 1
        pt1 = _prob_treated(reg_m1, a_m1, base, low)
        u = rng.random()
        a_t = 1 if u < pt1 else 0
        pr_t = pt1 if a_t == 1 else 1.0 - pt1

        if a_m1 == 1:
            yobs = y11 if a_t == 1 else y10
        else:
            yobs = y01 if a_t == 1 else y00
        sign1 = 1.0 if a_m1 == 1 else -1.0
        joint = pr_m1 * pr_t
        tauhat = sign1 * yobs / (2.0 * joint)

        # compensated accumulation, fixed t-ascending order
        y = tau - c_tau
        tt = s_tau + y
        c_tau = (tt - s_tau) - y
        s_tau = tt

        y = tauhat - c_that
        tt = s_that + y
        c_that = (tt - s_that) - y
        s_that = tt

        y = vw - c_var
        tt = s_var + y
        c_var = (tt - s_var) - y
        s_var = tt

        if t >= 3:
            y = cw - c_cov
            tt = s_cov + y
            c_cov = (tt - s_cov) - y
            s_cov = tt

        # advance the realized policy state
        tre = tre_m1
        reg = reg_m1
        if a_t == 1:
            tre += 1
            if reg == PRE and tre == switch_count:
                reg = ODD if t % 2 == 1 else EVEN
                switch_time = t
        tre_m2 = tre_m1
        reg_m2 = reg_m1
        tre_m1 = tre
        reg_m1 = reg
        a_m2 = a_m1
        a_m1 = a_t
        pr_m2 = pr_m1
        pr_m1 = pr_t
        yp00 = y00
        yp01 = y01
        yp10 = y10
        yp11 = y11

    tm1 = float(T) - 1.0
    tf = float(T)
    tau_avg = s_tau / tm1
    tau_hat_avg = s_that / tm1
    psi_naive = s_var / tf
    psi_bar = psi_naive + (2.0 * s_cov) / tf
    return tau_avg, tau_hat_avg, psi_bar, psi_naive, switch_time, tre_m1
