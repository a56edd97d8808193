"""Statistical verification tools: one-sample KS vs a Gaussian, t-tests,
two-component Gaussian-mixture EM, and a Gaussian-kernel KDE.

These back the study summary and the distributional acceptance checks.  The
KS p-value uses the asymptotic Kolmogorov series, adequate at the sample
sizes this engine produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, stdtr

__all__ = [
    "KsResult",
    "Gmm2Fit",
    "ks_gaussian",
    "kolmogorov_sf",
    "t_test_mean",
    "t_test_second_moment",
    "gmm2_fit",
    "kde",
    "silverman_bandwidth",
]


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n: int


@dataclass(frozen=True)
class Gmm2Fit:
    """Two-component Gaussian mixture fit, components in ascending variance order."""

    weights: tuple[float, float]
    means: tuple[float, float]
    variances: tuple[float, float]
    log_likelihood: float
    iterations: int
    converged: bool
    ambiguous: bool


def kolmogorov_sf(lam: float) -> float:
    """Asymptotic Kolmogorov survival function 2 * sum (-1)^(k-1) exp(-2 k^2 lam^2).

    The alternating series is truncated once a term falls below 1e-16; the
    truncation error is bounded by the first omitted term.
    """
    if lam <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        if term < 1e-16:
            break
        total += sign * term
        sign = -sign
        k += 1
        if k > 200000:
            break
    return min(1.0, max(0.0, 2.0 * total))


def ks_gaussian(samples, mean: float, sd: float) -> KsResult:
    """One-sample KS test of the data against Gaussian(mean, sd^2).

    The statistic is the exact supremum distance computed from the sorted
    sample; the p-value comes from the Kolmogorov series at sqrt(n) * D.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 2:
        raise ValueError("need at least two observations")
    if sd <= 0.0:
        raise ValueError("sd must be positive")
    if x[0] == x[-1]:
        raise ValueError("degenerate sample (all values equal)")
    cdf = ndtr((x - mean) / sd)
    i = np.arange(1, n + 1, dtype=float)
    d_plus = float(np.max(i / n - cdf))
    d_minus = float(np.max(cdf - (i - 1.0) / n))
    d = max(d_plus, d_minus)
    return KsResult(statistic=d, p_value=kolmogorov_sf(math.sqrt(n) * d), n=n)


def t_test_mean(samples, mu0: float) -> float:
    """Two-sided one-sample t-test p-value for E(X) = mu0."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two observations")
    v = float(x.var(ddof=1))
    if v == 0.0:
        raise ValueError("degenerate sample (zero variance)")
    t = (float(x.mean()) - mu0) / math.sqrt(v / n)
    return float(2.0 * stdtr(n - 1, -abs(t)))


def t_test_second_moment(samples) -> float:
    """Two-sided test of E(X^2) = 1, run as a mean test on x^2 - 1."""
    x = np.asarray(samples, dtype=float)
    return t_test_mean(x * x - 1.0, 0.0)


def _em_pass(x, w, m1, m2, v1, v2, max_iter, tol, var_floor):
    """Run EM from one start; returns (params, ll, iterations, converged, degenerate)."""
    n = x.size
    ll_prev = -math.inf
    ll = -math.inf
    degenerate = False
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        log_d1 = math.log(w) - 0.5 * math.log(2.0 * math.pi * v1) - 0.5 * (x - m1) ** 2 / v1
        log_d2 = (
            math.log(1.0 - w) - 0.5 * math.log(2.0 * math.pi * v2) - 0.5 * (x - m2) ** 2 / v2
        )
        log_tot = np.logaddexp(log_d1, log_d2)
        ll = float(np.sum(log_tot))
        if ll < ll_prev - 1e-9 * (1.0 + abs(ll_prev)):
            raise RuntimeError(
                f"EM log-likelihood decreased at iteration {it}: {ll_prev} -> {ll}"
            )
        r = np.exp(log_d1 - log_tot)
        w = float(np.mean(r))
        w = min(max(w, 1e-10), 1.0 - 1e-10)
        s1 = float(np.sum(r))
        s2 = float(n) - s1
        m1 = float(np.sum(r * x)) / s1
        m2 = float(np.sum((1.0 - r) * x)) / s2
        v1 = float(np.sum(r * (x - m1) ** 2)) / s1
        v2 = float(np.sum((1.0 - r) * (x - m2) ** 2)) / s2
        if v1 < var_floor:
            v1 = var_floor
            degenerate = True
        if v2 < var_floor:
            v2 = var_floor
            degenerate = True
        if math.isfinite(ll_prev) and abs(ll - ll_prev) <= tol * abs(ll):
            converged = True
            break
        ll_prev = ll
    return (w, m1, m2, v1, v2), ll, it, converged, degenerate


def gmm2_fit(samples) -> Gmm2Fit:
    """EM fit of a two-component Gaussian mixture, best of 8 seeded restarts.

    The first start splits the sample at the median absolute deviation from
    the median, seeding a low and a high spread component; the remaining
    starts jitter it deterministically.  Stops at relative log-likelihood
    change below 1e-10 or 2,000 iterations per start.  Non-convergence across
    every restart is reported through the flag, with the best fit attached.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 10:
        raise ValueError("need at least 10 observations to fit a 2-component mixture")
    total_var = float(x.var())
    if total_var == 0.0:
        raise ValueError("degenerate sample (zero variance)")
    var_floor = 1e-12 * total_var

    med = float(np.median(x))
    dev = np.abs(x - med)
    cut = float(np.median(dev))
    lo = x[dev <= cut]
    hi = x[dev > cut]
    if lo.size < 2 or hi.size < 2:
        lo = x[: n // 2]
        hi = x[n // 2 :]
    base = (
        0.5,
        float(lo.mean()),
        float(hi.mean()),
        max(float(lo.var()), var_floor),
        max(float(hi.var()), var_floor),
    )

    best = None
    for restart in range(8):
        w, m1, m2, v1, v2 = base
        if restart > 0:
            jit = np.random.default_rng(restart)
            sd = math.sqrt(total_var)
            w = min(max(0.5 + 0.2 * (2.0 * jit.random() - 1.0), 0.05), 0.95)
            m1 += 0.5 * sd * jit.standard_normal()
            m2 += 0.5 * sd * jit.standard_normal()
            v1 *= math.exp(2.0 * jit.random() - 1.0)
            v2 *= math.exp(2.0 * jit.random() - 1.0)
        params, ll, iters, converged, degenerate = _em_pass(
            x, w, m1, m2, v1, v2, max_iter=2000, tol=1e-10, var_floor=var_floor
        )
        score = (not degenerate, converged, ll)
        if best is None or score > best[0]:
            best = (score, params, ll, iters, converged)

    _, (w, m1, m2, v1, v2), ll, iters, converged = best
    if v1 > v2:
        w, m1, m2, v1, v2 = 1.0 - w, m2, m1, v2, v1
    # a split that barely improves on one Gaussian is unidentifiable
    ll_single = -0.5 * n * (math.log(2.0 * math.pi * float(x.var())) + 1.0)
    ambiguous = (ll - ll_single) / n < 0.01
    return Gmm2Fit(
        weights=(w, 1.0 - w),
        means=(m1, m2),
        variances=(v1, v2),
        log_likelihood=ll,
        iterations=iters,
        converged=converged,
        ambiguous=ambiguous,
    )


def silverman_bandwidth(samples) -> float:
    """Silverman's rule of thumb: 0.9 * min(sd, iqr / 1.34) * n^(-1/5)."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two observations")
    sd = float(x.std(ddof=1))
    if sd == 0.0:
        raise ValueError("degenerate sample (zero variance)")
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = float(q75 - q25)
    scale = min(sd, iqr / 1.34) if iqr > 0.0 else sd
    return 0.9 * scale * n ** (-0.2)


def kde(samples, grid, bandwidth: float | None = None) -> np.ndarray:
    """Gaussian-kernel density estimate on the given grid.

    Bandwidth defaults to Silverman's rule.  Densities are nonnegative and
    integrate to about one over a grid wide enough to cover the sample.
    """
    x = np.asarray(samples, dtype=float)
    g = np.asarray(grid, dtype=float)
    if g.size == 0:
        raise ValueError("empty grid")
    if x.size < 2:
        raise ValueError("need at least two observations")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if h <= 0.0:
        raise ValueError("bandwidth must be positive")
    out = np.empty(g.size)
    norm = 1.0 / (x.size * h * math.sqrt(2.0 * math.pi))
    chunk = max(1, int(2_000_000 // max(1, x.size)))
    for i in range(0, g.size, chunk):
        z = (g[i : i + chunk, None] - x[None, :]) / h
        out[i : i + chunk] = norm * np.exp(-0.5 * z * z).sum(axis=1)
    return out
