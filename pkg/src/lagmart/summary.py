"""Aggregation of replication records into a study summary.

The summary is a pure function of the records, so recomputing it from a
round-tripped CSV reproduces the original run's summary exactly.  sqrt(T) * w
is recovered as z * sqrt(psi_bar), which avoids needing T, and T itself is
inferred from the stored normalization for reporting.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .simulate import ReplicationRecord
from .stats import Gmm2Fit, KsResult, gmm2_fit, ks_gaussian, t_test_mean, t_test_second_moment

__all__ = ["GroupStats", "StudySummary", "build_summary", "summary_to_dict", "summary_json"]

MIN_MIXTURE_N = 10


@dataclass(frozen=True)
class GroupStats:
    count: int
    weight: float
    psi_bar_mean: float | None
    psi_bar_sd: float | None


@dataclass(frozen=True)
class StudySummary:
    reps: int
    T: int | None
    tau_mean: float
    tau_hat_mean: float
    tau_hat_se: float | None
    w_sd: float | None
    z_var: float | None
    z_naive_var: float | None
    groups: dict[str, GroupStats]
    mixture: Gmm2Fit | None
    ks_w: KsResult | None
    ks_z: KsResult | None
    p_z_mean: float | None
    p_z_sq: float | None
    p_z_naive_sq: float | None
    warnings: tuple[str, ...]


def _infer_T(records: list[ReplicationRecord]) -> int | None:
    for r in records:
        if r.w != 0.0 and r.psi_bar > 0.0:
            return int(round(r.psi_bar * (r.z / r.w) ** 2))
    return None


def build_summary(records: list[ReplicationRecord]) -> StudySummary:
    if not records:
        raise ValueError("no records to summarize")
    warnings: list[str] = []
    n = len(records)
    tau = np.array([r.tau for r in records])
    tau_hat = np.array([r.tau_hat for r in records])
    w = np.array([r.w for r in records])
    z = np.array([r.z for r in records])
    z_naive = np.array([r.z_naive for r in records])
    psi = np.array([r.psi_bar for r in records])
    parity = [r.parity_group for r in records]

    groups: dict[str, GroupStats] = {}
    for name in ("even", "odd", "none"):
        idx = [i for i, p in enumerate(parity) if p == name]
        if name == "none" and not idx:
            continue
        if not idx:
            groups[name] = GroupStats(count=0, weight=0.0, psi_bar_mean=None, psi_bar_sd=None)
            warnings.append(f"parity group {name!r} absent")
            continue
        vals = psi[idx]
        groups[name] = GroupStats(
            count=len(idx),
            weight=len(idx) / n,
            psi_bar_mean=float(vals.mean()),
            psi_bar_sd=float(vals.std(ddof=1)) if len(idx) >= 2 else None,
        )
    if "none" in groups:
        warnings.append("some replicates never reached the regime switch")

    tau_hat_se = float(tau_hat.std(ddof=1) / math.sqrt(n)) if n >= 2 else None
    w_sd = float(w.std(ddof=1)) if n >= 2 else None
    z_var = float(z.var(ddof=1)) if n >= 2 else None
    z_naive_var = float(z_naive.var(ddof=1)) if n >= 2 else None

    mixture: Gmm2Fit | None = None
    if n >= MIN_MIXTURE_N:
        x = z * np.sqrt(psi)  # equals sqrt(T) * w as normalized in the records
        try:
            mixture = gmm2_fit(x)
        except (ValueError, RuntimeError) as exc:
            warnings.append(f"mixture fit unavailable: {exc}")
    else:
        warnings.append(f"mixture fit unavailable: needs >= {MIN_MIXTURE_N} replicates")

    ks_w = ks_z = None
    p_z_mean = p_z_sq = p_z_naive_sq = None
    if n >= 2 and w_sd and w_sd > 0.0:
        try:
            ks_w = ks_gaussian(w, 0.0, w_sd)
        except ValueError as exc:
            warnings.append(f"KS test on w unavailable: {exc}")
    elif n < 2:
        warnings.append("distributional tests unavailable: needs >= 2 replicates")
    if n >= 2:
        try:
            ks_z = ks_gaussian(z, 0.0, 1.0)
        except ValueError as exc:
            warnings.append(f"KS test on z unavailable: {exc}")
        try:
            p_z_mean = t_test_mean(z, 0.0)
            p_z_sq = t_test_second_moment(z)
            p_z_naive_sq = t_test_second_moment(z_naive)
        except ValueError as exc:
            warnings.append(f"t-tests unavailable: {exc}")

    return StudySummary(
        reps=n,
        T=_infer_T(records),
        tau_mean=float(tau.mean()),
        tau_hat_mean=float(tau_hat.mean()),
        tau_hat_se=tau_hat_se,
        w_sd=w_sd,
        z_var=z_var,
        z_naive_var=z_naive_var,
        groups=groups,
        mixture=mixture,
        ks_w=ks_w,
        ks_z=ks_z,
        p_z_mean=p_z_mean,
        p_z_sq=p_z_sq,
        p_z_naive_sq=p_z_naive_sq,
        warnings=tuple(warnings),
    )


def summary_to_dict(s: StudySummary) -> dict:
    def ks(r: KsResult | None):
        if r is None:
            return None
        return {"statistic": r.statistic, "p_value": r.p_value, "n": r.n}

    mixture = None
    if s.mixture is not None:
        mixture = {
            "weights": list(s.mixture.weights),
            "means": list(s.mixture.means),
            "variances": list(s.mixture.variances),
            "log_likelihood": s.mixture.log_likelihood,
            "iterations": s.mixture.iterations,
            "converged": s.mixture.converged,
            "ambiguous": s.mixture.ambiguous,
        }
    return {
        "reps": s.reps,
        "T": s.T,
        "tau_mean": s.tau_mean,
        "tau_hat_mean": s.tau_hat_mean,
        "tau_hat_se": s.tau_hat_se,
        "w_sd": s.w_sd,
        "z_var": s.z_var,
        "z_naive_var": s.z_naive_var,
        "groups": {
            name: {
                "count": g.count,
                "weight": g.weight,
                "psi_bar_mean": g.psi_bar_mean,
                "psi_bar_sd": g.psi_bar_sd,
            }
            for name, g in s.groups.items()
        },
        "mixture": mixture,
        "tests": {
            "ks_w": ks(s.ks_w),
            "ks_z": ks(s.ks_z),
            "p_z_mean": s.p_z_mean,
            "p_z_sq": s.p_z_sq,
            "p_z_naive_sq": s.p_z_naive_sq,
        },
        "warnings": list(s.warnings),
    }


def summary_json(s: StudySummary) -> str:
    return json.dumps(summary_to_dict(s), indent=2, sort_keys=True) + "\n"
