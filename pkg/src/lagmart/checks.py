"""Pass/fail checks evaluated against a completed study run.

Each check encodes one reproduction band for the default configuration
(T = 100,000 with Gamma(2)/Gamma(3) outcomes and the 100-treatment regime
switch).  Runs with too few replicates report the statistical checks as
skipped rather than failed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .summary import StudySummary

__all__ = ["CheckResult", "reproduction_checks", "MIN_REPS_FOR_CHECKS", "MIN_REPS_FOR_MIXTURE"]

MIN_REPS_FOR_CHECKS = 2000
# the mixture bands are stated for full-size runs; smaller samples leave the
# EM component means too noisy to gate on
MIN_REPS_FOR_MIXTURE = 10_000

# reproduction bands for the default configuration
EVEN_PSI_BAND = (31.5, 33.5)
ODD_PSI_BAND = (238.0, 253.0)
GROUP_WEIGHT_BAND = (0.47, 0.53)
MIX_WEIGHT_HIGH = 0.52
MIX_WEIGHT_TOL = 0.04
MIX_VAR_HIGH = 241.4
MIX_VAR_LOW = 30.8
MIX_VAR_RELTOL = 0.10
MIX_MEAN_TOL = 0.5
Z_ALPHA = 0.01
Z_VAR_BAND = (0.97, 1.03)
REJECT_P = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    detail: str

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _result(name: str, ok: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, status="pass" if ok else "fail", detail=detail)


def check_group_concentration(s: StudySummary) -> CheckResult:
    even = s.groups.get("even")
    odd = s.groups.get("odd")
    if even is None or odd is None or even.count == 0 or odd.count == 0:
        return _result("group_concentration", False, "a parity group is empty")
    ok = (
        EVEN_PSI_BAND[0] <= even.psi_bar_mean <= EVEN_PSI_BAND[1]
        and ODD_PSI_BAND[0] <= odd.psi_bar_mean <= ODD_PSI_BAND[1]
        and GROUP_WEIGHT_BAND[0] <= even.weight <= GROUP_WEIGHT_BAND[1]
        and GROUP_WEIGHT_BAND[0] <= odd.weight <= GROUP_WEIGHT_BAND[1]
    )
    detail = (
        f"even psi_bar mean {even.psi_bar_mean:.3f} (band {EVEN_PSI_BAND}), "
        f"odd {odd.psi_bar_mean:.3f} (band {ODD_PSI_BAND}), "
        f"weights {even.weight:.3f}/{odd.weight:.3f} (band {GROUP_WEIGHT_BAND})"
    )
    return _result("group_concentration", ok, detail)


def check_mixture_recovery(s: StudySummary) -> CheckResult:
    m = s.mixture
    if m is None:
        return _result("mixture_recovery", False, "mixture fit unavailable")
    w_low, w_high = m.weights
    v_low, v_high = m.variances
    ok = (
        abs(w_high - MIX_WEIGHT_HIGH) <= MIX_WEIGHT_TOL
        and abs(w_low - (1.0 - MIX_WEIGHT_HIGH)) <= MIX_WEIGHT_TOL
        and abs(v_high - MIX_VAR_HIGH) <= MIX_VAR_RELTOL * MIX_VAR_HIGH
        and abs(v_low - MIX_VAR_LOW) <= MIX_VAR_RELTOL * MIX_VAR_LOW
        and abs(m.means[0]) <= MIX_MEAN_TOL
        and abs(m.means[1]) <= MIX_MEAN_TOL
    )
    detail = (
        f"weights {w_low:.3f}/{w_high:.3f}, variances {v_low:.1f}/{v_high:.1f}, "
        f"means {m.means[0]:+.2f}/{m.means[1]:+.2f}"
    )
    return _result("mixture_recovery", ok, detail)


def check_z_gaussian(s: StudySummary) -> CheckResult:
    if s.ks_z is None or s.p_z_mean is None or s.p_z_sq is None or s.z_var is None:
        return _result("z_gaussian", False, "z tests unavailable")
    ok = (
        s.ks_z.p_value > Z_ALPHA
        and s.p_z_mean > Z_ALPHA
        and s.p_z_sq > Z_ALPHA
        and Z_VAR_BAND[0] <= s.z_var <= Z_VAR_BAND[1]
    )
    detail = (
        f"KS p {s.ks_z.p_value:.3g}, t-mean p {s.p_z_mean:.3g}, "
        f"t-second-moment p {s.p_z_sq:.3g}, var(z) {s.z_var:.4f} (band {Z_VAR_BAND})"
    )
    return _result("z_gaussian", ok, detail)


def check_non_gaussian(s: StudySummary) -> CheckResult:
    if s.ks_w is None or s.p_z_naive_sq is None:
        return _result("w_z_naive_non_gaussian", False, "tests unavailable")
    ok = s.ks_w.p_value < REJECT_P and s.p_z_naive_sq < REJECT_P
    detail = f"KS(w) p {s.ks_w.p_value:.3g}, z-naive second-moment p {s.p_z_naive_sq:.3g}"
    return _result("w_z_naive_non_gaussian", ok, detail)


def check_unbiasedness(s: StudySummary) -> CheckResult:
    if s.tau_hat_se is None or s.tau_hat_se == 0.0:
        return _result("unbiasedness", False, "standard error unavailable")
    err = abs(s.tau_hat_mean - 1.0)
    ok = err <= 3.0 * s.tau_hat_se
    detail = f"mean tau_hat {s.tau_hat_mean:.5f}, |bias| {err:.2e} vs 3 SE {3 * s.tau_hat_se:.2e}"
    return _result("unbiasedness", ok, detail)


def reproduction_checks(
    s: StudySummary, min_reps: int = MIN_REPS_FOR_CHECKS
) -> list[CheckResult]:
    """All single-run checks; skipped (not failed) below the replicate floor."""
    names = [
        "group_concentration",
        "mixture_recovery",
        "z_gaussian",
        "w_z_naive_non_gaussian",
        "unbiasedness",
    ]
    if s.reps < min_reps:
        detail = f"insufficient replicates ({s.reps} < {min_reps})"
        return [CheckResult(name=n, status="skipped", detail=detail) for n in names]
    if s.reps < MIN_REPS_FOR_MIXTURE:
        mixture = CheckResult(
            name="mixture_recovery",
            status="skipped",
            detail=f"insufficient replicates for the mixture bands "
                   f"({s.reps} < {MIN_REPS_FOR_MIXTURE})",
        )
    else:
        mixture = check_mixture_recovery(s)
    return [
        check_group_concentration(s),
        mixture,
        check_z_gaussian(s),
        check_non_gaussian(s),
        check_unbiasedness(s),
    ]
