"""Lag-1 causal effects under sequential randomization of a binary treatment.

A single unit receives treatment A_t at each time t and yields outcome Y_t.
The lag-1 effect tau_t contrasts the previous period's treatment, averaging
uniformly over the current one, and is estimated without bias by an
inverse-probability-weighted transform of the observed outcome.  The error
W_t = tau_hat_t - tau_t has zero mean given information two steps back but
not one step back, which is exactly the lag-1 martingale difference property
the blocking and variance machinery is built for.

Closed forms for Var(W_t | F_{t-2}) and Cov(W_{t-1}, W_t | F_{t-2}) are
implemented next to a brute-force enumeration oracle over the four
(a_{t-1}, a_t) treatment paths; the two routes are kept independent so each
checks the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PositivityError",
    "AssignmentPolicy",
    "PotentialBranch",
    "EffectEstimate",
    "EnumeratedMoments",
    "assignment_prob",
    "joint_prob",
    "tau_t",
    "tau_hat_t",
    "var_w",
    "cov_w",
    "enumerate_moments",
]

PROB_FLOOR = 1e-12

REGIME_PRE = "pre"
REGIME_EVEN = "even"
REGIME_ODD = "odd"


class PositivityError(ValueError):
    """An assignment probability is degenerate (too close to 0 or 1)."""


def _check_prob(p: float) -> float:
    if not PROB_FLOOR <= p <= 1.0 - PROB_FLOOR:
        raise PositivityError(f"assignment probability {p} is degenerate")
    return p


class AssignmentPolicy:
    """Sequential binary randomization with a one-time parity-dependent switch.

    Assignments start at base_prob.  Once treatment has been observed at
    switch_count distinct time points, the regime changes permanently from the
    next time point on: if the switch happened at an odd time the probability
    of treatment drops to low_prob whenever the previous treatment was 1, and
    at an even time the probability stays at base_prob uniformly.

    The mutable state (treated_count, regime, last treatment and its realized
    probability) belongs to a single sequential pass over one treatment path.
    Hypothetical one-step lookaheads used by the moment formulas never touch
    the stored state.
    """

    def __init__(
        self,
        switch_count: int = 100,
        base_prob: float = 0.5,
        low_prob: float = 0.1,
    ) -> None:
        if switch_count < 1:
            raise ValueError("switch_count must be at least 1")
        for name, p in (("base_prob", base_prob), ("low_prob", low_prob)):
            if not 0.0 < p < 1.0:
                raise ValueError(f"{name} must lie strictly inside (0, 1)")
        self.switch_count = switch_count
        self.base_prob = base_prob
        self.low_prob = low_prob
        self.reset()

    def reset(self) -> None:
        self.treated_count = 0
        self.regime = REGIME_PRE
        self.last_a = 0
        self.last_prob = float("nan")
        self.switch_time = 0

    @classmethod
    def with_state(
        cls,
        treated_count: int,
        regime: str,
        last_a: int,
        last_prob: float,
        switch_count: int = 100,
        base_prob: float = 0.5,
        low_prob: float = 0.1,
    ) -> "AssignmentPolicy":
        """Policy pinned at an arbitrary (consistent) state, for oracles and tests."""
        if regime not in (REGIME_PRE, REGIME_EVEN, REGIME_ODD):
            raise ValueError(f"unknown regime {regime!r}")
        pol = cls(switch_count=switch_count, base_prob=base_prob, low_prob=low_prob)
        pol.treated_count = treated_count
        pol.regime = regime
        pol.last_a = last_a
        pol.last_prob = last_prob
        return pol

    # pure helpers over explicit state

    def prob_treated(self, regime: str, a_prev: int) -> float:
        if regime == REGIME_ODD and a_prev == 1:
            return self.low_prob
        return self.base_prob

    def advanced(self, treated_count: int, regime: str, t: int, a_t: int) -> tuple[int, str]:
        """State after observing A_t = a_t at time t, without mutating the policy."""
        if a_t == 1:
            treated_count += 1
            if regime == REGIME_PRE and treated_count == self.switch_count:
                regime = REGIME_ODD if t % 2 == 1 else REGIME_EVEN
        return treated_count, regime

    # sequential interface

    def observe(self, t: int, a_t: int) -> float:
        """Record the realized A_t; returns the probability it was drawn with."""
        p1 = self.prob_treated(self.regime, self.last_a)
        prob = p1 if a_t == 1 else 1.0 - p1
        pre_regime = self.regime
        self.treated_count, self.regime = self.advanced(
            self.treated_count, self.regime, t, a_t
        )
        if pre_regime == REGIME_PRE and self.regime != REGIME_PRE:
            self.switch_time = t
        self.last_a = a_t
        self.last_prob = prob
        return prob


@dataclass(frozen=True)
class PotentialBranch:
    """The 2x2 slice of potential outcomes at time t over the last two treatments.

    ``y[i][j]`` is Y_t given the realized prefix through t-2, previous
    treatment a_{t-1} = i, and current treatment a_t = j.  Only this slice is
    ever consumed; the full exponential table never needs to exist.
    """

    t: int
    y: np.ndarray
    realized_prev: int
    realized_cur: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.y, dtype=float)
        if arr.shape != (2, 2):
            raise ValueError(f"outcome table must be 2x2, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("outcome table has non-finite entries")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "y", arr)
        for name in ("realized_prev", "realized_cur"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1")

    @property
    def observed(self) -> float:
        return float(self.y[self.realized_prev, self.realized_cur])


@dataclass(frozen=True)
class EffectEstimate:
    tau_t: float
    tau_hat_t: float
    w_t: float


@dataclass(frozen=True)
class EnumeratedMoments:
    """Exact conditional moments given F_{t-2} from the four-path enumeration."""

    mean_w_prev: float
    mean_w_cur: float
    var_w_cur: float
    cov: float


def assignment_prob(policy: AssignmentPolicy, a_prev: int, t: int) -> float:
    """P(A_t = 1 | A_{t-1} = a_prev) with the policy state through t - 1."""
    return policy.prob_treated(policy.regime, a_prev)


def joint_prob(
    policy: AssignmentPolicy,
    a_prev_prev: int,
    a_prev: int,
    a_cur: int,
    t: int,
) -> float:
    """P(A_{t-1} = a_prev, A_t = a_cur | F_{t-2}), policy state through t - 2.

    The second factor accounts for a hypothetical regime switch triggered by
    a_prev at time t - 1.
    """
    p1 = policy.prob_treated(policy.regime, a_prev_prev)
    pa = p1 if a_prev == 1 else 1.0 - p1
    _, regime_h = policy.advanced(policy.treated_count, policy.regime, t - 1, a_prev)
    p2 = policy.prob_treated(regime_h, a_prev)
    pb = p2 if a_cur == 1 else 1.0 - p2
    return pa * pb


def tau_t(branch: PotentialBranch) -> float:
    """Lag-1 causal effect: the previous-treatment contrast averaged over a_t."""
    y = branch.y
    return 0.5 * (y[1, 1] - y[0, 1]) + 0.5 * (y[1, 0] - y[0, 0])


def tau_hat_t(branch: PotentialBranch, policy: AssignmentPolicy, t: int) -> float:
    """Unbiased one-step estimate from the observed outcome, policy state through t - 2."""
    joint = joint_prob(policy, policy.last_a, branch.realized_prev, branch.realized_cur, t)
    if joint < PROB_FLOOR:
        raise PositivityError(f"joint assignment probability {joint} is degenerate")
    sign = 1.0 if branch.realized_prev == 1 else -1.0
    return sign * branch.observed / (2.0 * joint)


def effect_estimate(branch: PotentialBranch, policy: AssignmentPolicy, t: int) -> EffectEstimate:
    tau = tau_t(branch)
    tau_hat = tau_hat_t(branch, policy, t)
    return EffectEstimate(tau_t=tau, tau_hat_t=tau_hat, w_t=tau_hat - tau)


def _step_probs(policy: AssignmentPolicy, t: int) -> tuple[float, float, float]:
    """(P_{t-1}(1), p_t(1 | a=0), p_t(1 | a=1)) from the state through t - 2."""
    p_prev1 = _check_prob(policy.prob_treated(policy.regime, policy.last_a))
    _, reg0 = policy.advanced(policy.treated_count, policy.regime, t - 1, 0)
    q0 = _check_prob(policy.prob_treated(reg0, 0))
    _, reg1 = policy.advanced(policy.treated_count, policy.regime, t - 1, 1)
    q1 = _check_prob(policy.prob_treated(reg1, 1))
    return p_prev1, q0, q1


def var_w(branch: PotentialBranch, policy: AssignmentPolicy, t: int) -> float:
    """Var(W_t | F_{t-2}) in closed form, policy state through t - 2.

    The first term carries the variance of the previous-treatment draw; the
    second sums, over each previous treatment value, the variance of the
    current-treatment draw weighted by the inverse path probability.
    """
    p1, q0, q1 = _step_probs(policy, t)
    p0 = 1.0 - p1
    y = branch.y
    r0 = y[0, 0] + y[0, 1]
    r1 = y[1, 0] + y[1, 1]
    term1 = (p0 * p1 / 4.0) * (r1 / p1 + r0 / p0) ** 2
    term2_0 = (y[0, 1] / q0 - y[0, 0] / (1.0 - q0)) ** 2 * (q0 * (1.0 - q0) / (4.0 * p0))
    term2_1 = (y[1, 1] / q1 - y[1, 0] / (1.0 - q1)) ** 2 * (q1 * (1.0 - q1) / (4.0 * p1))
    return term1 + term2_0 + term2_1


def cov_w(
    branch_prev: PotentialBranch,
    branch_cur: PotentialBranch,
    policy: AssignmentPolicy,
    t: int,
    a_prev_prev: int,
) -> float:
    """Cov(W_{t-1}, W_t | F_{t-2}) in closed form.

    Needs the realized A_{t-2} (row of the previous branch and sign) and the
    probability it was drawn with, which the policy recorded when it observed
    A_{t-2}.  Policy state through t - 2.
    """
    if branch_cur.t != branch_prev.t + 1:
        raise ValueError("branches must sit at consecutive time points")
    pr_prev = policy.last_prob
    if not np.isfinite(pr_prev) or pr_prev < PROB_FLOOR:
        raise PositivityError(f"realized P_(t-2) probability {pr_prev} is degenerate")
    p1, _, _ = _step_probs(policy, t)
    p0 = 1.0 - p1
    sign = 1.0 if a_prev_prev == 1 else -1.0
    yp = branch_prev.y
    yc = branch_cur.y
    r0 = yc[0, 0] + yc[0, 1]
    r1 = yc[1, 0] + yc[1, 1]
    yp0 = yp[a_prev_prev, 0]
    yp1 = yp[a_prev_prev, 1]
    lead = (sign / (4.0 * pr_prev)) * (yp1 / p1 * r1 - yp0 / p0 * r0)
    correction = tau_t(branch_cur) * (sign / (2.0 * pr_prev)) * (yp0 + yp1)
    return lead - correction


def enumerate_moments(
    branch_prev: PotentialBranch,
    branch_cur: PotentialBranch,
    policy: AssignmentPolicy,
    t: int,
    a_prev_prev: int,
) -> EnumeratedMoments:
    """Ground-truth conditional moments by summing over all four treatment paths.

    Weights each (a_{t-1}, a_t) path by its joint probability under the
    policy (including hypothetical regime switches) and reads the error
    definitions directly, with no reference to the closed forms above.
    """
    pr_prev = policy.last_prob
    if not np.isfinite(pr_prev) or pr_prev < PROB_FLOOR:
        raise PositivityError(f"realized P_(t-2) probability {pr_prev} is degenerate")
    tau_prev = tau_t(branch_prev)
    tau_cur = tau_t(branch_cur)
    sign_prev = 1.0 if a_prev_prev == 1 else -1.0
    p_prev1 = policy.prob_treated(policy.regime, a_prev_prev)

    e_wp = 0.0
    e_wc = 0.0
    e_wc2 = 0.0
    e_cross = 0.0
    for a in (0, 1):
        pa = p_prev1 if a == 1 else 1.0 - p_prev1
        _, regime_h = policy.advanced(policy.treated_count, policy.regime, t - 1, a)
        qa = policy.prob_treated(regime_h, a)
        w_prev = sign_prev * branch_prev.y[a_prev_prev, a] / (2.0 * pr_prev * pa) - tau_prev
        for b in (0, 1):
            pb = qa if b == 1 else 1.0 - qa
            sign_cur = 1.0 if a == 1 else -1.0
            w_cur = sign_cur * branch_cur.y[a, b] / (2.0 * pa * pb) - tau_cur
            weight = pa * pb
            e_wp += weight * w_prev
            e_wc += weight * w_cur
            e_wc2 += weight * w_cur * w_cur
            e_cross += weight * w_prev * w_cur
    return EnumeratedMoments(
        mean_w_prev=e_wp,
        mean_w_cur=e_wc,
        var_w_cur=e_wc2 - e_wc * e_wc,
        cov=e_cross - e_wp * e_wc,
    )
