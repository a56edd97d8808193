"""Monte Carlo replication study of the lag-1 treatment-effect estimator.

Each replicate simulates T time steps of sequentially randomized binary
treatment with Gamma-distributed potential outcomes, accumulates the average
effect, its unbiased estimate, and the oracle variance (with and without the
lagged covariance terms), then normalizes the estimation error two ways:

    w       = tau_hat - tau
    z       = sqrt(T / psi_bar) * w        (covariances included)
    z_naive = sqrt(T / psi_naive) * w      (covariances dropped)

Replicates are embarrassingly parallel; every replicate derives its own RNG
stream from (master_seed, rep_id) alone, so results are invariant to the
worker count.  The compiled kernel carries the hot loop; a pure-Python
reference built from the causal-module operations reproduces it bit for bit
and serves as its correctness oracle.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .causal import AssignmentPolicy, PotentialBranch, cov_w, tau_hat_t, tau_t, var_w

__all__ = [
    "DEFAULT_SEED",
    "SimConfig",
    "ReplicationRecord",
    "ReplicationMoments",
    "draw_gamma",
    "run_replication",
    "run_replication_with_moments",
    "reference_replication",
    "run_study",
]

DEFAULT_SEED = 1729

WORKERS_ENV = "LAGMART_WORKERS"


@dataclass(frozen=True)
class SimConfig:
    T: int = 100_000
    reps: int = 10_000
    master_seed: int = DEFAULT_SEED
    theta0: float = 2.0
    theta1: float = 3.0
    switch_count: int = 100
    base_prob: float = 0.5
    low_prob: float = 0.1
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.T < 3:
            raise ValueError("T must be at least 3")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.theta0 <= 0 or self.theta1 <= 0:
            raise ValueError("outcome shapes must be positive")
        if self.master_seed < 0 or self.master_seed > 2**64 - 1:
            raise ValueError("master_seed must fit in 64 bits")

    def resolve_workers(self) -> int:
        if self.workers is not None:
            return max(1, self.workers)
        env = os.environ.get(WORKERS_ENV)
        if env:
            return max(1, int(env))
        return max(1, os.cpu_count() or 1)


@dataclass(frozen=True)
class ReplicationRecord:
    rep_id: int
    seed: int
    parity_group: str  # "even" | "odd" | "none" (switch never reached)
    switch_time: int
    tau: float
    tau_hat: float
    w: float
    psi_bar: float
    psi_naive: float
    z: float
    z_naive: float


@dataclass(frozen=True)
class ReplicationMoments:
    """Per-step conditional moments along one replicate.

    ``var_w[t]`` is Var(W_t | F_{t-2}) for 2 <= t <= T and ``cov_w[t]`` is
    Cov(W_{t-1}, W_t | F_{t-2}) for 3 <= t <= T; unused slots are zero.
    """

    var_w: np.ndarray
    cov_w: np.ndarray
    start: int = 2


def _rep_seed_sequence(master_seed: int, rep_id: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master_seed, rep_id])


def _rep_rng(master_seed: int, rep_id: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(_rep_seed_sequence(master_seed, rep_id)))


def draw_gamma(shape: float, rate: float, rng: np.random.Generator) -> float:
    """One Gamma(shape, rate) draw (mean shape/rate) from the given stream."""
    if shape <= 0.0 or rate <= 0.0:
        raise ValueError("shape and rate must be positive")
    return _kernel.standard_gamma(rng, shape) / rate


def _build_record(config: SimConfig, rep_id: int, outputs) -> ReplicationRecord:
    tau, tau_hat, psi_bar, psi_naive, switch_time, _treated = outputs
    if not (psi_bar > 0.0 and psi_naive > 0.0):
        raise RuntimeError(
            f"replication {rep_id}: nonpositive variance estimate "
            f"(psi_bar={psi_bar}, psi_naive={psi_naive})"
        )
    w = tau_hat - tau
    z = math.sqrt(config.T / psi_bar) * w
    z_naive = math.sqrt(config.T / psi_naive) * w
    if switch_time == 0:
        parity = "none"
    else:
        parity = "even" if switch_time % 2 == 0 else "odd"
    seed_word = int(_rep_seed_sequence(config.master_seed, rep_id).generate_state(1, np.uint64)[0])
    return ReplicationRecord(
        rep_id=rep_id,
        seed=seed_word,
        parity_group=parity,
        switch_time=int(switch_time),
        tau=tau,
        tau_hat=tau_hat,
        w=w,
        psi_bar=psi_bar,
        psi_naive=psi_naive,
        z=z,
        z_naive=z_naive,
    )


def run_replication(config: SimConfig, rep_id: int) -> ReplicationRecord:
    """One replicate; deterministic given (config.master_seed, rep_id)."""
    rng = _rep_rng(config.master_seed, rep_id)
    empty = np.zeros(0)
    outputs = _kernel.simulate_replication(
        rng,
        config.T,
        config.theta0,
        config.theta1,
        config.switch_count,
        config.base_prob,
        config.low_prob,
        False,
        empty,
        empty,
    )
    return _build_record(config, rep_id, outputs)


def run_replication_with_moments(
    config: SimConfig, rep_id: int
) -> tuple[ReplicationRecord, ReplicationMoments]:
    """Same as run_replication but also returns the per-step moment arrays."""
    rng = _rep_rng(config.master_seed, rep_id)
    var_out = np.zeros(config.T + 1)
    cov_out = np.zeros(config.T + 1)
    outputs = _kernel.simulate_replication(
        rng,
        config.T,
        config.theta0,
        config.theta1,
        config.switch_count,
        config.base_prob,
        config.low_prob,
        True,
        var_out,
        cov_out,
    )
    record = _build_record(config, rep_id, outputs)
    return record, ReplicationMoments(var_w=var_out, cov_w=cov_out)


def reference_replication(config: SimConfig, rep_id: int) -> ReplicationRecord:
    """Pure-Python twin of the compiled kernel, built from the causal operations.

    Consumes the identical RNG stream (the scalar gamma draws go through the
    same compiled sampler) and performs the identical compensated
    accumulation, so its record must match run_replication bit for bit.
    """
    cfg = config
    rng = _rep_rng(cfg.master_seed, rep_id)
    policy = AssignmentPolicy(
        switch_count=cfg.switch_count, base_prob=cfg.base_prob, low_prob=cfg.low_prob
    )

    p1 = policy.prob_treated(policy.regime, policy.last_a)
    a_t = 1 if rng.random() < p1 else 0
    policy.observe(1, a_t)

    tre_m2, reg_m2, a_m2, pr_m2 = 0, "pre", 0, 1.0
    a_m1 = a_t
    pr_m1 = policy.last_prob
    branch_prev: PotentialBranch | None = None

    s_tau = c_tau = 0.0
    s_that = c_that = 0.0
    s_var = c_var = 0.0
    s_cov = c_cov = 0.0

    def kadd(s: float, c: float, x: float) -> tuple[float, float]:
        y = x - c
        t = s + y
        return t, (t - s) - y

    for t in range(2, cfg.T + 1):
        y00 = _kernel.standard_gamma(rng, cfg.theta0)
        y01 = _kernel.standard_gamma(rng, cfg.theta0)
        y10 = _kernel.standard_gamma(rng, cfg.theta1)
        y11 = _kernel.standard_gamma(rng, cfg.theta1)

        # treatment draw consumes the stream before any branch arithmetic
        tre_m1, reg_m1 = policy.treated_count, policy.regime
        pt1 = policy.prob_treated(reg_m1, a_m1)
        a_t = 1 if rng.random() < pt1 else 0

        branch = PotentialBranch(
            t=t, y=np.array([[y00, y01], [y10, y11]]), realized_prev=a_m1, realized_cur=a_t
        )
        pol_m2 = AssignmentPolicy.with_state(
            tre_m2,
            reg_m2,
            a_m2,
            pr_m2,
            switch_count=cfg.switch_count,
            base_prob=cfg.base_prob,
            low_prob=cfg.low_prob,
        )
        vw = var_w(branch, pol_m2, t)
        tau = tau_t(branch)
        tauhat = tau_hat_t(branch, pol_m2, t)
        if t >= 3:
            cw = cov_w(branch_prev, branch, pol_m2, t, a_m2)

        policy.observe(t, a_t)

        s_tau, c_tau = kadd(s_tau, c_tau, tau)
        s_that, c_that = kadd(s_that, c_that, tauhat)
        s_var, c_var = kadd(s_var, c_var, vw)
        if t >= 3:
            s_cov, c_cov = kadd(s_cov, c_cov, cw)

        tre_m2, reg_m2 = tre_m1, reg_m1
        a_m2, pr_m2 = a_m1, pr_m1
        a_m1, pr_m1 = a_t, policy.last_prob
        branch_prev = branch

    tm1 = float(cfg.T) - 1.0
    tf = float(cfg.T)
    psi_naive = s_var / tf
    psi_bar = psi_naive + (2.0 * s_cov) / tf
    outputs = (
        s_tau / tm1,
        s_that / tm1,
        psi_bar,
        psi_naive,
        policy.switch_time,
        policy.treated_count,
    )
    return _build_record(cfg, rep_id, outputs)


def run_study(config: SimConfig, csv_path=None, progress: bool = False):
    """Run every replicate and aggregate; optionally stream records to CSV.

    Records come back in rep_id order regardless of worker scheduling.  The
    CSV (when requested) is appended strictly in rep_id order as replicates
    complete, bounding memory held by the writer.  Any replication failure
    aborts the study naming the failing rep_id.

    Returns (records, summary).
    """
    from .io import open_record_writer
    from .summary import build_summary

    workers = config.resolve_workers()
    records: list[ReplicationRecord | None] = [None] * config.reps

    writer = open_record_writer(csv_path) if csv_path is not None else None
    pending: dict[int, ReplicationRecord] = {}
    next_to_write = 0
    try:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(run_replication, config, rep_id): rep_id
                for rep_id in range(config.reps)
            }
            done = 0
            from concurrent.futures import as_completed

            for fut in as_completed(futures):
                rep_id = futures[fut]
                try:
                    rec = fut.result()
                except Exception as exc:
                    for other in futures:
                        other.cancel()
                    raise RuntimeError(f"replication {rep_id} failed: {exc}") from exc
                records[rep_id] = rec
                done += 1
                if progress and done % 500 == 0:
                    print(f"  {done}/{config.reps} replicates", flush=True)
                if writer is not None:
                    pending[rep_id] = rec
                    while next_to_write in pending:
                        writer.write(pending.pop(next_to_write))
                        next_to_write += 1
    finally:
        if writer is not None:
            writer.close()
    out = [r for r in records if r is not None]
    summary = build_summary(out)
    return out, summary

