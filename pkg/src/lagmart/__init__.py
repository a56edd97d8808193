"""lagmart: simulation and inference engine for lag martingale difference processes."""

__version__ = "0.1.0"

from .blocks import (
    BlockScheme,
    ConditionReport,
    Decomposition,
    LagSpec,
    SeriesPath,
    build_diverging_blocks,
    build_fixed_lag_blocks,
    decompose,
    diagnose_conditions,
)
from .causal import (
    AssignmentPolicy,
    EffectEstimate,
    PositivityError,
    PotentialBranch,
    assignment_prob,
    cov_w,
    enumerate_moments,
    joint_prob,
    tau_hat_t,
    tau_t,
    var_w,
)
from .ma import MovingAverageMoments, generate_ma_process
from .simulate import (
    DEFAULT_SEED,
    ReplicationRecord,
    SimConfig,
    draw_gamma,
    run_replication,
    run_study,
)
from .stats import Gmm2Fit, KsResult, gmm2_fit, kde, ks_gaussian, t_test_mean, t_test_second_moment
from .summary import StudySummary, build_summary
from .variance import (
    ArrayMoments,
    ConstantMoments,
    PsiEstimate,
    VnDiagnostic,
    psi_bar,
    psi_block,
    psi_major,
    vn_diagnostic,
)

__all__ = [
    "__version__",
    "BlockScheme",
    "ConditionReport",
    "Decomposition",
    "LagSpec",
    "SeriesPath",
    "build_diverging_blocks",
    "build_fixed_lag_blocks",
    "decompose",
    "diagnose_conditions",
    "AssignmentPolicy",
    "EffectEstimate",
    "PositivityError",
    "PotentialBranch",
    "assignment_prob",
    "cov_w",
    "enumerate_moments",
    "joint_prob",
    "tau_hat_t",
    "tau_t",
    "var_w",
    "MovingAverageMoments",
    "generate_ma_process",
    "DEFAULT_SEED",
    "ReplicationRecord",
    "SimConfig",
    "draw_gamma",
    "run_replication",
    "run_study",
    "Gmm2Fit",
    "KsResult",
    "gmm2_fit",
    "kde",
    "ks_gaussian",
    "t_test_mean",
    "t_test_second_moment",
    "StudySummary",
    "build_summary",
    "ArrayMoments",
    "ConstantMoments",
    "PsiEstimate",
    "VnDiagnostic",
    "psi_bar",
    "psi_block",
    "psi_major",
    "vn_diagnostic",
]
