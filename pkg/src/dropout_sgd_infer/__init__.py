"""Dropout-regularized GD/SGD for linear models with online inference."""

from .gd_dropout import (
    AsymptoticCov,
    GdProblem,
    GdState,
    agd_average,
    asymptotic_cov_xi,
    coupled_gmc_run,
    empirical_contraction_sq,
    exact_contraction_sq,
    gd_step,
    l2_minimizer_gd,
    lr_bound_gd,
)
from .inference import (
    ConfidenceInterval,
    JointRegion,
    chi2_quantile,
    ci_coordinate,
    ci_projection,
    coverage_tally,
    inv_norm_cdf,
    joint_region,
    joint_region_contains,
)
from .longrun_cov import BlockSchedule, CovState, cov_finalize, cov_update, offline_nbm
from .randgen import (
    DropoutMask,
    FixedDesignData,
    RngStream,
    StreamSample,
    gen_fixed_design,
    sample_dropout,
    stream_sample,
)
from .sgd_dropout import (
    AsgdState,
    MultiRateRun,
    SgdConfig,
    SgdState,
    asgd_update,
    l2_minimizer_sgd,
    lr_admissible_q2,
    parallel_run,
    sgd_step,
)

__version__ = "0.1.0"
