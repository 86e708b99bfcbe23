"""Matrix-free compressive-sampling recovery toolkit.

Recover sparse and compressible signals from m << N noisy linear samples
u = Phi x + e using a greedy support-pursuit loop with warm-started
iterative least squares, plus the surrounding machinery: sampling
operators, restricted-isometry diagnostics, signal models, and a seeded
experiment harness.
"""

from .lsq import (
    LsqConfig,
    LsqResult,
    RankDeficiencyError,
    cg_solve,
    direct_solve,
    richardson_solve,
)
from .models import (
    BandProfile,
    CompressibleSpec,
    NoiseFold,
    band_profile,
    compressible_constants,
    compressible_energy_bound,
    compressible_tail_bounds,
    dynamic_range_iterations,
    iteration_bound,
    make_compressible,
    make_sparse,
    noise_fold,
    snr_metrics,
    unrecoverable_energy,
    unrecoverable_energy_l1_bound,
)
from .operators import (
    DenseOperator,
    DimensionMismatchError,
    GaussianOperator,
    IdentityOperator,
    PartialFourierOperator,
    SamplingOperator,
    dense_operator,
    gaussian_operator,
    identity_operator,
    partial_fourier_operator,
)
from .recovery import (
    FixedIterations,
    StepBound,
    ProxyInfinityNorm,
    RecoveryConfig,
    RecoveryReport,
    RecoveryState,
    SampleNorm,
    SolverFailure,
    check_halt,
    cosamp_iteration,
    identify,
    initial_state,
    iteration_diagnostics,
    merge_support,
    recover,
)
from .rip import (
    RipBudgetError,
    RipConsequenceReport,
    RipEstimate,
    check_rip_consequences,
    gram_deviation,
    rip_estimate,
)
from .signals import (
    Norms,
    SupportSet,
    as_samples,
    as_signal,
    best_s_approx,
    embed,
    head_tail_l1_bound,
    norms,
    restrict,
    support_of,
)
from .variants import (
    final_polish,
    recover_prune_first_variant,
    recover_residual_variant,
)

__version__ = "0.1.0"
