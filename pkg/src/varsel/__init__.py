"""Variable selection via marginal regression and the lasso.

Library layout:

- ``linalg``: design standardization, Gram partitioning, eigen extremes,
  SPD solves, sequential projection residuals.
- ``conditions``: the named exact-recovery conditions plus coherence bounds
  and the adversarial coefficient constructor.
- ``marginal``: marginal coefficients, thresholding, rank screening, the
  data-driven support-size estimator, the signal-resolution functional.
- ``lasso``: coordinate-descent solver with KKT certificates, paths, and
  sign-consistency scoring.
- ``random_model``: mixture priors, the Chernoff faithfulness bound, and
  design dependence diagnostics.
- ``phase``: calibrated Hamming-distance Monte Carlo over the sparsity/
  signal-strength plane.
- ``benchmark``: error-versus-model-size curves on equicorrelated designs.
- ``cli``: the ``varsel`` command-line front end.
"""

from .conditions import (
    ConditionParams,
    ConditionRecord,
    check_faithfulness,
    check_faithfulness_noisy,
    check_irrepresentable,
    check_irrepresentable_uniform,
    check_min_eigenvalue,
    check_shrinkage_gap,
    construct_unfaithful_beta,
    incoherence,
    incoherence_bounds,
    irrepresentable_sign_max,
    report_to_json,
)
from .benchmark import BenchmarkRow, ExperimentConfig, run_benchmark
from .errors import NumericalError, ValidationError, VarselError
from .lasso import LassoFit, lasso_path, lasso_solve, sign_consistency
from .linalg import (
    DesignMatrix,
    GramPartition,
    SupportSet,
    gram_partition,
    inf_operator_norm,
    min_eigenvalue,
    project_residual_norms,
    solve_spd,
    standardize_columns,
)
from .marginal import (
    MarginalFit,
    estimate_support_size,
    marginal_coefficients,
    screening_path,
    signal_resolution,
    threshold_select,
    top_k_screen,
)
from .phase import (
    Calibration,
    MCHammingResult,
    PhasePoint,
    Region,
    calibrate,
    classify_region,
    exponent_regression,
    hamming_distance,
    mc_hamming,
    recovery_boundary,
    sample_instance,
    theoretical_exponent,
)
from .problem import RegressionProblem
from .random_model import (
    CoefficientPrior,
    DesignStats,
    check_faithfulness_prior,
    dependence_diagnostics,
    design_stats,
    excess_mgf_sum,
    faithfulness_bound,
    sample_coefficients,
)

__version__ = "0.1.0"
