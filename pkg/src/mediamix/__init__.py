"""Marketing-mix modeling toolkit.

Synthesizes correlation-faithful datasets, fits the regression and factor
models, optimizes the promotional mix as a bounded LP over Z-scores, and
searches for causal structure, with a CLI and a scenario HTTP API on top.
"""

from .causal import CPDAG, CausalConfig, Edge, ci_test, export_dot, partial_correlation, pc_pattern
from .dataset import Dataset, VariableMeta
from .errors import (
    CommunalityExceedsOne,
    ConfigError,
    ConstantColumn,
    ConvergenceFailure,
    DataError,
    InfeasibleBounds,
    InsufficientSample,
    MediaMixError,
    NotPositiveDefinite,
    NumericalError,
    PipelineStageError,
    RankDeficient,
    ResampleExhausted,
    SingularSubmatrix,
    ZeroComponents,
)
from .example import (
    EXAMPLE_SEED,
    example_config,
    example_correlation,
    example_loadings,
    example_metadata,
    example_synthesis,
)
from .factor import (
    FactorSolution,
    RotationResult,
    analyze,
    eigen_sym,
    factor_scores,
    pca_extract,
    quartimax_rotate,
    score_coefficients,
)
from .mixopt import (
    AllocationReport,
    AllocationRow,
    LinearConstraint,
    LPProblem,
    LPSolution,
    ObjectiveSpec,
    allocation_report,
    compose_objective,
    solve_lp,
)
from .pipeline import (
    ModelBundle,
    PipelineConfig,
    bundle_from_dict,
    bundle_to_dict,
    config_hash,
    execute,
    load_bundle,
    parse_config,
    run_pipeline,
    save_bundle,
)
from .service import create_app
from .stats import (
    RegressionFit,
    StepwiseStep,
    StepwiseTrace,
    correlation,
    ols_fit,
    standardize,
    stepwise_fit,
    student_t_two_sided_p,
)
from .synth import SynthesisSpec, cholesky_pd, nearest_pd_repair, reconstruct_correlation, synthesize

__version__ = "0.1.0"

__all__ = [
    "CPDAG",
    "CausalConfig",
    "Edge",
    "ci_test",
    "export_dot",
    "partial_correlation",
    "pc_pattern",
    "Dataset",
    "VariableMeta",
    "CommunalityExceedsOne",
    "ConfigError",
    "ConstantColumn",
    "ConvergenceFailure",
    "DataError",
    "InfeasibleBounds",
    "InsufficientSample",
    "MediaMixError",
    "NotPositiveDefinite",
    "NumericalError",
    "PipelineStageError",
    "RankDeficient",
    "ResampleExhausted",
    "SingularSubmatrix",
    "ZeroComponents",
    "example_config",
    "example_correlation",
    "example_loadings",
    "example_metadata",
    "example_synthesis",
    "EXAMPLE_SEED",
    "FactorSolution",
    "RotationResult",
    "analyze",
    "eigen_sym",
    "factor_scores",
    "pca_extract",
    "quartimax_rotate",
    "score_coefficients",
    "AllocationReport",
    "AllocationRow",
    "LinearConstraint",
    "LPProblem",
    "LPSolution",
    "ObjectiveSpec",
    "allocation_report",
    "compose_objective",
    "solve_lp",
    "ModelBundle",
    "PipelineConfig",
    "bundle_from_dict",
    "bundle_to_dict",
    "config_hash",
    "execute",
    "load_bundle",
    "parse_config",
    "run_pipeline",
    "save_bundle",
    "RegressionFit",
    "StepwiseStep",
    "StepwiseTrace",
    "correlation",
    "create_app",
    "ols_fit",
    "standardize",
    "stepwise_fit",
    "student_t_two_sided_p",
    "SynthesisSpec",
    "cholesky_pd",
    "nearest_pd_repair",
    "reconstruct_correlation",
    "synthesize",
    "__version__",
]
