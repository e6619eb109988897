"""Model order selection via tilted (exponentially embedded) evidence, with
AIC/AICc/MDL baselines, applied to estimating the degree of noncircularity
of complex Gaussian vectors, plus a seeded Monte Carlo harness."""

__version__ = "0.1.0"

from .criteria import (
    Convention,
    Criterion,
    CriterionScores,
    ModelEvidence,
    aic_score,
    aicc_score,
    beef_score,
    mdl_score,
    select_order,
)
from .dataio import ComplexDataset, load_dataset_csv, save_dataset_csv
from .errors import MoselError
from .linear_eef import (
    EefBreakdown,
    EmbeddedDensityParams,
    LinearModel,
    bayes_factor_g_prior,
    eef_decomposition,
    eef_llr,
    embedded_log_density,
    estimate_eta,
    mi_per_dimension,
    projection_statistic,
)
from .noncircularity import (
    CircularitySpectrum,
    DegreeEstimate,
    SecondOrderStats,
    circularity_spectrum,
    estimate_degree,
    evidence_ladder,
    sample_stats,
)
from .numerics import (
    composite_real_covariance,
    hermitian_inv_sqrt,
    sample_complex_gaussian,
    stream,
)
from .simulation import (
    ConvergencePoint,
    PcCurve,
    ScenarioConfig,
    builtin_scenario,
    convergence_sweep,
    run_scenario,
    run_trial,
)

__all__ = [
    "__version__",
    "MoselError",
    "ComplexDataset",
    "load_dataset_csv",
    "save_dataset_csv",
    "stream",
    "hermitian_inv_sqrt",
    "composite_real_covariance",
    "sample_complex_gaussian",
    "LinearModel",
    "EmbeddedDensityParams",
    "EefBreakdown",
    "projection_statistic",
    "estimate_eta",
    "embedded_log_density",
    "eef_llr",
    "eef_decomposition",
    "mi_per_dimension",
    "bayes_factor_g_prior",
    "Criterion",
    "Convention",
    "ModelEvidence",
    "CriterionScores",
    "beef_score",
    "mdl_score",
    "aic_score",
    "aicc_score",
    "select_order",
    "SecondOrderStats",
    "CircularitySpectrum",
    "DegreeEstimate",
    "sample_stats",
    "circularity_spectrum",
    "evidence_ladder",
    "estimate_degree",
    "ScenarioConfig",
    "PcCurve",
    "ConvergencePoint",
    "run_trial",
    "run_scenario",
    "convergence_sweep",
    "builtin_scenario",
]
