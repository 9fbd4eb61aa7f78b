"""Pattern-based attribution for a bigram CNN sentiment classifier."""

from patternattr._core import (
    AttributionResult,
    EstimatorSpec,
    LabeledDataset,
    LoadedModel,
    Network,
    PatternAttrError,
    PatternSet,
    SyntheticProblem,
    attribute,
    covariance_vector,
    criteria_report,
    estimate_patterns,
    estimate_signal,
    generate_synthetic,
    load_dataset,
    load_model,
    load_patterns,
    max_projection_correlation,
    pearson,
    render_html,
    rho,
    rho_prime,
    save_model,
    save_patterns,
    sha256_file,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "AttributionResult",
    "EstimatorSpec",
    "LabeledDataset",
    "LoadedModel",
    "Network",
    "PatternAttrError",
    "PatternSet",
    "SyntheticProblem",
    "attribute",
    "covariance_vector",
    "criteria_report",
    "estimate_patterns",
    "estimate_signal",
    "generate_synthetic",
    "load_dataset",
    "load_model",
    "load_patterns",
    "max_projection_correlation",
    "pearson",
    "render_html",
    "rho",
    "rho_prime",
    "save_model",
    "save_patterns",
    "sha256_file",
    "tokenize",
    "__version__",
]
