"""Quality/diversity evaluation of text generators.

Estimates how distinguishable model-generated text is from reference text
by running a k-nearest-neighbor two-sample test in a feature space built
from per-sentence model log-probabilities and replicate human typicality
judgments.  Ships with an exact finite-support oracle for validating the
estimator and an HTTP service for collecting the human judgments.
"""

from .dataset import (
    DatasetError,
    EvalDataset,
    EvaluatedExample,
    RatingRecord,
    hj,
    load_dataset,
    serialize_dataset,
    tokenize_count,
)
from .features import ScalingProfile, featurize, fit_scaling, hj_features, huse_features, opt_features
from .classifier import KnnConfig, brute_force_loo, knn_confidence, loo_error, loo_votes
from .metrics import HuseReport, StabilityReport, compute_huse, export_surface, stability
from .oracle import (
    DiscreteDistribution,
    DiscretePair,
    RaterModel,
    anneal,
    check_approximation_bound,
    check_invertible_invariance,
    exact_feature_error,
    exact_optimal_error_rate,
    exact_tv,
    random_pair,
    sample_eval_dataset,
    sample_opt_features,
)

__version__ = "0.1.0"
