"""Feature assembly, LambdaMART training, ranking and cross-validation."""

from .cv import CVReport, assign_folds, cross_validate
from .features import (
    FEATURE_NAMES,
    FeatureVector,
    RankingInstance,
    UserModels,
    assemble_features,
    build_instances,
    build_user_models,
)
from .lambdamart import LambdaMartModel, lambda_gradients, rank_candidates, train_lambdamart
from .tree import RegressionTree, fit_regression_tree

__all__ = [
    "CVReport",
    "FEATURE_NAMES",
    "FeatureVector",
    "LambdaMartModel",
    "RankingInstance",
    "RegressionTree",
    "UserModels",
    "assemble_features",
    "assign_folds",
    "build_instances",
    "build_user_models",
    "cross_validate",
    "fit_regression_tree",
    "lambda_gradients",
    "rank_candidates",
    "train_lambdamart",
]
