from .base import (
    ConstantEstimator,
    GradientEstimator,
    OracleEstimator,
    PropensityEstimator,
    TrainConfig,
    TrainingLog,
    stratified_split,
)
from .batching import RecordBatch, TokenBatch, flatten_codes, pad_records
from .bert import BertEstimator
from .flat import FittedFeatures, LogisticRegressionEstimator, MlpEstimator, fit_features
from .lstm import LstmEstimator
from .registry import DEFAULT_LEARNING_RATES, REGISTRY, default_train_config, make_estimator

__all__ = [
    "BertEstimator",
    "ConstantEstimator",
    "DEFAULT_LEARNING_RATES",
    "FittedFeatures",
    "GradientEstimator",
    "LogisticRegressionEstimator",
    "LstmEstimator",
    "MlpEstimator",
    "OracleEstimator",
    "PropensityEstimator",
    "REGISTRY",
    "RecordBatch",
    "TokenBatch",
    "TrainConfig",
    "TrainingLog",
    "default_train_config",
    "fit_features",
    "flatten_codes",
    "make_estimator",
    "pad_records",
    "stratified_split",
]
