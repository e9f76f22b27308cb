"""Estimator registry: names, default learning rates, and builders."""

from __future__ import annotations

from ..errors import ConfigError
from .base import ConstantEstimator, OracleEstimator, PropensityEstimator, TrainConfig
from .bert import BertEstimator
from .flat import FittedFeatures, LogisticRegressionEstimator, MlpEstimator
from .lstm import LstmEstimator

REGISTRY = ("lr", "lr-hdps", "mlp", "mlp-hdps", "lstm", "bert-code", "bert-record",
            "oracle", "constant")

DEFAULT_LEARNING_RATES = {
    "lr": 1e-3,
    "lr-hdps": 1e-3,
    "mlp": 1e-4,
    "mlp-hdps": 1e-4,
    "lstm": 1e-5,
    "bert-code": 1e-5,
    "bert-record": 1e-5,
    "oracle": 0.0,
    "constant": 0.0,
}


def default_train_config(name: str, **overrides) -> TrainConfig:
    if name not in REGISTRY:
        raise ConfigError(f"unknown estimator {name!r}; registry: {', '.join(REGISTRY)}")
    kwargs = {"learning_rate": DEFAULT_LEARNING_RATES[name]}
    kwargs.update(overrides)
    return TrainConfig(**kwargs)


def make_estimator(name: str, d_x: int,
                   features: FittedFeatures | None = None) -> PropensityEstimator:
    if name == "lr":
        est: PropensityEstimator = LogisticRegressionEstimator(d_x, "counts", features)
    elif name == "lr-hdps":
        est = LogisticRegressionEstimator(d_x, "hdps", features)
    elif name == "mlp":
        est = MlpEstimator(d_x, "counts", features)
    elif name == "mlp-hdps":
        est = MlpEstimator(d_x, "hdps", features)
    elif name == "lstm":
        est = LstmEstimator(d_x)
    elif name == "bert-code":
        est = BertEstimator(d_x, "code")
    elif name == "bert-record":
        est = BertEstimator(d_x, "record")
    elif name == "oracle":
        est = OracleEstimator()
    elif name == "constant":
        est = ConstantEstimator()
    else:
        raise ConfigError(f"unknown estimator {name!r}; registry: {', '.join(REGISTRY)}")
    est.name = name
    return est
