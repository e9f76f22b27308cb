"""Baseline estimators on flat covariates: logistic regression and MLP,
each consuming standardized occurrence counts or the binary HDPS expansion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..claimsgen.types import LabeledSample
from ..features import (
    HdpsThresholds,
    StandardizerStats,
    apply_hdps,
    apply_standardizer,
    count_matrix,
    fit_hdps,
    fit_standardizer,
)
from ..numerics import Affine, Value
from .base import GradientEstimator, TrainConfig


@dataclass
class FittedFeatures:
    """Feature statistics fitted once (by default on the entire dataset)."""

    standardizer: StandardizerStats
    hdps: HdpsThresholds
    fitted_on: str = "entire_dataset"


def fit_features(samples: list[LabeledSample], d_x: int,
                 fitted_on: str = "entire_dataset") -> FittedFeatures:
    counts = count_matrix([s.seq for s in samples], d_x)
    return FittedFeatures(
        standardizer=fit_standardizer(counts, fitted_on),
        hdps=fit_hdps(counts, fitted_on),
        fitted_on=fitted_on,
    )


class FlatEstimator(GradientEstimator):
    """Shared machinery for count/HDPS featurized models.

    When `features` is None the statistics are fitted on each fit() call's
    training samples (the leakage-free variant); otherwise the preset,
    whole-dataset statistics are used, following the default protocol.
    """

    def __init__(self, d_x: int, feature_mode: str = "counts",
                 features: FittedFeatures | None = None):
        super().__init__(d_x)
        if feature_mode not in ("counts", "hdps"):
            raise ValueError(f"unknown feature_mode {feature_mode!r}")
        self.feature_mode = feature_mode
        self.features = features

    @property
    def d_in(self) -> int:
        return 3 * self.d_x if self.feature_mode == "hdps" else self.d_x

    def _prepare_fit(self, samples: list[LabeledSample], config: TrainConfig) -> None:
        if self.features is None:
            self.features = fit_features(samples, self.d_x, fitted_on="train_fold")

    def _featurize(self, samples: list[LabeledSample]) -> np.ndarray:
        if self.features is None:
            raise RuntimeError(f"{self.name}: features not fitted")
        counts = count_matrix([s.seq for s in samples], self.d_x)
        if self.feature_mode == "hdps":
            return apply_hdps(counts, self.features.hdps)
        return apply_standardizer(counts, self.features.standardizer)


class LogisticRegressionEstimator(FlatEstimator):
    name = "lr"

    def _build(self, rng: np.random.Generator) -> None:
        self.head = Affine(rng, self.d_in, 1, "head")
        self._params = self.head.params()

    def _forward_batch(self, samples: list[LabeledSample]) -> Value:
        x = Value(self._featurize(samples))
        return self.head(x).sigmoid().reshape(len(samples))


class MlpEstimator(FlatEstimator):
    """Two hidden layers of 64 rectified units, sigmoid output."""

    name = "mlp"
    hidden = 64

    def _build(self, rng: np.random.Generator) -> None:
        self.l1 = Affine(rng, self.d_in, self.hidden, "l1")
        self.l2 = Affine(rng, self.hidden, self.hidden, "l2")
        self.head = Affine(rng, self.hidden, 1, "head")
        self._params = {**self.l1.params(), **self.l2.params(), **self.head.params()}

    def _forward_batch(self, samples: list[LabeledSample]) -> Value:
        x = Value(self._featurize(samples))
        h = self.l2(self.l1(x).relu()).relu()
        return self.head(h).sigmoid().reshape(len(samples))
