"""Estimator interface and the shared minibatch training loop.

Every estimator maps a record sequence (or its flat features) to a
propensity score strictly inside (0, 1). Gradient models train with
minibatch Adam on BCE against the treatment label, early-stopping on an
inner validation split stratified by treatment, and restore the
best-validation parameters.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace

import numpy as np

from ..claimsgen.types import LabeledSample
from ..errors import TrainingError
from ..numerics import Adam, Value, bce_loss
from ..seeding import derive_rng


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 16
    learning_rate: float = 1e-5
    max_epochs: int = 200
    patience: int = 10
    min_delta: float = 1e-4
    val_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must lie in (0, 1)")

    def with_seed(self, seed: int) -> TrainConfig:
        return replace(self, seed=seed)


@dataclass
class TrainingLog:
    train_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = float("inf")
    stopped_epoch: int = -1
    skipped_steps: int = 0
    n_train: int = 0
    n_val: int = 0
    n_truncated: int = 0

    def to_json_dict(self) -> dict:
        return {
            "train_losses": self.train_losses,
            "val_losses": self.val_losses,
            "best_epoch": self.best_epoch,
            "best_val_loss": self.best_val_loss,
            "stopped_epoch": self.stopped_epoch,
            "skipped_steps": self.skipped_steps,
            "n_train": self.n_train,
            "n_val": self.n_val,
            "n_truncated": self.n_truncated,
        }


class PropensityEstimator(ABC):
    """Common surface: fit on labeled samples, predict scores in (0, 1)."""

    name: str = "base"

    def __init__(self) -> None:
        self.trained = False

    @abstractmethod
    def fit(self, samples: list[LabeledSample], config: TrainConfig) -> TrainingLog: ...

    @abstractmethod
    def predict_ps(self, samples: list[LabeledSample]) -> np.ndarray: ...

    def _require_trained(self) -> None:
        if not self.trained:
            raise RuntimeError(f"{self.name}: predict_ps called before fit")


def stratified_split(labels: np.ndarray, val_fraction: float,
                     rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Indices (train, val) with the validation set stratified by label."""
    train_parts, val_parts = [], []
    for cls in (0, 1):
        idx = np.nonzero(labels == cls)[0]
        idx = rng.permutation(idx)
        n_val = int(round(val_fraction * idx.size))
        if idx.size >= 2:
            n_val = min(max(n_val, 1), idx.size - 1)
        else:
            n_val = 0
        val_parts.append(idx[:n_val])
        train_parts.append(idx[n_val:])
    train = np.sort(np.concatenate(train_parts))
    val = np.sort(np.concatenate(val_parts))
    return train, val


def _np_bce(p: np.ndarray, y: np.ndarray) -> float:
    pc = np.clip(p, 1e-7, 1.0 - 1e-7)
    return float(-(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc)).mean())


class GradientEstimator(PropensityEstimator):
    """Base for models trained with the Adam/BCE loop.

    Subclasses implement `_build(d_x, rng)` to create parameters,
    `_forward_batch(samples) -> Value` returning scores of shape (B,), and
    `params()` exposing trainable parameters by name.
    """

    predict_batch_size = 256

    def __init__(self, d_x: int):
        super().__init__()
        self.d_x = d_x
        self._params: dict[str, Value] = {}

    @abstractmethod
    def _build(self, rng: np.random.Generator) -> None: ...

    @abstractmethod
    def _forward_batch(self, samples: list[LabeledSample]) -> Value: ...

    def _prepare_fit(self, samples: list[LabeledSample], config: TrainConfig) -> None:
        """Hook for feature/statistics fitting before training starts."""

    def params(self) -> dict[str, Value]:
        return self._params

    def fit(self, samples: list[LabeledSample], config: TrainConfig) -> TrainingLog:
        if not samples:
            raise TrainingError(f"{self.name}: empty training set")
        labels = np.array([s.treatment for s in samples])
        if labels.min() == labels.max():
            raise TrainingError(f"{self.name}: single-class training labels")

        self._build(derive_rng(config.seed, f"{self.name}-init"))
        self._prepare_fit(samples, config)

        split_rng = derive_rng(config.seed, f"{self.name}-val-split")
        train_idx, val_idx = stratified_split(labels, config.val_fraction, split_rng)
        train = [samples[i] for i in train_idx]
        val = [samples[i] for i in val_idx]
        val_labels = labels[val_idx]

        opt = Adam(self.params(), lr=config.learning_rate)
        log = TrainingLog(n_train=len(train), n_val=len(val))
        best_params: dict[str, np.ndarray] = {}
        bad_epochs = 0

        for epoch in range(config.max_epochs):
            order = derive_rng(config.seed, f"{self.name}-shuffle", epoch).permutation(len(train))
            epoch_losses = []
            for start in range(0, len(order), config.batch_size):
                batch = [train[i] for i in order[start:start + config.batch_size]]
                batch_labels = np.array([s.treatment for s in batch], dtype=np.float64)
                loss = bce_loss(self._forward_batch(batch), batch_labels)
                loss.backward()
                opt.step()
                opt.zero_grad()
                epoch_losses.append(float(loss.data))
            log.train_losses.append(float(np.mean(epoch_losses)))

            val_loss = _np_bce(self.predict_scores(val), val_labels)
            log.val_losses.append(val_loss)
            if val_loss < log.best_val_loss - config.min_delta:
                log.best_val_loss = val_loss
                log.best_epoch = epoch
                best_params = {k: v.data.copy() for k, v in self.params().items()}
                bad_epochs = 0
            else:
                bad_epochs += 1
                if bad_epochs >= config.patience:
                    break
        log.stopped_epoch = len(log.train_losses) - 1
        log.skipped_steps = opt.skipped_steps

        if not best_params:  # no epoch improved on +inf; keep final weights
            best_params = {k: v.data.copy() for k, v in self.params().items()}
            log.best_epoch = log.stopped_epoch
        for k, v in self.params().items():
            v.data = best_params[k]
            v.zero_grad()
        self.trained = True
        return log

    def predict_scores(self, samples: list[LabeledSample]) -> np.ndarray:
        """Forward pass in evaluation chunks; no backward graph is consumed."""
        if not samples:
            return np.zeros(0)
        chunks = []
        for start in range(0, len(samples), self.predict_batch_size):
            out = self._forward_batch(samples[start:start + self.predict_batch_size])
            chunks.append(np.atleast_1d(out.data))
        return np.concatenate(chunks)

    def predict_ps(self, samples: list[LabeledSample]) -> np.ndarray:
        self._require_trained()
        return self.predict_scores(samples)


class OracleEstimator(PropensityEstimator):
    """Returns the stored true propensity scores; a test oracle."""

    name = "oracle"

    def fit(self, samples: list[LabeledSample], config: TrainConfig) -> TrainingLog:
        self.trained = True
        return TrainingLog(n_train=len(samples))

    def predict_ps(self, samples: list[LabeledSample]) -> np.ndarray:
        self._require_trained()
        return np.array([s.true_ps for s in samples])


class ConstantEstimator(PropensityEstimator):
    """Predicts the training-set treated prevalence for every sample."""

    name = "constant"

    def __init__(self) -> None:
        super().__init__()
        self.prevalence = 0.5

    def fit(self, samples: list[LabeledSample], config: TrainConfig) -> TrainingLog:
        if not samples:
            raise TrainingError("constant: empty training set")
        p = float(np.mean([s.treatment for s in samples]))
        self.prevalence = float(np.clip(p, 1e-7, 1.0 - 1e-7))
        self.trained = True
        return TrainingLog(n_train=len(samples))

    def predict_ps(self, samples: list[LabeledSample]) -> np.ndarray:
        self._require_trained()
        return np.full(len(samples), self.prevalence)
