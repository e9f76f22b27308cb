"""Exception types shared across the package."""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration or parameter combination."""


class GenerationError(RuntimeError):
    """Synthetic data generation failed."""


class ScenarioError(RuntimeError):
    """A confounding scenario cannot be applied to the given sequence."""


class IngestionError(RuntimeError):
    """A corpus file could not be parsed."""


class InjectionError(RuntimeError):
    """Semi-synthetic injection could not be applied to the corpus."""


class TrainingError(RuntimeError):
    """Estimator training failed."""


class EvaluationError(RuntimeError):
    """Metric computation failed."""
