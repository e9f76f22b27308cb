"""Core data types for claims sequences, generator parameters, and scenarios."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

from ..errors import ConfigError


@dataclass(frozen=True)
class RecordSequence:
    """A chronological sequence of records, each a set of code indices.

    Records are stored as sorted, deduplicated tuples so serialization is
    stable and set semantics hold.
    """

    records: tuple[tuple[int, ...], ...]

    @classmethod
    def from_records(cls, records: Iterable[Iterable[int]]) -> RecordSequence:
        normalized = tuple(tuple(sorted(set(int(c) for c in rec))) for rec in records)
        if not normalized:
            raise ValueError("a record sequence needs at least one record")
        return cls(normalized)

    @property
    def n_records(self) -> int:
        return len(self.records)

    def total_codes(self) -> int:
        return sum(len(r) for r in self.records)

    def validate(self, d_x: int) -> None:
        if self.n_records < 2:
            raise ValueError(f"sequence has {self.n_records} records, need >= 2")
        for rec in self.records:
            for code in rec:
                if not 0 <= code < d_x:
                    raise ValueError(f"code {code} out of range [0, {d_x})")


class ScenarioKind(str, Enum):
    CONSECUTIVE_OCCURRENCE = "consecutive_occurrence"
    OCCURRENCE_DISTANCE = "occurrence_distance"
    OCCURRENCE_WINDOW = "occurrence_window"
    SEMISYNTHETIC_DISTANCE = "semisynthetic_distance"


_DISTANCE_KINDS = {ScenarioKind.OCCURRENCE_DISTANCE, ScenarioKind.SEMISYNTHETIC_DISTANCE}

# Outcome coefficient per scenario kind.
_DEFAULT_OUTCOME_COEF = {
    ScenarioKind.CONSECUTIVE_OCCURRENCE: 10.0,
    ScenarioKind.OCCURRENCE_DISTANCE: 40.0,
    ScenarioKind.OCCURRENCE_WINDOW: 10.0,
    ScenarioKind.SEMISYNTHETIC_DISTANCE: 5.0,
}


@dataclass(frozen=True)
class ScenarioSpec:
    """Which confounding scenario to apply, its codes and coefficients."""

    kind: ScenarioKind
    code_a: int
    code_b: int | None = None
    window: int = 3
    base_outcome: float = 10.0
    outcome_coef: float = 10.0
    ps_noise_var: float = 0.01
    outcome_noise_var: float = 0.1
    treatment_effect: float = -5.0
    ps_clamp: tuple[float, float] = (0.01, 0.99)

    def __post_init__(self) -> None:
        if self.kind in _DISTANCE_KINDS:
            if self.code_b is None:
                raise ConfigError(f"{self.kind.value} needs code_b")
            if self.code_b == self.code_a:
                raise ConfigError("code_a and code_b must differ")
        elif self.code_b is not None:
            raise ConfigError(f"{self.kind.value} takes no code_b")
        if self.ps_noise_var <= 0 or self.outcome_noise_var <= 0:
            raise ConfigError("noise variances must be positive")
        lo, hi = self.ps_clamp
        if not (0.0 < lo < hi < 1.0):
            raise ConfigError(f"ps_clamp {self.ps_clamp} must lie strictly inside (0, 1)")
        if self.window < 1:
            raise ConfigError("window must be >= 1")

    @classmethod
    def defaults(cls, kind: ScenarioKind, code_a: int, code_b: int | None = None,
                 **overrides) -> ScenarioSpec:
        base = cls(kind=kind, code_a=code_a, code_b=code_b,
                   outcome_coef=_DEFAULT_OUTCOME_COEF[kind])
        return replace(base, **overrides) if overrides else base

    @property
    def confounder_codes(self) -> tuple[int, ...]:
        if self.code_b is None:
            return (self.code_a,)
        return (self.code_a, self.code_b)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "code_a": self.code_a,
            "code_b": self.code_b,
            "window": self.window,
            "base_outcome": self.base_outcome,
            "outcome_coef": self.outcome_coef,
            "ps_noise_var": self.ps_noise_var,
            "outcome_noise_var": self.outcome_noise_var,
            "treatment_effect": self.treatment_effect,
            "ps_clamp": list(self.ps_clamp),
        }

    @classmethod
    def from_json_dict(cls, blob: dict) -> ScenarioSpec:
        blob = dict(blob)
        blob["kind"] = ScenarioKind(blob["kind"])
        blob["ps_clamp"] = tuple(blob["ps_clamp"])
        return cls(**blob)


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs of the Beta -> Bernoulli record generator."""

    n_samples: int = 12000
    dx: int = 100
    poisson_lambda: float = 10.0
    static_range: tuple[float, float] = (5.0, 10.0)
    dynamic_range: tuple[float, float] = (240.0, 260.0)
    boosted_codes: tuple[int, ...] = (0, 1, 2, 3, 4)
    boosted_dynamic_range: tuple[float, float] = (40.0, 60.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ConfigError("n_samples must be >= 1")
        if self.dx < 1:
            raise ConfigError("dx must be >= 1")
        if self.poisson_lambda <= 0:
            raise ConfigError("poisson_lambda must be positive")
        for name in ("static_range", "dynamic_range", "boosted_dynamic_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ConfigError(f"{name} needs lower < upper, got {(lo, hi)}")
        boosted = tuple(self.boosted_codes)
        if len(set(boosted)) != len(boosted):
            raise ConfigError("boosted_codes must be distinct")
        if any(not 0 <= c < self.dx for c in boosted):
            raise ConfigError("boosted_codes must be < dx")

    def to_json_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "dx": self.dx,
            "poisson_lambda": self.poisson_lambda,
            "static_range": list(self.static_range),
            "dynamic_range": list(self.dynamic_range),
            "boosted_codes": list(self.boosted_codes),
            "boosted_dynamic_range": list(self.boosted_dynamic_range),
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, blob: dict) -> GeneratorParams:
        blob = dict(blob)
        for key in ("static_range", "dynamic_range", "boosted_dynamic_range", "boosted_codes"):
            if key in blob:
                blob[key] = tuple(blob[key])
        return cls(**blob)


@dataclass(frozen=True)
class LabeledSample:
    """One benchmark sample: the sequence plus observed and ground-truth fields."""

    id: int
    seq: RecordSequence
    true_ps: float
    y0: float
    y1: float
    treatment: int
    outcome: float


@dataclass
class ClaimsDataset:
    """A labeled dataset plus the provenance needed to regenerate it."""

    samples: list[LabeledSample]
    d_x: int
    scenario: ScenarioSpec
    seed: int
    vocabulary: dict[str, int] | None = None
    patient_ids: list[str] | None = None

    def __len__(self) -> int:
        return len(self.samples)

    def summary_stats(self) -> dict[str, float]:
        n = len(self.samples)
        total_records = sum(s.seq.n_records for s in self.samples)
        total_codes = sum(s.seq.total_codes() for s in self.samples)
        return {
            "size": n,
            "avg_record_length": total_records / n,
            "avg_codes_per_sample": total_codes / n,
            "avg_codes_per_record": total_codes / total_records,
            "prev_treated": sum(s.treatment for s in self.samples) / n,
        }
