"""Confounding-scenario features, propensity formulas, and outcome formulas.

Each scenario reads one temporal feature off a sequence (a max consecutive
run, a shortest record-wise distance, or a recent-window count), maps it
through a piecewise formula to the true propensity score, and adds Gaussian
noise. Outcomes get the scenario's additive term plus a homogeneous
treatment effect.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ScenarioError
from .types import RecordSequence, ScenarioKind, ScenarioSpec


def _sigmoid(z: float) -> float:
    return 1.0 / (1.0 + math.exp(-z))


def consec_feature(seq: RecordSequence, code: int) -> int:
    """Maximum run length of adjacent records all containing `code`."""
    best = run = 0
    for rec in seq.records:
        if code in rec:
            run += 1
            best = max(best, run)
        else:
            run = 0
    return best


def distance_feature(seq: RecordSequence, code_a: int, code_b: int) -> int | None:
    """Shortest record-wise distance |t_a - t_b| between occurrences of the
    two codes, or None when either never occurs."""
    if code_a == code_b:
        raise ValueError("distance_feature needs two distinct codes")
    t_a = [t for t, rec in enumerate(seq.records) if code_a in rec]
    t_b = [t for t, rec in enumerate(seq.records) if code_b in rec]
    if not t_a or not t_b:
        return None
    # Both lists are sorted; a two-pointer sweep finds the closest pair.
    best = None
    i = j = 0
    while i < len(t_a) and j < len(t_b):
        d = abs(t_a[i] - t_b[j])
        best = d if best is None else min(best, d)
        if t_a[i] < t_b[j]:
            i += 1
        else:
            j += 1
    return best


def window_feature(seq: RecordSequence, code: int, window: int) -> int:
    """Number of records containing `code` among the last min(window, T) records."""
    if window < 1:
        raise ValueError("window must be >= 1")
    return sum(1 for rec in seq.records[-window:] if code in rec)


def _scenario_feature(seq: RecordSequence, spec: ScenarioSpec) -> int | None:
    if spec.kind == ScenarioKind.CONSECUTIVE_OCCURRENCE:
        return consec_feature(seq, spec.code_a)
    if spec.kind == ScenarioKind.OCCURRENCE_WINDOW:
        return window_feature(seq, spec.code_a, spec.window)
    return distance_feature(seq, spec.code_a, spec.code_b)


def propensity_base(seq: RecordSequence, spec: ScenarioSpec) -> float:
    """The noiseless piecewise propensity value for `seq` under `spec`."""
    kind = spec.kind
    if kind == ScenarioKind.CONSECUTIVE_OCCURRENCE:
        o = consec_feature(seq, spec.code_a)
        if o > 1:
            return _sigmoid(float(o))
        return 0.3 if o == 1 else 0.1
    if kind == ScenarioKind.OCCURRENCE_DISTANCE:
        d = distance_feature(seq, spec.code_a, spec.code_b)
        if d is None:
            return 0.3
        return _sigmoid(math.log(10.0 / (5.0 * d + 1.0)))
    if kind == ScenarioKind.OCCURRENCE_WINDOW:
        c = window_feature(seq, spec.code_a, spec.window)
        return _sigmoid(float(c)) if c >= 1 else 0.1
    # semi-synthetic distance
    d = distance_feature(seq, spec.code_a, spec.code_b)
    if d is None or d == 0:
        raise ScenarioError(
            "semi-synthetic distance needs both codes present with distance >= 1; "
            "filter the cohort first"
        )
    return _sigmoid(2.0 * math.log(10.0 / d ** 2.5))


def outcome_base(seq: RecordSequence, spec: ScenarioSpec) -> float:
    """The noiseless untreated-outcome value for `seq` under `spec`."""
    b, alpha, kind = spec.base_outcome, spec.outcome_coef, spec.kind
    if kind == ScenarioKind.CONSECUTIVE_OCCURRENCE:
        o = consec_feature(seq, spec.code_a)
        return b + alpha * o if o > 1 else b
    if kind == ScenarioKind.OCCURRENCE_DISTANCE:
        d = distance_feature(seq, spec.code_a, spec.code_b)
        return b if d is None else b + alpha / (d + 1.0)
    if kind == ScenarioKind.OCCURRENCE_WINDOW:
        c = window_feature(seq, spec.code_a, spec.window)
        return b + alpha * c
    d = distance_feature(seq, spec.code_a, spec.code_b)
    if d is None or d == 0:
        raise ScenarioError(
            "semi-synthetic distance needs both codes present with distance >= 1; "
            "filter the cohort first"
        )
    return b + alpha / d


def scenario_propensity(seq: RecordSequence, spec: ScenarioSpec,
                        rng: np.random.Generator) -> float:
    """True propensity score: piecewise value plus Gaussian noise, clamped."""
    e = propensity_base(seq, spec) + rng.normal(0.0, math.sqrt(spec.ps_noise_var))
    lo, hi = spec.ps_clamp
    return min(max(e, lo), hi)


def scenario_outcome(seq: RecordSequence, spec: ScenarioSpec,
                     rng: np.random.Generator) -> tuple[float, float]:
    """Potential outcomes (y0, y1) with y1 = y0 + treatment_effect."""
    y0 = outcome_base(seq, spec) + rng.normal(0.0, math.sqrt(spec.outcome_noise_var))
    return y0, y0 + spec.treatment_effect


def assign_treatment(e: float, rng: np.random.Generator) -> int:
    """A ~ Bernoulli(e)."""
    if not 0.0 < e < 1.0:
        raise ValueError(f"propensity {e} must lie strictly inside (0, 1)")
    return int(rng.random() < e)
