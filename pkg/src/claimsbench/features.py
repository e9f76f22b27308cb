"""Flat covariate construction for the baseline estimators.

Two representations: standardized per-code occurrence counts, and the
high-dimensional binary expansion (three threshold indicators per code).
Statistics are fitted on the entire dataset by default; a per-fold mode
exists for leakage-free variants and is flagged in reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .claimsgen.types import RecordSequence


def count_features(seq: RecordSequence, d_x: int) -> np.ndarray:
    """Entry k = number of records containing code k."""
    counts = np.zeros(d_x)
    for rec in seq.records:
        for code in rec:
            if code >= d_x:
                raise ValueError(f"code {code} out of range [0, {d_x})")
            counts[code] += 1.0
    return counts


def count_matrix(seqs: list[RecordSequence], d_x: int) -> np.ndarray:
    return np.stack([count_features(s, d_x) for s in seqs])


@dataclass(frozen=True)
class StandardizerStats:
    mean: np.ndarray
    std: np.ndarray
    fitted_on: str = ""

    def to_json_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist(),
                "fitted_on": self.fitted_on}


def fit_standardizer(counts: np.ndarray, fitted_on: str = "") -> StandardizerStats:
    if counts.shape[0] < 2:
        raise ValueError("standardizer needs at least 2 rows")
    # Population std (divide by N); fixed for bit-reproducibility.
    return StandardizerStats(mean=counts.mean(axis=0), std=counts.std(axis=0),
                             fitted_on=fitted_on)


def apply_standardizer(counts: np.ndarray, stats: StandardizerStats) -> np.ndarray:
    """(x - mean)/std per code; constant codes (std 0) map to 0."""
    safe = np.where(stats.std > 0.0, stats.std, 1.0)
    out = (counts - stats.mean) / safe
    return np.where(stats.std > 0.0, out, 0.0)


@dataclass(frozen=True)
class HdpsThresholds:
    median: np.ndarray
    p75: np.ndarray
    fitted_on: str = ""

    def __post_init__(self) -> None:
        if np.any(self.median > self.p75):
            raise ValueError("median must not exceed the 75th percentile")

    def to_json_dict(self) -> dict:
        return {"median": self.median.tolist(), "p75": self.p75.tolist(),
                "fitted_on": self.fitted_on}


def _nearest_rank(sorted_col: np.ndarray, q: float) -> float:
    # Nearest-rank order statistic: value at 1-based index ceil(q * N).
    n = sorted_col.shape[0]
    return float(sorted_col[max(0, math.ceil(q * n) - 1)])


def fit_hdps(counts: np.ndarray, fitted_on: str = "") -> HdpsThresholds:
    if counts.shape[0] < 1:
        raise ValueError("hdps thresholds need at least 1 row")
    ordered = np.sort(counts, axis=0)
    median = np.array([_nearest_rank(ordered[:, k], 0.5) for k in range(counts.shape[1])])
    p75 = np.array([_nearest_rank(ordered[:, k], 0.75) for k in range(counts.shape[1])])
    return HdpsThresholds(median=median, p75=p75, fitted_on=fitted_on)


def apply_hdps(counts: np.ndarray, thresholds: HdpsThresholds) -> np.ndarray:
    """Per code: (occurred at least once, count > median, count > p75) as 0/1.

    Output length is exactly 3 * d_x, ordered code-major.
    """
    counts = np.atleast_2d(counts)
    if counts.shape[1] != thresholds.median.shape[0]:
        raise ValueError(
            f"count width {counts.shape[1]} does not match fitted vocabulary "
            f"{thresholds.median.shape[0]}")
    ever = counts >= 1.0
    above_median = counts > thresholds.median
    above_p75 = counts > thresholds.p75
    out = np.stack([ever, above_median, above_p75], axis=2).reshape(counts.shape[0], -1)
    return out.astype(np.float64)
