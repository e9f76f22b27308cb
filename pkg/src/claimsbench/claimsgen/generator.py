"""Synthetic claims generation: static/dynamic variables, quartic-spline
time modulation, Beta occurrence probabilities, Bernoulli records.

Each sample draws from its own RNG stream derived from (seed, sample index),
so generation is reproducible sample-by-sample regardless of scheduling.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, GenerationError
from ..seeding import derive_rng
from .scenarios import assign_treatment, scenario_outcome, scenario_propensity
from .types import (
    ClaimsDataset,
    GeneratorParams,
    LabeledSample,
    RecordSequence,
    ScenarioKind,
    ScenarioSpec,
)

# Degree-4 Bezier control points for the five dynamic-coefficient archetypes:
# mild incline, mild decline, mild decline after steep incline,
# mild incline after steep decline, stable.
SPLINE_CONTROL_POINTS = np.array([
    [1.0, 1.05, 1.1, 1.15, 1.2],
    [1.0, 0.95, 0.9, 0.85, 0.8],
    [1.0, 1.6, 1.5, 1.45, 1.4],
    [1.0, 0.4, 0.5, 0.55, 0.6],
    [1.0, 1.0, 1.0, 1.0, 1.0],
])

_BINOM4 = np.array([1.0, 4.0, 6.0, 4.0, 1.0])


def bezier_series(control_points: np.ndarray, t_points: int) -> np.ndarray:
    """Evaluate degree-4 Bezier curves at t/(T-1) for t = 0..T-1.

    control_points: (..., 5). Returns (..., T). For T=1 evaluates at u=0.
    """
    cp = np.asarray(control_points, dtype=np.float64)
    if t_points < 1:
        raise ValueError("need at least one evaluation point")
    u = np.zeros(1) if t_points == 1 else np.arange(t_points) / (t_points - 1)
    i = np.arange(5)
    basis = _BINOM4 * u[:, None] ** i * (1.0 - u[:, None]) ** (4 - i)  # (T, 5)
    return cp @ basis.T


def sample_spline_coeffs(t_points: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one archetype uniformly and evaluate its curve at T points."""
    if t_points < 1:
        raise ValueError("t_points must be >= 1")
    archetype = int(rng.integers(0, len(SPLINE_CONTROL_POINTS)))
    return bezier_series(SPLINE_CONTROL_POINTS[archetype], t_points)


def gen_occurrence_probs(params: GeneratorParams, t_points: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Per-(record, code) occurrence probabilities P ~ Beta(B, C).

    The static row is drawn once per sample and replicated over records;
    the dynamic row likewise, then each column is modulated by a sampled
    spline coefficient series.
    """
    if t_points < 1:
        raise ValueError("t_points must be >= 1")
    for name in ("static_range", "dynamic_range", "boosted_dynamic_range"):
        if not np.isfinite(getattr(params, name)).all():
            raise GenerationError(f"non-finite {name}")

    dx = params.dx
    static = rng.uniform(*params.static_range, size=dx)
    dynamic = rng.uniform(*params.dynamic_range, size=dx)
    boosted = list(params.boosted_codes)
    if boosted:
        dynamic[boosted] = rng.uniform(*params.boosted_dynamic_range, size=len(boosted))
    archetypes = rng.integers(0, len(SPLINE_CONTROL_POINTS), size=dx)
    coeffs = bezier_series(SPLINE_CONTROL_POINTS[archetypes], t_points)  # (dx, T)

    b_mat = np.broadcast_to(static, (t_points, dx))
    c_mat = dynamic * coeffs.T
    return rng.beta(b_mat, c_mat)


def gen_record_sequence(params: GeneratorParams, rng: np.random.Generator) -> RecordSequence:
    """One sample's records: T ~ Poisson(lambda) resampled until T >= 2,
    then Bernoulli draws against the Beta occurrence probabilities."""
    t_points = int(rng.poisson(params.poisson_lambda))
    while t_points < 2:
        t_points = int(rng.poisson(params.poisson_lambda))
    probs = gen_occurrence_probs(params, t_points, rng)
    hits = rng.random(probs.shape) < probs
    return RecordSequence.from_records(np.nonzero(row)[0] for row in hits)


def _check_codes_boosted(params: GeneratorParams, spec: ScenarioSpec) -> None:
    for code in spec.confounder_codes:
        if code not in params.boosted_codes:
            raise ConfigError(
                f"scenario code {code} is not in boosted_codes {params.boosted_codes}; "
                "confounding patterns would be too rare"
            )


def generate_sample(params: GeneratorParams, spec: ScenarioSpec, seed: int,
                    index: int) -> LabeledSample:
    """Generate sample `index` from its own derived RNG stream."""
    rng = derive_rng(seed, "sample", index)
    seq = gen_record_sequence(params, rng)
    e = scenario_propensity(seq, spec, rng)
    y0, y1 = scenario_outcome(seq, spec, rng)
    treated = assign_treatment(e, rng)
    return LabeledSample(
        id=index, seq=seq, true_ps=e, y0=y0, y1=y1,
        treatment=treated, outcome=y1 if treated else y0,
    )


def generate_synthetic(params: GeneratorParams, spec: ScenarioSpec,
                       seed: int | None = None) -> ClaimsDataset:
    """Generate the full synthetic dataset for one confounding scenario."""
    if spec.kind == ScenarioKind.SEMISYNTHETIC_DISTANCE:
        raise ConfigError("semi-synthetic scenarios are injected into a corpus, not generated")
    _check_codes_boosted(params, spec)
    seed = params.seed if seed is None else seed
    samples = [generate_sample(params, spec, seed, i) for i in range(params.n_samples)]
    return ClaimsDataset(samples=samples, d_x=params.dx, scenario=spec, seed=seed)
