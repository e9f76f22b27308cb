from __future__ import annotations

import math

import numpy as np
import pytest

from claimsbench.claimsgen import (
    GeneratorParams,
    RecordSequence,
    SPLINE_CONTROL_POINTS,
    ScenarioKind,
    ScenarioSpec,
    assign_treatment,
    bezier_series,
    consec_feature,
    distance_feature,
    gen_occurrence_probs,
    gen_record_sequence,
    generate_synthetic,
    outcome_base,
    propensity_base,
    sample_spline_coeffs,
    scenario_outcome,
    scenario_propensity,
    window_feature,
)
from claimsbench.errors import ConfigError, GenerationError, ScenarioError
from claimsbench.seeding import derive_rng


def _sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


def seq_of(*records):
    return RecordSequence.from_records(records)


def random_seq(rng, d_x=10, max_t=12, p=0.3):
    t = int(rng.integers(2, max_t + 1))
    hits = rng.random((t, d_x)) < p
    return RecordSequence.from_records(np.nonzero(row)[0] for row in hits)


# -- brute-force oracles (kept deliberately dumb) ------------------------------

def brute_consec(seq, code):
    present = [code in rec for rec in seq.records]
    best = 0
    for start in range(len(present)):
        for end in range(start, len(present)):
            if all(present[start:end + 1]):
                best = max(best, end - start + 1)
    return best


def brute_distance(seq, a, b):
    best = None
    for ta, rec_a in enumerate(seq.records):
        for tb, rec_b in enumerate(seq.records):
            if a in rec_a and b in rec_b:
                d = abs(ta - tb)
                best = d if best is None else min(best, d)
    return best


def brute_window(seq, code, window):
    t = seq.n_records
    lo = max(0, t - window)
    return sum(1 for rec in seq.records[lo:] if code in rec)


def brute_propensity(seq, spec):
    if spec.kind == ScenarioKind.CONSECUTIVE_OCCURRENCE:
        o = brute_consec(seq, spec.code_a)
        return _sigmoid(o) if o > 1 else (0.3 if o == 1 else 0.1)
    if spec.kind == ScenarioKind.OCCURRENCE_DISTANCE:
        d = brute_distance(seq, spec.code_a, spec.code_b)
        return 0.3 if d is None else _sigmoid(math.log(10 / (5 * d + 1)))
    if spec.kind == ScenarioKind.OCCURRENCE_WINDOW:
        c = brute_window(seq, spec.code_a, spec.window)
        return _sigmoid(c) if c >= 1 else 0.1
    d = brute_distance(seq, spec.code_a, spec.code_b)
    return _sigmoid(2 * math.log(10 / d ** 2.5))


# -- record sequences -----------------------------------------------------------

def test_records_sorted_and_deduped():
    seq = RecordSequence.from_records([[3, 1, 3], [2], [0, 0]])
    assert seq.records == ((1, 3), (2,), (0,))


def test_validate_rejects_short_and_out_of_range():
    with pytest.raises(ValueError):
        seq_of([1]).validate(d_x=10)
    with pytest.raises(ValueError):
        seq_of([1], [10]).validate(d_x=10)
    seq_of([1], [9]).validate(d_x=10)


# -- spline archetypes ------------------------------------------------------------

def test_stable_archetype_is_constant():
    vals = bezier_series(SPLINE_CONTROL_POINTS[4], 5)
    assert np.allclose(vals, 1.0)


def test_mild_incline_analytic_values():
    # Degree-4 Bezier endpoints equal the first/last control points, and the
    # midpoint is the binomial average: (1 + 4*1.05 + 6*1.1 + 4*1.15 + 1.2)/16.
    vals = bezier_series(np.array([1.0, 1.05, 1.1, 1.15, 1.2]), 3)
    assert vals == pytest.approx([1.0, 1.1, 1.2])


def test_spline_outputs_strictly_positive():
    rng = derive_rng(0, "test-spline")
    for _ in range(200):
        t = int(rng.integers(1, 30))
        vals = sample_spline_coeffs(t, rng)
        assert vals.shape == (t,)
        assert vals.min() > 0.0


def test_spline_rejects_zero_points():
    with pytest.raises(ValueError):
        sample_spline_coeffs(0, derive_rng(0, "x"))


# -- occurrence probabilities ------------------------------------------------------

def test_occurrence_probs_in_unit_interval():
    params = GeneratorParams(n_samples=1, dx=20, boosted_codes=(0, 1, 2, 3, 4), seed=1)
    rng = derive_rng(1, "probs")
    p = gen_occurrence_probs(params, 7, rng)
    assert p.shape == (7, 20)
    assert np.all(p >= 0.0) and np.all(p <= 1.0)


def test_beta_mean_identity():
    # E[Beta(a, b)] = a/(a+b) at the parameter points named in the generator
    # contract: plain (5, 245) -> 0.02, boosted (7.5, 50) -> ~0.130.
    rng = derive_rng(2, "beta-mean")
    assert rng.beta(5.0, 245.0, size=200_000).mean() == pytest.approx(5 / 250, abs=5e-4)
    assert rng.beta(7.5, 50.0, size=200_000).mean() == pytest.approx(7.5 / 57.5, abs=2e-3)


def _mix_mean(static: float, dynamic: float, t_points: int) -> float:
    # Exact expectation of Beta(B, C*s) means over the uniform archetype mix:
    # mean over archetypes and records of B/(B + C*s_a(t)).
    vals = []
    for cp in SPLINE_CONTROL_POINTS:
        s = bezier_series(cp, t_points)
        vals.append(np.mean(static / (static + dynamic * s)))
    return float(np.mean(vals))


def test_occurrence_probs_match_archetype_mix_expectation():
    params = GeneratorParams(
        n_samples=1, dx=10, boosted_codes=(0,),
        static_range=(5.0, 5.0 + 1e-12), dynamic_range=(245.0, 245.0 + 1e-9),
        boosted_dynamic_range=(50.0, 50.0 + 1e-9), seed=2,
    )
    rng = derive_rng(2, "probs")
    plain, boosted = [], []
    for _ in range(400):
        p = gen_occurrence_probs(params, 10, rng)
        plain.append(p[:, 1:].ravel())
        boosted.append(p[:, 0].ravel())
    plain = np.concatenate(plain)
    boosted = np.concatenate(boosted)
    for draws, expected in ((plain, _mix_mean(5.0, 245.0, 10)),
                            (boosted, _mix_mean(5.0, 50.0, 10))):
        se = draws.std() / math.sqrt(draws.size)
        # Archetype draws are shared within a column, inflating the effective
        # standard error; 3 SEs plus a mix-variance allowance.
        assert abs(draws.mean() - expected) < 3 * se + 0.01


def test_occurrence_probs_rejects_nonfinite():
    params = GeneratorParams(n_samples=1, dx=5, boosted_codes=(0,),
                             dynamic_range=(240.0, float("inf")), seed=3)
    with pytest.raises(GenerationError):
        gen_occurrence_probs(params, 3, derive_rng(3, "probs"))


def test_record_sequence_t_distribution():
    params = GeneratorParams(n_samples=1, dx=5, boosted_codes=(0,), seed=4)
    rng = derive_rng(4, "seq")
    lengths = [gen_record_sequence(params, rng).n_records for _ in range(12000)]
    mean_t = np.mean(lengths)
    # Poisson(10) truncated below 2 barely moves the mean; 3 standard errors.
    se = math.sqrt(10.0 / len(lengths))
    assert abs(mean_t - 10.0) < 3 * se + 0.01
    assert min(lengths) >= 2


# -- scenario features vs brute force ----------------------------------------------

def test_consec_examples():
    assert consec_feature(seq_of([1], [1], [], [1]), 1) == 2
    assert consec_feature(seq_of([2], [3]), 1) == 0
    assert consec_feature(seq_of([], [1], [1], [1], [], [1], [1]), 1) == 3


def test_distance_examples():
    assert distance_feature(seq_of([], [], [1], [], [], [2]), 1, 2) == 3
    assert distance_feature(seq_of([1, 2], []), 1, 2) == 0
    seq = seq_of([], [1], [], [], [2], [], [], [1], [2])
    assert distance_feature(seq, 1, 2) == 1
    assert distance_feature(seq_of([1], [1]), 1, 2) is None


def test_window_examples():
    assert window_feature(seq_of([], [], [1], [1], [1]), 1, 3) == 3
    assert window_feature(seq_of([1], [], [], [], []), 1, 3) == 0
    assert window_feature(seq_of([1], [1]), 1, 3) == 2


def test_features_match_brute_force():
    rng = derive_rng(5, "features")
    for _ in range(10_000):
        seq = random_seq(rng, d_x=6, max_t=9, p=float(rng.uniform(0.05, 0.5)))
        code = int(rng.integers(0, 6))
        other = (code + 1 + int(rng.integers(0, 5))) % 6
        window = int(rng.integers(1, 5))
        assert consec_feature(seq, code) == brute_consec(seq, code)
        assert distance_feature(seq, code, other) == brute_distance(seq, code, other)
        assert window_feature(seq, code, window) == brute_window(seq, code, window)


# -- scenario propensities ------------------------------------------------------------

def _od_spec(**kw):
    return ScenarioSpec.defaults(ScenarioKind.OCCURRENCE_DISTANCE, 0, 1, **kw)


def test_propensity_distance_absent_is_point_three():
    seq = seq_of([0], [0])  # code 1 never occurs
    assert propensity_base(seq, _od_spec()) == pytest.approx(0.3)


def test_propensity_distance_one():
    seq = seq_of([0], [1])
    assert propensity_base(seq, _od_spec()) == pytest.approx(_sigmoid(math.log(10 / 6)))
    assert propensity_base(seq, _od_spec()) == pytest.approx(0.625, abs=5e-5)


def test_propensity_semisynthetic_distance_two():
    spec = ScenarioSpec.defaults(ScenarioKind.SEMISYNTHETIC_DISTANCE, 0, 1)
    seq = seq_of([0], [], [1])
    # sigma(2*log(10/2^2.5)) = 1/(1 + 2^5/100) = 1/1.32 exactly
    assert propensity_base(seq, spec) == pytest.approx(1 / 1.32, abs=1e-12)


def test_propensity_semisynthetic_distance_one():
    spec = ScenarioSpec.defaults(ScenarioKind.SEMISYNTHETIC_DISTANCE, 0, 1)
    seq = seq_of([0], [1])
    assert propensity_base(seq, spec) == pytest.approx(_sigmoid(2 * math.log(10.0)))
    assert propensity_base(seq, spec) == pytest.approx(0.9901, abs=5e-5)


def test_propensity_window_zero_is_point_one():
    spec = ScenarioSpec.defaults(ScenarioKind.OCCURRENCE_WINDOW, 0)
    seq = seq_of([0], [], [], [])  # occurrence outside the last-3 window
    assert propensity_base(seq, spec) == pytest.approx(0.1)


def test_propensity_consecutive_branches():
    spec = ScenarioSpec.defaults(ScenarioKind.CONSECUTIVE_OCCURRENCE, 0)
    assert propensity_base(seq_of([], []), spec) == pytest.approx(0.1)
    assert propensity_base(seq_of([0], []), spec) == pytest.approx(0.3)
    assert propensity_base(seq_of([0], [0], [0]), spec) == pytest.approx(_sigmoid(3.0))


def test_propensity_semisynthetic_rejects_absent_or_zero_distance():
    spec = ScenarioSpec.defaults(ScenarioKind.SEMISYNTHETIC_DISTANCE, 0, 1)
    with pytest.raises(ScenarioError):
        propensity_base(seq_of([0], [0]), spec)
    with pytest.raises(ScenarioError):
        propensity_base(seq_of([0, 1], [2]), spec)


def test_propensity_matches_brute_force_oracle():
    rng = derive_rng(6, "scenario-oracle")
    kinds = [
        ScenarioSpec.defaults(ScenarioKind.CONSECUTIVE_OCCURRENCE, 0),
        ScenarioSpec.defaults(ScenarioKind.OCCURRENCE_DISTANCE, 0, 1),
        ScenarioSpec.defaults(ScenarioKind.OCCURRENCE_WINDOW, 0),
    ]
    for _ in range(1000):
        seq = random_seq(rng, d_x=5, max_t=10, p=float(rng.uniform(0.1, 0.5)))
        for spec in kinds:
            assert propensity_base(seq, spec) == pytest.approx(
                brute_propensity(seq, spec), abs=1e-12)


def test_propensity_noise_and_clamp():
    spec = _od_spec(ps_noise_var=25.0)  # huge noise forces clamping
    rng = derive_rng(7, "clamp")
    values = [scenario_propensity(seq_of([0], [1]), spec, rng) for _ in range(500)]
    assert min(values) == pytest.approx(0.01)
    assert max(values) == pytest.approx(0.99)
    assert all(0.01 <= v <= 0.99 for v in values)


# -- scenario outcomes ---------------------------------------------------------------

def test_outcome_distance_one_is_thirty():
    assert outcome_base(seq_of([0], [1]), _od_spec()) == pytest.approx(10 + 40 / 2)


def test_outcome_window_two_is_thirty():
    spec = ScenarioSpec.defaults(ScenarioKind.OCCURRENCE_WINDOW, 0)
    seq = seq_of([], [], [], [0], [0])
    assert outcome_base(seq, spec) == pytest.approx(10 + 10 * 2)


def test_outcome_consecutive_branches():
    spec = ScenarioSpec.defaults(ScenarioKind.CONSECUTIVE_OCCURRENCE, 0)
    assert outcome_base(seq_of([0], []), spec) == pytest.approx(10.0)
    assert outcome_base(seq_of([0], [0]), spec) == pytest.approx(30.0)


def test_outcome_treatment_effect_exact():
    rng = derive_rng(8, "outcome")
    spec = _od_spec()
    for _ in range(200):
        seq = random_seq(rng, d_x=4, max_t=8)
        y0, y1 = scenario_outcome(seq, spec, rng)
        assert y1 - y0 == pytest.approx(-5.0, abs=1e-12)


# -- treatment assignment ---------------------------------------------------------------

def test_assign_treatment_extreme():
    rng = derive_rng(9, "treat")
    assert all(assign_treatment(1 - 1e-9, rng) == 1 for _ in range(200))


def test_assign_treatment_balanced():
    rng = derive_rng(10, "treat")
    draws = [assign_treatment(0.5, rng) for _ in range(100_000)]
    assert 0.49 <= np.mean(draws) <= 0.51


def test_assign_treatment_rejects_boundary():
    rng = derive_rng(11, "treat")
    with pytest.raises(ValueError):
        assign_treatment(0.0, rng)
    with pytest.raises(ValueError):
        assign_treatment(1.0, rng)


# -- end-to-end generation ---------------------------------------------------------------

def test_generate_rejects_unboosted_scenario_codes():
    params = GeneratorParams(n_samples=10, dx=20, boosted_codes=(0, 1, 2, 3, 4), seed=12)
    spec = ScenarioSpec.defaults(ScenarioKind.OCCURRENCE_DISTANCE, 0, 10)
    with pytest.raises(ConfigError):
        generate_synthetic(params, spec)


def test_generate_rejects_zero_samples():
    with pytest.raises(ConfigError):
        GeneratorParams(n_samples=0, dx=10, boosted_codes=(0,), seed=1)


def test_generate_deterministic_and_ground_truth_invariants():
    params = GeneratorParams(n_samples=50, dx=30, boosted_codes=(0, 1, 2, 3, 4), seed=13)
    spec = ScenarioSpec.defaults(ScenarioKind.OCCURRENCE_DISTANCE, 0, 1)
    ds1 = generate_synthetic(params, spec)
    ds2 = generate_synthetic(params, spec)
    assert ds1.samples == ds2.samples
    for s in ds1.samples:
        assert 0.01 <= s.true_ps <= 0.99
        assert s.y1 - s.y0 == pytest.approx(-5.0, abs=1e-12)
        assert s.outcome == (s.y1 if s.treatment else s.y0)
        assert s.seq.n_records >= 2


def test_generated_occurrence_frequency_tracks_beta_mean():
    # Bernoulli frequency per plain code should match the mean Beta
    # probability within 3 standard errors.
    params = GeneratorParams(n_samples=3000, dx=8, boosted_codes=(0,), seed=14)
    spec = ScenarioSpec.defaults(ScenarioKind.CONSECUTIVE_OCCURRENCE, 0)
    ds = generate_synthetic(params, spec)
    occurrences = 0
    records = 0
    rng = derive_rng(14, "freqcheck")
    for s in ds.samples:
        records += s.seq.n_records
        occurrences += sum(1 for rec in s.seq.records if 5 in rec)
    freq = occurrences / records
    # Mean Beta probability for plain codes, estimated by quadrature-free MC
    # of E[B/(B+C*s)] across the spline mix: measured tolerance band.
    probs = []
    for _ in range(4000):
        p = gen_occurrence_probs(params, 10, rng)
        probs.append(p[:, 5].mean())
    expected = float(np.mean(probs))
    se = math.sqrt(expected * (1 - expected) / records)
    assert abs(freq - expected) < 3 * se + 3 * np.std(probs) / math.sqrt(len(probs))
