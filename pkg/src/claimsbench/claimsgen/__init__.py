from .types import (
    ClaimsDataset,
    GeneratorParams,
    LabeledSample,
    RecordSequence,
    ScenarioKind,
    ScenarioSpec,
)
from .scenarios import (
    assign_treatment,
    consec_feature,
    distance_feature,
    outcome_base,
    propensity_base,
    scenario_outcome,
    scenario_propensity,
    window_feature,
)
from .generator import (
    SPLINE_CONTROL_POINTS,
    bezier_series,
    gen_occurrence_probs,
    gen_record_sequence,
    generate_sample,
    generate_synthetic,
    sample_spline_coeffs,
)
from .corpus import IngestedCorpus, ingest_corpus, inject_semisynthetic, resolve_codes
from .dataset import header_path, load_dataset, save_dataset

__all__ = [
    "ClaimsDataset",
    "GeneratorParams",
    "IngestedCorpus",
    "LabeledSample",
    "RecordSequence",
    "SPLINE_CONTROL_POINTS",
    "ScenarioKind",
    "ScenarioSpec",
    "assign_treatment",
    "bezier_series",
    "consec_feature",
    "distance_feature",
    "gen_occurrence_probs",
    "gen_record_sequence",
    "generate_sample",
    "generate_synthetic",
    "header_path",
    "ingest_corpus",
    "inject_semisynthetic",
    "load_dataset",
    "outcome_base",
    "propensity_base",
    "resolve_codes",
    "sample_spline_coeffs",
    "save_dataset",
    "scenario_outcome",
    "scenario_propensity",
    "window_feature",
]
