"""External corpus ingestion and semi-synthetic confounding injection.

The corpus contract is a CSV with header `patient_id,date,code` and
ISO-8601 dates. Codes sharing a (patient, date) form one record; records
are ordered by date; duplicate rows collapse (set semantics).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from ..errors import ConfigError, InjectionError, IngestionError
from ..seeding import derive_rng
from .scenarios import assign_treatment, distance_feature, scenario_outcome, scenario_propensity
from .types import ClaimsDataset, LabeledSample, RecordSequence, ScenarioKind, ScenarioSpec

EXPECTED_HEADER = ["patient_id", "date", "code"]


@dataclass
class IngestedCorpus:
    patients: list[tuple[str, RecordSequence]]
    vocabulary: dict[str, int]
    n_dropped: int

    @property
    def d_x(self) -> int:
        return len(self.vocabulary)


def ingest_corpus(path: str | Path) -> IngestedCorpus:
    """Read a corpus CSV into per-patient record sequences.

    Patients with fewer than two records are dropped (their count is kept
    on the result). Codes map to dense indices via a vocabulary sorted by
    code string, so the mapping does not depend on row order.
    """
    path = Path(path)
    by_patient: dict[str, dict[date, set[str]]] = {}
    codes: set[str] = set()

    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty corpus file") from None
        if [h.strip() for h in header] != EXPECTED_HEADER:
            raise IngestionError(
                f"{path}: expected header {','.join(EXPECTED_HEADER)}, got {','.join(header)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise IngestionError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            patient_id, date_str, code = (f.strip() for f in row)
            if not patient_id or not code:
                raise IngestionError(f"{path}:{lineno}: empty patient_id or code")
            try:
                when = date.fromisoformat(date_str)
            except ValueError:
                raise IngestionError(
                    f"{path}:{lineno}: bad date {date_str!r}, expected YYYY-MM-DD"
                ) from None
            by_patient.setdefault(patient_id, {}).setdefault(when, set()).add(code)
            codes.add(code)

    vocabulary = {code: i for i, code in enumerate(sorted(codes))}
    patients: list[tuple[str, RecordSequence]] = []
    n_dropped = 0
    for patient_id in sorted(by_patient):
        records = by_patient[patient_id]
        if len(records) < 2:
            n_dropped += 1
            continue
        seq = RecordSequence.from_records(
            (vocabulary[c] for c in records[when]) for when in sorted(records)
        )
        patients.append((patient_id, seq))
    return IngestedCorpus(patients=patients, vocabulary=vocabulary, n_dropped=n_dropped)


def resolve_codes(corpus: IngestedCorpus, *names: str) -> tuple[int, ...]:
    """Map code strings to vocabulary indices."""
    out = []
    for name in names:
        if name not in corpus.vocabulary:
            raise ConfigError(f"code {name!r} not in corpus vocabulary")
        out.append(corpus.vocabulary[name])
    return tuple(out)


def inject_semisynthetic(corpus: IngestedCorpus, spec: ScenarioSpec,
                         seed: int) -> ClaimsDataset:
    """Apply the distance scenario to the cohort of patients where both
    codes occur with record-wise distance >= 1."""
    if spec.kind != ScenarioKind.SEMISYNTHETIC_DISTANCE:
        raise ConfigError(f"injection needs a semisynthetic_distance spec, got {spec.kind.value}")
    d_x = corpus.d_x
    for code in spec.confounder_codes:
        if not 0 <= code < d_x:
            raise ConfigError(f"scenario code {code} outside corpus vocabulary of size {d_x}")

    cohort = []
    for patient_id, seq in corpus.patients:
        d = distance_feature(seq, spec.code_a, spec.code_b)
        if d is not None and d >= 1:
            cohort.append((patient_id, seq))
    if not cohort:
        raise InjectionError("no patient has both scenario codes at distance >= 1")

    samples = []
    patient_ids = []
    for i, (patient_id, seq) in enumerate(cohort):
        rng = derive_rng(seed, "inject", i)
        e = scenario_propensity(seq, spec, rng)
        y0, y1 = scenario_outcome(seq, spec, rng)
        treated = assign_treatment(e, rng)
        samples.append(LabeledSample(
            id=i, seq=seq, true_ps=e, y0=y0, y1=y1,
            treatment=treated, outcome=y1 if treated else y0,
        ))
        patient_ids.append(patient_id)
    return ClaimsDataset(samples=samples, d_x=d_x, scenario=spec, seed=seed,
                         vocabulary=dict(corpus.vocabulary), patient_ids=patient_ids)
