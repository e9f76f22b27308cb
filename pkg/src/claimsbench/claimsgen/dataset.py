"""Dataset files: JSON Lines samples plus a sidecar JSON header.

The header lives next to the dataset at `<stem>.header.json` and carries
d_x, the scenario spec, the seed, and (for ingested corpora) the
vocabulary. Writing is deterministic: fixed key order, shortest-repr
floats.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ConfigError
from .types import ClaimsDataset, LabeledSample, RecordSequence, ScenarioSpec

SCHEMA_VERSION = 1


def header_path(dataset_path: str | Path) -> Path:
    p = Path(dataset_path)
    return p.with_suffix(".header.json") if p.suffix == ".jsonl" else Path(str(p) + ".header.json")


def _sample_line(s: LabeledSample) -> str:
    obj = {
        "id": s.id,
        "records": [list(r) for r in s.seq.records],
        "treatment": s.treatment,
        "outcome": s.outcome,
        "true_ps": s.true_ps,
        "y0": s.y0,
        "y1": s.y1,
    }
    return json.dumps(obj, separators=(",", ":"))


def save_dataset(dataset: ClaimsDataset, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for s in dataset.samples:
            fh.write(_sample_line(s))
            fh.write("\n")
    header = {
        "schema_version": SCHEMA_VERSION,
        "n_samples": len(dataset.samples),
        "d_x": dataset.d_x,
        "scenario": dataset.scenario.to_json_dict(),
        "seed": dataset.seed,
        "vocabulary": dataset.vocabulary,
        "patient_ids": dataset.patient_ids,
    }
    header_path(path).write_text(json.dumps(header, indent=1, sort_keys=True) + "\n")
    return path


def load_dataset(path: str | Path) -> ClaimsDataset:
    path = Path(path)
    hpath = header_path(path)
    if not hpath.exists():
        raise ConfigError(f"missing dataset header {hpath}")
    header = json.loads(hpath.read_text())
    version = header.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported dataset schema_version {version}")
    d_x = header["d_x"]

    samples = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                seq = RecordSequence.from_records(obj["records"])
                seq.validate(d_x)
                samples.append(LabeledSample(
                    id=obj["id"], seq=seq, true_ps=obj["true_ps"],
                    y0=obj["y0"], y1=obj["y1"],
                    treatment=obj["treatment"], outcome=obj["outcome"],
                ))
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"{path}:{lineno}: bad sample line: {exc}") from exc
    if len(samples) != header["n_samples"]:
        raise ConfigError(
            f"{path}: header says {header['n_samples']} samples, file has {len(samples)}"
        )
    return ClaimsDataset(
        samples=samples,
        d_x=d_x,
        scenario=ScenarioSpec.from_json_dict(header["scenario"]),
        seed=header["seed"],
        vocabulary=header.get("vocabulary"),
        patient_ids=header.get("patient_ids"),
    )
