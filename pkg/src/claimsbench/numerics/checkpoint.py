"""Parameter checkpoints: JSON of name -> shape + flat decimal array.

Floats are written with 17 significant digits, which round-trips float64
bit-exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .engine import Value


def params_to_dict(params: dict[str, Value]) -> dict:
    out = {}
    for name, p in params.items():
        out[name] = {
            "shape": list(p.data.shape),
            "data": [f"{x:.17g}" for x in p.data.ravel()],
        }
    return out


def dict_to_arrays(blob: dict) -> dict[str, np.ndarray]:
    out = {}
    for name, entry in blob.items():
        arr = np.array([float(x) for x in entry["data"]], dtype=np.float64)
        out[name] = arr.reshape(entry["shape"])
    return out


def save_params(params: dict[str, Value], path: str | Path) -> None:
    Path(path).write_text(json.dumps(params_to_dict(params), indent=1, sort_keys=True))


def load_params(path: str | Path, params: dict[str, Value]) -> None:
    """Load arrays into an existing parameter set (shapes must match)."""
    arrays = dict_to_arrays(json.loads(Path(path).read_text()))
    if set(arrays) != set(params):
        missing = set(params) ^ set(arrays)
        raise ValueError(f"checkpoint parameter names do not match: {sorted(missing)}")
    for name, arr in arrays.items():
        if arr.shape != params[name].data.shape:
            raise ValueError(f"shape mismatch for {name}: {arr.shape} vs {params[name].data.shape}")
        params[name].data = arr
        params[name].zero_grad()
