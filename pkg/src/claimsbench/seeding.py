"""Named RNG stream derivation.

Every random draw in the package comes from a Generator derived as
(master seed, role string, index), so adding estimators or reordering
work never perturbs other streams and parallel execution stays
reproducible.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _role_key(role: str) -> int:
    return int.from_bytes(hashlib.sha256(role.encode()).digest()[:8], "big")


def derive_rng(seed: int, role: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, _role_key(role), index]))


def derive_seed(seed: int, role: str, index: int = 0) -> int:
    """A derived 63-bit integer seed, for passing across process boundaries."""
    return int(derive_rng(seed, role, index).integers(0, 2**63 - 1))
