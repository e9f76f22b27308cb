"""Padded batch construction for the sequence models.

Padding is exact-neutral: padded code slots pool to zero contribution,
padded records are carried through the LSTM unchanged via the step mask,
and padded tokens get fully masked attention logits. Batched outputs
therefore equal per-sample outputs bit-for-bit up to BLAS reduction order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..claimsgen.types import RecordSequence


@dataclass
class RecordBatch:
    """Records padded to (B, T, C): code indices, code validity, record validity."""

    code_idx: np.ndarray
    code_mask: np.ndarray
    record_mask: np.ndarray

    @property
    def n_records(self) -> np.ndarray:
        return self.record_mask.sum(axis=1).astype(int)


def pad_records(seqs: list[RecordSequence]) -> RecordBatch:
    b = len(seqs)
    t_max = max(s.n_records for s in seqs)
    c_max = max((len(r) for s in seqs for r in s.records), default=1)
    c_max = max(c_max, 1)
    code_idx = np.zeros((b, t_max, c_max), dtype=np.int64)
    code_mask = np.zeros((b, t_max, c_max), dtype=bool)
    record_mask = np.zeros((b, t_max), dtype=bool)
    for i, s in enumerate(seqs):
        for t, rec in enumerate(s.records):
            record_mask[i, t] = True
            if rec:
                code_idx[i, t, :len(rec)] = rec
                code_mask[i, t, :len(rec)] = True
    return RecordBatch(code_idx=code_idx, code_mask=code_mask, record_mask=record_mask)


@dataclass
class TokenBatch:
    """Code-level token stream per sample, [CLS] slot excluded.

    token_idx: (B, L) code indices; token_pos: (B, L) record positions
    (1-based); token_mask: (B, L) validity. `n_truncated` counts samples
    that lost oldest records to the length cap.
    """

    token_idx: np.ndarray
    token_pos: np.ndarray
    token_mask: np.ndarray
    n_truncated: int


def flatten_codes(seqs: list[RecordSequence], max_tokens: int = 512) -> TokenBatch:
    """Chronological code tokens; every code of record t carries position t.

    Sequences longer than max_tokens - 1 (one slot is reserved for [CLS])
    drop oldest records first, and surviving records are renumbered from 1.
    """
    budget = max_tokens - 1
    kept: list[list[tuple[int, int]]] = []
    n_truncated = 0
    for s in seqs:
        records = list(s.records)
        total = sum(len(r) for r in records)
        dropped = False
        while total > budget and len(records) > 1:
            total -= len(records[0])
            records = records[1:]
            dropped = True
        if dropped:
            n_truncated += 1
        tokens = [(code, t + 1) for t, rec in enumerate(records) for code in rec]
        kept.append(tokens[:budget])

    b = len(seqs)
    l_max = max((len(tok) for tok in kept), default=1)
    l_max = max(l_max, 1)
    token_idx = np.zeros((b, l_max), dtype=np.int64)
    token_pos = np.zeros((b, l_max), dtype=np.int64)
    token_mask = np.zeros((b, l_max), dtype=bool)
    for i, tokens in enumerate(kept):
        for j, (code, pos) in enumerate(tokens):
            token_idx[i, j] = code
            token_pos[i, j] = pos
            token_mask[i, j] = True
    return TokenBatch(token_idx=token_idx, token_pos=token_pos,
                      token_mask=token_mask, n_truncated=n_truncated)
