"""Transformer-encoder estimators with [CLS] readout.

Two input schemes: code-level (one token per code occurrence, all codes of
record t sharing position t) and record-level (one mean-pooled token per
record, positions 1..T). Sinusoidal encodings are added; [CLS] sits at
position 0 and its final representation feeds the sigmoid head.
"""

from __future__ import annotations

import numpy as np

from ..claimsgen.types import LabeledSample, RecordSequence
from ..numerics import (
    Affine,
    Embedding,
    EncoderBlock,
    Value,
    concat,
    positional_encoding,
    record_pool,
)
from .base import GradientEstimator
from .batching import TokenBatch, flatten_codes, pad_records


class BertEstimator(GradientEstimator):
    embed_dim = 64
    model_dim = 64
    n_layers = 2
    n_heads = 4
    max_tokens = 512

    def __init__(self, d_x: int, input_mode: str = "code"):
        super().__init__(d_x)
        if input_mode not in ("code", "record"):
            raise ValueError(f"unknown input_mode {input_mode!r}")
        self.input_mode = input_mode
        self.name = f"bert-{input_mode}"
        self.truncation_events = 0

    def _build(self, rng: np.random.Generator) -> None:
        self.embedding = Embedding(rng, self.d_x, self.embed_dim, "embed")
        self.cls = Value(rng.normal(0.0, 0.02, size=(1, self.model_dim)))
        self.blocks = [
            EncoderBlock(rng, self.model_dim, self.n_heads, 4 * self.model_dim, f"enc{i}")
            for i in range(self.n_layers)
        ]
        self.head = Affine(rng, self.model_dim, 1, "head")
        self._params = dict(self.embedding.params())
        self._params["cls"] = self.cls
        for block in self.blocks:
            self._params.update(block.params())
        self._params.update(self.head.params())

    # -- input construction -------------------------------------------------

    def _code_inputs(self, seqs: list[RecordSequence]) -> tuple[Value, np.ndarray, TokenBatch]:
        batch = flatten_codes(seqs, self.max_tokens)
        self.truncation_events += batch.n_truncated
        tokens = self.embedding(batch.token_idx)
        tokens = tokens + Value(positional_encoding(batch.token_pos, self.model_dim))
        mask = batch.token_mask
        return tokens, mask, batch

    def _record_inputs(self, seqs: list[RecordSequence]) -> tuple[Value, np.ndarray]:
        batch = pad_records(seqs)
        pooled = record_pool(self.embedding, batch.code_idx, batch.code_mask)
        t_max = pooled.shape[1]
        positions = np.tile(np.arange(1, t_max + 1), (len(seqs), 1))
        pooled = pooled + Value(positional_encoding(positions, self.model_dim))
        return pooled, batch.record_mask

    def _encode(self, seqs: list[RecordSequence]) -> Value:
        if self.input_mode == "code":
            tokens, token_mask, _ = self._code_inputs(seqs)
        else:
            tokens, token_mask = self._record_inputs(seqs)
        b = len(seqs)
        cls_tile = self.cls.reshape(1, 1, self.model_dim) + Value(np.zeros((b, 1, self.model_dim)))
        cls_tile = cls_tile + Value(positional_encoding(np.zeros((b, 1)), self.model_dim))
        x = concat([cls_tile, tokens], axis=1)
        mask = np.concatenate([np.ones((b, 1), dtype=bool), token_mask], axis=1)
        for block in self.blocks:
            x = block(x, mask)
        return x

    def _forward_batch(self, samples: list[LabeledSample]) -> Value:
        x = self._encode([s.seq for s in samples])
        return self.head(x[:, 0, :]).sigmoid().reshape(len(samples))

    # -- attention readout -----------------------------------------------------

    def input_length(self, seq: RecordSequence) -> int:
        """Input positions including [CLS] (after any truncation)."""
        if self.input_mode == "record":
            return 1 + seq.n_records
        batch = flatten_codes([seq], self.max_tokens)
        return 1 + int(batch.token_mask.sum())

    def cls_attention_rows(self, samples: list[LabeledSample]) -> list[np.ndarray]:
        """Last-layer [CLS] attention row per sample, averaged over heads,
        trimmed to the sample's real input length."""
        self._require_trained()
        rows: list[np.ndarray] = []
        for start in range(0, len(samples), self.predict_batch_size):
            chunk = samples[start:start + self.predict_batch_size]
            self._encode([s.seq for s in chunk])
            weights = self.blocks[-1].attn.last_weights  # (B, H, L+1, L+1)
            for i, s in enumerate(chunk):
                n = self.input_length(s.seq)
                rows.append(weights[i, :, 0, :n].mean(axis=0))
        return rows

    def confounder_positions(self, seq: RecordSequence, codes: tuple[int, ...]) -> np.ndarray:
        """Boolean mask over non-[CLS] input positions marking tokens (or
        records) that carry a confounding code."""
        code_set = set(codes)
        if self.input_mode == "record":
            return np.array([bool(code_set & set(rec)) for rec in seq.records])
        batch = flatten_codes([seq], self.max_tokens)
        idx = batch.token_idx[0][batch.token_mask[0]]
        return np.isin(idx, list(code_set))
