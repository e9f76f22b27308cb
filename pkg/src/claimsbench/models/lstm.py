"""Recurrent estimator: record average-pooling into a 2-layer LSTM, sigmoid
readout on the final hidden state."""

from __future__ import annotations

import numpy as np

from ..claimsgen.types import LabeledSample
from ..numerics import Affine, Embedding, LstmCell, Value, record_pool
from .base import GradientEstimator
from .batching import pad_records


class LstmEstimator(GradientEstimator):
    name = "lstm"
    embed_dim = 64
    hidden_dim = 64
    n_layers = 2

    def _build(self, rng: np.random.Generator) -> None:
        self.embedding = Embedding(rng, self.d_x, self.embed_dim, "embed")
        self.cells = []
        d_in = self.embed_dim
        for i in range(self.n_layers):
            self.cells.append(LstmCell(rng, d_in, self.hidden_dim, f"lstm{i}"))
            d_in = self.hidden_dim
        self.head = Affine(rng, self.hidden_dim, 1, "head")
        self._params = dict(self.embedding.params())
        for cell in self.cells:
            self._params.update(cell.params())
        self._params.update(self.head.params())

    def _forward_batch(self, samples: list[LabeledSample]) -> Value:
        batch = pad_records([s.seq for s in samples])
        b, t_max, _ = batch.code_idx.shape
        pooled = record_pool(self.embedding, batch.code_idx, batch.code_mask)

        layer_input = [pooled[:, t, :] for t in range(t_max)]
        final_h = None
        for cell in self.cells:
            h = Value(np.zeros((b, self.hidden_dim)))
            c = Value(np.zeros((b, self.hidden_dim)))
            outputs = []
            for t in range(t_max):
                h_new, c_new = cell(layer_input[t], h, c)
                # Padded steps hold the previous state, so the final state is
                # each sequence's own last record.
                m = batch.record_mask[:, t:t + 1].astype(np.float64)
                h = h_new * m + h * (1.0 - m)
                c = c_new * m + c * (1.0 - m)
                outputs.append(h)
            layer_input = outputs
            final_h = h
        return self.head(final_h).sigmoid().reshape(b)
