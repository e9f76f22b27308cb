"""Layers used by the propensity estimators, built on the engine.

All weights are float64. Affine and embedding weights init uniform
+-sqrt(6/(fan_in+fan_out)), biases zero, LSTM forget-gate bias +1.
"""

from __future__ import annotations

import numpy as np

from .engine import Array, Value, concat, take

MASK_BIAS = -1e30  # additive logit for masked keys; exp underflows to exactly 0


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int, shape: tuple[int, ...]) -> Array:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


class Affine:
    """y = x @ W + b over the last axis."""

    def __init__(self, rng: np.random.Generator, d_in: int, d_out: int, name: str):
        self.w = Value(glorot(rng, d_in, d_out, (d_in, d_out)))
        self.b = Value(np.zeros(d_out))
        self.name = name

    def __call__(self, x: Value) -> Value:
        return x @ self.w + self.b

    def params(self) -> dict[str, Value]:
        return {f"{self.name}.w": self.w, f"{self.name}.b": self.b}


class Embedding:
    """Code index -> dense vector lookup table."""

    def __init__(self, rng: np.random.Generator, n_codes: int, dim: int, name: str):
        self.table = Value(glorot(rng, n_codes, dim, (n_codes, dim)))
        self.name = name

    def __call__(self, indices: Array) -> Value:
        return take(self.table, indices)

    def params(self) -> dict[str, Value]:
        return {f"{self.name}.table": self.table}


class LstmCell:
    """Standard LSTM cell: input/forget/output gates plus candidate cell.

    Gate weights are packed [i, f, g, o] along the output axis; the forget
    slice of the bias starts at +1.
    """

    def __init__(self, rng: np.random.Generator, d_in: int, d_hidden: int, name: str):
        self.d_hidden = d_hidden
        self.wx = Value(glorot(rng, d_in, 4 * d_hidden, (d_in, 4 * d_hidden)))
        self.wh = Value(glorot(rng, d_hidden, 4 * d_hidden, (d_hidden, 4 * d_hidden)))
        b = np.zeros(4 * d_hidden)
        b[d_hidden:2 * d_hidden] = 1.0
        self.b = Value(b)
        self.name = name

    def __call__(self, x: Value, h_prev: Value, c_prev: Value) -> tuple[Value, Value]:
        d = self.d_hidden
        z = x @ self.wx + h_prev @ self.wh + self.b
        i = z[..., 0:d].sigmoid()
        f = z[..., d:2 * d].sigmoid()
        g = z[..., 2 * d:3 * d].tanh()
        o = z[..., 3 * d:4 * d].sigmoid()
        c = f * c_prev + i * g
        h = o * c.tanh()
        return h, c

    def params(self) -> dict[str, Value]:
        return {f"{self.name}.wx": self.wx, f"{self.name}.wh": self.wh, f"{self.name}.b": self.b}


class LayerNorm:
    """Normalize the last axis to zero mean / unit variance, then scale+shift."""

    def __init__(self, dim: int, name: str, eps: float = 1e-5):
        self.gamma = Value(np.ones(dim))
        self.beta = Value(np.zeros(dim))
        self.eps = eps
        self.name = name

    def __call__(self, x: Value) -> Value:
        mu = x.mean(axis=-1, keepdims=True)
        xc = x - mu
        var = (xc * xc).mean(axis=-1, keepdims=True)
        xhat = xc * (var + self.eps).pow(-0.5)
        return xhat * self.gamma + self.beta

    def params(self) -> dict[str, Value]:
        return {f"{self.name}.gamma": self.gamma, f"{self.name}.beta": self.beta}


class MultiHeadAttention:
    """Scaled dot-product self-attention over (batch, length, dim) inputs.

    `key_mask` is True for real tokens; masked keys get MASK_BIAS on the
    logits, which underflows to exactly zero weight after softmax. The
    per-head weight tensor (batch, heads, L, L) is kept on `last_weights`
    for readout.
    """

    def __init__(self, rng: np.random.Generator, dim: int, n_heads: int, name: str):
        if dim % n_heads != 0:
            raise ValueError(f"dim {dim} not divisible by heads {n_heads}")
        self.dim = dim
        self.n_heads = n_heads
        self.d_head = dim // n_heads
        self.wq = Affine(rng, dim, dim, f"{name}.q")
        self.wk = Affine(rng, dim, dim, f"{name}.k")
        self.wv = Affine(rng, dim, dim, f"{name}.v")
        self.wo = Affine(rng, dim, dim, f"{name}.o")
        self.name = name
        self.last_weights: Array | None = None

    def _split_heads(self, x: Value, batch: int, length: int) -> Value:
        return x.reshape(batch, length, self.n_heads, self.d_head).swapaxes(1, 2)

    def __call__(self, x: Value, key_mask: Array) -> Value:
        batch, length, _ = x.shape
        if key_mask.shape != (batch, length):
            raise ValueError(f"mask shape {key_mask.shape} != {(batch, length)}")
        if not key_mask.any(axis=1).all():
            raise ValueError("attention requires at least one unmasked key per row")
        q = self._split_heads(self.wq(x), batch, length)
        k = self._split_heads(self.wk(x), batch, length)
        v = self._split_heads(self.wv(x), batch, length)
        scores = (q @ k.swapaxes(-1, -2)) * (1.0 / np.sqrt(self.d_head))
        bias = np.where(key_mask, 0.0, MASK_BIAS)[:, None, None, :]
        weights = (scores + bias).softmax(axis=-1)
        self.last_weights = weights.data
        out = weights @ v
        out = out.swapaxes(1, 2).reshape(batch, length, self.dim)
        return self.wo(out)

    def params(self) -> dict[str, Value]:
        out: dict[str, Value] = {}
        for lin in (self.wq, self.wk, self.wv, self.wo):
            out.update(lin.params())
        return out


class EncoderBlock:
    """Self-attention + position-wise feed-forward, each with residual and
    post-layer-norm."""

    def __init__(self, rng: np.random.Generator, dim: int, n_heads: int, d_ff: int, name: str):
        self.attn = MultiHeadAttention(rng, dim, n_heads, f"{name}.attn")
        self.norm1 = LayerNorm(dim, f"{name}.norm1")
        self.ff1 = Affine(rng, dim, d_ff, f"{name}.ff1")
        self.ff2 = Affine(rng, d_ff, dim, f"{name}.ff2")
        self.norm2 = LayerNorm(dim, f"{name}.norm2")

    def __call__(self, x: Value, key_mask: Array) -> Value:
        x = self.norm1(x + self.attn(x, key_mask))
        x = self.norm2(x + self.ff2(self.ff1(x).relu()))
        return x

    def params(self) -> dict[str, Value]:
        out: dict[str, Value] = {}
        for part in (self.attn, self.norm1, self.ff1, self.ff2, self.norm2):
            out.update(part.params())
        return out


def positional_encoding(positions: Array, dim: int) -> Array:
    """Sinusoidal encoding: entry 2i = sin(pos/10000^(2i/dim)), 2i+1 = cos(same)."""
    if dim % 2 != 0:
        raise ValueError(f"positional encoding dim must be even, got {dim}")
    pos = np.asarray(positions, dtype=np.float64)
    i = np.arange(dim // 2)
    rates = pos[..., None] / (10000.0 ** (2.0 * i / dim))
    out = np.empty(pos.shape + (dim,))
    out[..., 0::2] = np.sin(rates)
    out[..., 1::2] = np.cos(rates)
    return out


def bce_loss(p: Value, labels: Array) -> Value:
    """Mean binary cross-entropy; p clamped to [1e-7, 1-1e-7] to avoid log(0)."""
    y = np.asarray(labels, dtype=np.float64)
    pc = p.clip(1e-7, 1.0 - 1e-7)
    losses = -(y * pc.log() + (1.0 - y) * (1.0 - pc).log())
    return losses.mean()


def record_pool(embeddings: Embedding, code_idx: Array, code_mask: Array) -> Value:
    """Mean-pool code embeddings per record; empty records give zero vectors.

    code_idx: (..., Cmax) int indices padded with 0; code_mask: same shape,
    True for real codes. Padded slots contribute exact zeros, so the pooled
    value equals the unpadded mean bit-for-bit.
    """
    emb = embeddings(code_idx)
    mask = np.asarray(code_mask, dtype=np.float64)[..., None]
    summed = (emb * mask).sum(axis=-2)
    counts = np.maximum(mask.sum(axis=-2), 1.0)
    return summed * (1.0 / counts)
