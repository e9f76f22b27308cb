from .engine import Value, concat, take
from .layers import (
    Affine,
    Embedding,
    EncoderBlock,
    LayerNorm,
    LstmCell,
    MultiHeadAttention,
    bce_loss,
    glorot,
    positional_encoding,
    record_pool,
)
from .optim import Adam
from .checkpoint import load_params, params_to_dict, save_params

__all__ = [
    "Adam",
    "Affine",
    "Embedding",
    "EncoderBlock",
    "LayerNorm",
    "LstmCell",
    "MultiHeadAttention",
    "Value",
    "bce_loss",
    "concat",
    "glorot",
    "load_params",
    "params_to_dict",
    "positional_encoding",
    "record_pool",
    "save_params",
    "take",
]
