"""Adam optimizer with bias correction, no learning-rate scheduling."""

from __future__ import annotations

import logging

import numpy as np

from .engine import Value

logger = logging.getLogger(__name__)


class Adam:
    """Per-parameter first/second moment state; step() applies one
    bias-corrected update in place. Grads are zeroed by the caller."""

    def __init__(self, params: dict[str, Value], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v.data) for k, v in params.items()}
        self.v = {k: np.zeros_like(v.data) for k, v in params.items()}
        self.skipped_steps = 0

    def step(self) -> bool:
        """Apply one update; skip (and report) if any grad is non-finite."""
        for name, p in self.params.items():
            if not np.isfinite(p.grad).all():
                self.skipped_steps += 1
                logger.warning("non-finite grad in %s; optimizer step skipped", name)
                return False
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for name, p in self.params.items():
            g = p.grad
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p.data -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
        return True

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()
