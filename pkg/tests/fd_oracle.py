"""Central finite-difference gradient oracle shared by the gradient tests.

Kept independent of the engine's backward pass: it only mutates parameter
data in place and re-evaluates the scalar loss.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from claimsbench.numerics import Value


def fd_grad(loss_fn: Callable[[], float], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    grad = np.zeros_like(x)
    flat, gflat = x.ravel(), grad.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = loss_fn()
        flat[i] = orig - h
        fm = loss_fn()
        flat[i] = orig
        gflat[i] = (fp - fm) / (2.0 * h)
    return grad


def max_rel_error(make_loss: Callable[[], Value], params: dict[str, Value],
                  h: float = 1e-5) -> float:
    """Largest per-parameter relative error between autodiff and central FD.

    The 1e-4 denominator floor turns the check into an absolute bound of
    1e-8 for structurally-zero gradients (e.g. the key bias under softmax
    shift invariance), where central differences only resolve roundoff.
    """
    for p in params.values():
        p.zero_grad()
    make_loss().backward()
    analytic = {k: p.grad.copy() for k, p in params.items()}

    worst = 0.0
    for name, p in params.items():
        fd = fd_grad(lambda: float(make_loss().data), p.data, h)
        denom = max(np.abs(analytic[name]).max(), np.abs(fd).max(), 1e-4)
        worst = max(worst, np.abs(analytic[name] - fd).max() / denom)
    return worst
