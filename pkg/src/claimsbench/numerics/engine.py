"""Reverse-mode autodiff on float64 numpy arrays.

A Value wraps one array node in the computation graph. Ops build fresh
nodes with closure backwards (a new graph per minibatch); parameters are
leaf Values reused across graphs, so their grads accumulate until zeroed.
Grad buffers are allocated lazily on first accumulation, keeping
forward-only passes allocation-free. Broadcasting is supported for
elementwise ops and matmul leading dims, which is all the estimators need.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

Array = np.ndarray


def _as_array(x) -> Array:
    return np.asarray(x, dtype=np.float64)


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    keep = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if keep:
        grad = grad.sum(axis=keep, keepdims=True)
    return grad


class Value:
    """One node: data, a lazily-allocated grad of the same shape, and the
    closure that pushes this node's grad to its parents."""

    __slots__ = ("data", "_grad", "_parents", "_backward")

    # Make ndarray <op> Value dispatch to our reflected operators instead of
    # numpy building an object array elementwise.
    __array_ufunc__ = None

    def __init__(self, data, _parents: tuple = (), _backward: Callable[[], None] | None = None):
        self.data = _as_array(data)
        self._grad: Array | None = None
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def grad(self) -> Array:
        if self._grad is None:
            self._grad = np.zeros_like(self.data)
        return self._grad

    @grad.setter
    def grad(self, g: Array) -> None:
        self._grad = g

    def accum_grad(self, g: Array) -> None:
        # Copy on first accumulation: g may alias another node's buffer or
        # be a broadcast view.
        if self._grad is None:
            self._grad = np.array(g, dtype=np.float64)
            if self._grad.shape != self.data.shape:
                self._grad = np.broadcast_to(self._grad, self.data.shape).copy()
        else:
            self._grad += g

    def __repr__(self) -> str:
        return f"Value(shape={self.data.shape})"

    # -- graph traversal ----------------------------------------------------

    def _topo(self) -> list[Value]:
        # Iterative DFS; deep LSTM graphs overflow Python's recursion limit.
        order: list[Value] = []
        visited: set[int] = set()
        stack: list[tuple[Value, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))
        return order

    def backward(self) -> None:
        """Populate grads of all reachable nodes; requires a scalar root."""
        if self.data.size != 1:
            raise ValueError(f"backward() needs a scalar loss, got shape {self.data.shape}")
        order = self._topo()
        self.accum_grad(np.ones_like(self.data))
        for node in reversed(order):
            if node._backward is not None and node._grad is not None:
                node._backward()

    def zero_grad(self) -> None:
        self._grad = None

    # -- operators ----------------------------------------------------------

    def __add__(self, other) -> Value:
        other = other if isinstance(other, Value) else Value(other)
        out = Value(self.data + other.data, (self, other))

        def _back():
            self.accum_grad(_unbroadcast(out._grad, self.data.shape))
            other.accum_grad(_unbroadcast(out._grad, other.data.shape))

        out._backward = _back
        return out

    def __mul__(self, other) -> Value:
        other = other if isinstance(other, Value) else Value(other)
        out = Value(self.data * other.data, (self, other))

        def _back():
            self.accum_grad(_unbroadcast(other.data * out._grad, self.data.shape))
            other.accum_grad(_unbroadcast(self.data * out._grad, other.data.shape))

        out._backward = _back
        return out

    def __neg__(self) -> Value:
        return self * -1.0

    def __sub__(self, other) -> Value:
        return self + (-other if isinstance(other, Value) else Value(-_as_array(other)))

    def __rsub__(self, other) -> Value:
        return (-self) + other

    def __radd__(self, other) -> Value:
        return self + other

    def __rmul__(self, other) -> Value:
        return self * other

    def __matmul__(self, other) -> Value:
        other = other if isinstance(other, Value) else Value(other)
        out = Value(self.data @ other.data, (self, other))

        def _back():
            a, b, g = self.data, other.data, out._grad
            ga = g @ np.swapaxes(b, -1, -2)
            gb = np.swapaxes(a, -1, -2) @ g
            self.accum_grad(_unbroadcast(ga, a.shape))
            other.accum_grad(_unbroadcast(gb, b.shape))

        out._backward = _back
        return out

    def __getitem__(self, idx) -> Value:
        out = Value(self.data[idx], (self,))

        def _back():
            # Scatter into the full-size buffer; force allocation first.
            self.grad[idx] += out._grad

        out._backward = _back
        return out

    # -- reductions and shape -----------------------------------------------

    def sum(self, axis=None, keepdims: bool = False) -> Value:
        out = Value(self.data.sum(axis=axis, keepdims=keepdims), (self,))

        def _back():
            g = out._grad
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self.accum_grad(np.broadcast_to(g, self.data.shape))

        out._backward = _back
        return out

    def mean(self, axis=None, keepdims: bool = False) -> Value:
        n = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / n)

    def reshape(self, *shape) -> Value:
        out = Value(self.data.reshape(*shape), (self,))

        def _back():
            self.accum_grad(out._grad.reshape(self.data.shape))

        out._backward = _back
        return out

    def swapaxes(self, a: int, b: int) -> Value:
        out = Value(np.swapaxes(self.data, a, b), (self,))

        def _back():
            self.accum_grad(np.swapaxes(out._grad, a, b))

        out._backward = _back
        return out

    # -- pointwise nonlinearities --------------------------------------------

    def sigmoid(self) -> Value:
        y = 1.0 / (1.0 + np.exp(-self.data))
        out = Value(y, (self,))

        def _back():
            self.accum_grad(y * (1.0 - y) * out._grad)

        out._backward = _back
        return out

    def tanh(self) -> Value:
        y = np.tanh(self.data)
        out = Value(y, (self,))

        def _back():
            self.accum_grad((1.0 - y * y) * out._grad)

        out._backward = _back
        return out

    def relu(self) -> Value:
        out = Value(np.maximum(self.data, 0.0), (self,))

        def _back():
            self.accum_grad((self.data > 0.0) * out._grad)

        out._backward = _back
        return out

    def exp(self) -> Value:
        y = np.exp(self.data)
        out = Value(y, (self,))

        def _back():
            self.accum_grad(y * out._grad)

        out._backward = _back
        return out

    def log(self) -> Value:
        out = Value(np.log(self.data), (self,))

        def _back():
            self.accum_grad(out._grad / self.data)

        out._backward = _back
        return out

    def pow(self, p: float) -> Value:
        out = Value(self.data ** p, (self,))

        def _back():
            self.accum_grad(p * self.data ** (p - 1.0) * out._grad)

        out._backward = _back
        return out

    def clip(self, lo: float, hi: float) -> Value:
        out = Value(np.clip(self.data, lo, hi), (self,))

        def _back():
            inside = (self.data > lo) & (self.data < hi)
            self.accum_grad(inside * out._grad)

        out._backward = _back
        return out

    def softmax(self, axis: int = -1) -> Value:
        z = self.data - self.data.max(axis=axis, keepdims=True)
        ez = np.exp(z)
        y = ez / ez.sum(axis=axis, keepdims=True)
        out = Value(y, (self,))

        def _back():
            g = out._grad
            dot = (g * y).sum(axis=axis, keepdims=True)
            self.accum_grad(y * (g - dot))

        out._backward = _back
        return out


def take(table: Value, indices: Array) -> Value:
    """Row gather `table[indices]` with scatter-add backward (embedding lookup)."""
    idx = np.asarray(indices)
    out = Value(table.data[idx], (table,))

    def _back():
        np.add.at(table.grad, idx, out._grad)

    out._backward = _back
    return out


def masked_mean_gather(table: Value, indices: Array, mask: Array) -> Value:
    """Mean of table rows per group: out[..., :] = mean over valid j of
    table[indices[..., j]]. Groups with no valid entry give zero vectors.

    Fused gather/mask/mean used for record pooling; indices (..., C),
    mask (..., C) boolean, output (..., D).
    """
    idx = np.asarray(indices)
    m = np.asarray(mask, dtype=bool)
    counts = np.maximum(m.sum(axis=-1, keepdims=True), 1).astype(np.float64)
    gathered = table.data[idx]
    gathered = np.where(m[..., None], gathered, 0.0)
    out = Value(gathered.sum(axis=-2) / counts, (table,))

    def _back():
        g = out._grad / counts  # (..., D)
        rows = np.broadcast_to(g[..., None, :], idx.shape + (table.data.shape[1],))
        np.add.at(table.grad, idx[m], rows[m])

    out._backward = _back
    return out


def concat(values: Iterable[Value], axis: int = 0) -> Value:
    vals = list(values)
    out = Value(np.concatenate([v.data for v in vals], axis=axis), tuple(vals))
    sizes = [v.data.shape[axis] for v in vals]
    splits = np.cumsum(sizes)[:-1]

    def _back():
        for v, g in zip(vals, np.split(out._grad, splits, axis=axis)):
            v.accum_grad(g)

    out._backward = _back
    return out
