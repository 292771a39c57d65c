"""Dense float64 tensors with reverse-mode automatic differentiation.

Every operation records its inputs on a tape (when gradients are enabled
and an input requires them); ``Tensor.backward`` walks the tape in reverse
topological order and accumulates gradients additively, so a tensor used
twice receives the sum of both contributions. All math is 64-bit.
"""

from __future__ import annotations

import contextlib
from collections.abc import Callable, Sequence

import numpy as np

from .errors import DimensionError, InvalidMaskError
from .rng import Rng

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable tape recording inside the block (evaluation passes)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    """A node in the computation graph.

    ``data`` is a row-major float64 ndarray; ``grad`` stays ``None`` until a
    backward pass reaches this node. Tensors without parents and with
    ``requires_grad=False`` are plain immutable values.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        _parents: tuple["Tensor", ...] = (),
        _backward: Callable[[np.ndarray], None] | None = None,
    ):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def __repr__(self) -> str:
        flag = ", requires_grad" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{flag})"

    def detach(self) -> "Tensor":
        """Same values, cut off from the graph."""
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """Populate ``grad`` for every reachable tensor that requires it.

        The seed must be scalar (one element); gradients from multiple uses
        of the same tensor accumulate additively.
        """
        if self.data.size != 1:
            raise DimensionError(
                f"backward needs a scalar loss, got shape {self.data.shape}"
            )
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))
        self.grad = _accumulate(self.grad, np.ones_like(self.data))
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- operator sugar ------------------------------------------------

    def __add__(self, other):
        return add(self, _ensure(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(_ensure(other), _ensure(-1.0)))

    def __rsub__(self, other):
        return add(_ensure(other), mul(self, _ensure(-1.0)))

    def __mul__(self, other):
        return mul(self, _ensure(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _ensure(other)
        return mul(self, power(other, -1.0))

    def __neg__(self):
        return mul(self, _ensure(-1.0))

    def __matmul__(self, other):
        return matmul(self, _ensure(other))

    def reshape(self, *shape: int) -> "Tensor":
        return reshape(self, shape)

    def transpose(self, *axes: int) -> "Tensor":
        return transpose(self, axes)

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        return tmean(self, axis=axis, keepdims=keepdims)

    def __getitem__(self, key) -> "Tensor":
        return take(self, key)


def _ensure(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _accumulate(current: np.ndarray | None, update: np.ndarray) -> np.ndarray:
    return np.array(update, copy=True) if current is None else current + update


def _send(parent: Tensor, grad: np.ndarray) -> None:
    if parent.requires_grad or parent._parents:
        parent.grad = _accumulate(parent.grad, grad)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum gradient over axes that were broadcast in the forward pass."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def _wants_graph(*parents: Tensor) -> bool:
    if not _grad_enabled:
        return False
    return any(p.requires_grad or p._parents for p in parents)


def _result(data: np.ndarray, parents: tuple[Tensor, ...], backward) -> Tensor:
    if _wants_graph(*parents):
        return Tensor(data, requires_grad=False, _parents=parents, _backward=backward)
    return Tensor(data)


# -- elementwise ------------------------------------------------------


def add(a: Tensor, b: Tensor) -> Tensor:
    out = a.data + b.data

    def backward(g: np.ndarray) -> None:
        _send(a, _unbroadcast(g, a.data.shape))
        _send(b, _unbroadcast(g, b.data.shape))

    return _result(out, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    out = a.data * b.data

    def backward(g: np.ndarray) -> None:
        _send(a, _unbroadcast(g * b.data, a.data.shape))
        _send(b, _unbroadcast(g * a.data, b.data.shape))

    return _result(out, (a, b), backward)


def power(a: Tensor, exponent: float) -> Tensor:
    out = a.data**exponent

    def backward(g: np.ndarray) -> None:
        _send(a, g * exponent * a.data ** (exponent - 1.0))

    return _result(out, (a,), backward)


def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.data)

    def backward(g: np.ndarray) -> None:
        _send(a, g * (1.0 - out * out))

    return _result(out, (a,), backward)


def sigmoid(a: Tensor) -> Tensor:
    out = 0.5 * (np.tanh(0.5 * a.data) + 1.0)

    def backward(g: np.ndarray) -> None:
        _send(a, g * out * (1.0 - out))

    return _result(out, (a,), backward)


def relu(a: Tensor) -> Tensor:
    out = np.maximum(a.data, 0.0)

    def backward(g: np.ndarray) -> None:
        _send(a, g * (a.data > 0.0))

    return _result(out, (a,), backward)


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)

    def backward(g: np.ndarray) -> None:
        _send(a, g * out)

    return _result(out, (a,), backward)


def log(a: Tensor) -> Tensor:
    out = np.log(a.data)

    def backward(g: np.ndarray) -> None:
        _send(a, g / a.data)

    return _result(out, (a,), backward)


def clip_min(a: Tensor, floor: float) -> Tensor:
    """Elementwise max(a, floor); gradient passes where a >= floor."""
    out = np.maximum(a.data, floor)

    def backward(g: np.ndarray) -> None:
        _send(a, g * (a.data >= floor))

    return _result(out, (a,), backward)


# -- reductions and reshaping ----------------------------------------


def tsum(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g: np.ndarray) -> None:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        _send(a, np.broadcast_to(g, a.data.shape).copy())

    return _result(out, (a,), backward)


def tmean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = a.data.mean(axis=axis, keepdims=keepdims)
    count = a.data.size // max(out.size, 1)

    def backward(g: np.ndarray) -> None:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        _send(a, np.broadcast_to(g, a.data.shape) / count)

    return _result(out, (a,), backward)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    out = a.data.reshape(shape)

    def backward(g: np.ndarray) -> None:
        _send(a, g.reshape(a.data.shape))

    return _result(out, (a,), backward)


def transpose(a: Tensor, axes: Sequence[int]) -> Tensor:
    out = np.transpose(a.data, axes)
    inverse = np.argsort(axes)

    def backward(g: np.ndarray) -> None:
        _send(a, np.transpose(g, inverse))

    return _result(out, (a,), backward)


def take(a: Tensor, key) -> Tensor:
    """Indexing/slicing; scatter-add on the way back (handles repeats)."""
    out = a.data[key]

    def backward(g: np.ndarray) -> None:
        gz = np.zeros_like(a.data)
        np.add.at(gz, key, g)
        _send(a, gz)

    return _result(out, (a,), backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = tuple(tensors)
    out = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(g: np.ndarray) -> None:
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            idx = [slice(None)] * g.ndim
            idx[axis] = slice(lo, hi)
            _send(t, g[tuple(idx)])

    return _result(out, tensors, backward)


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = tuple(tensors)
    out = np.stack([t.data for t in tensors], axis=axis)

    def backward(g: np.ndarray) -> None:
        for i, t in enumerate(tensors):
            _send(t, np.take(g, i, axis=axis))

    return _result(out, tensors, backward)


# -- linear algebra ---------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product; batch dimensions broadcast as in ``np.matmul``."""
    if a.data.ndim < 1 or b.data.ndim < 1 or a.data.shape[-1] != b.data.shape[-2 if b.data.ndim > 1 else 0]:
        raise DimensionError(f"cannot matmul shapes {a.data.shape} and {b.data.shape}")
    out = np.matmul(a.data, b.data)

    def backward(g: np.ndarray) -> None:
        bd = b.data if b.data.ndim > 1 else b.data[:, None]
        ad = a.data if a.data.ndim > 1 else a.data[None, :]
        gg = g
        if b.data.ndim == 1:
            gg = gg[..., None]
        if a.data.ndim == 1:
            gg = gg[..., None, :]
        ga = np.matmul(gg, np.swapaxes(bd, -1, -2))
        gb = np.matmul(np.swapaxes(ad, -1, -2), gg)
        if a.data.ndim == 1:
            ga = ga.reshape(ga.shape[:-2] + (ga.shape[-1],))
        if b.data.ndim == 1:
            gb = gb.reshape(gb.shape[:-1])
        _send(a, _unbroadcast(ga, a.data.shape))
        _send(b, _unbroadcast(gb, b.data.shape))

    return _result(out, (a, b), backward)


def embedding(table: Tensor, ids: np.ndarray) -> Tensor:
    """Row lookup ``table[ids]``; backward scatter-adds into the table."""
    ids = np.asarray(ids)
    out = table.data[ids]

    def backward(g: np.ndarray) -> None:
        gz = np.zeros_like(table.data)
        np.add.at(gz, ids, g)
        _send(table, gz)

    return _result(out, (table,), backward)


# -- fused neural-net ops ---------------------------------------------


def masked_softmax(logits: Tensor, mask: np.ndarray | None = None, axis: int = -1) -> Tensor:
    """Softmax along ``axis`` with entries where ``mask`` is False forced to 0.

    Rows are stabilised by max subtraction. Every row must keep at least
    one unmasked entry.
    """
    x = logits.data
    if mask is not None:
        m = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
        if not m.any(axis=axis).all():
            raise InvalidMaskError("softmax row with every entry masked")
        shifted = np.where(m, x, -np.inf)
    else:
        shifted = x
    peak = shifted.max(axis=axis, keepdims=True)
    e = np.exp(shifted - peak)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g: np.ndarray) -> None:
        inner = (g * out).sum(axis=axis, keepdims=True)
        _send(logits, out * (g - inner))

    return _result(out, (logits,), backward)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-6) -> Tensor:
    """Normalize over the last axis, then scale and shift."""
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv
    out = xhat * gain.data + bias.data

    def backward(g: np.ndarray) -> None:
        batch_axes = tuple(range(g.ndim - 1))
        _send(gain, (g * xhat).sum(axis=batch_axes))
        _send(bias, g.sum(axis=batch_axes))
        gx = g * gain.data
        _send(
            x,
            inv
            * (
                gx
                - gx.mean(axis=-1, keepdims=True)
                - xhat * (gx * xhat).mean(axis=-1, keepdims=True)
            ),
        )

    return _result(out, (x, gain, bias), backward)


def dropout(x: Tensor, rate: float, rng: Rng) -> Tensor:
    """Inverted dropout: keep with prob 1-rate, scale kept values by 1/(1-rate)."""
    if rate <= 0.0:
        return x
    keep = (rng.random(x.data.shape) >= rate) / (1.0 - rate)
    out = x.data * keep

    def backward(g: np.ndarray) -> None:
        _send(x, g * keep)

    return _result(out, (x,), backward)


def pick(x: Tensor, index: np.ndarray, axis: int = -1) -> Tensor:
    """Gather along ``axis`` (like ``np.take_along_axis``)."""
    index = np.asarray(index)
    out = np.take_along_axis(x.data, index, axis=axis)

    def backward(g: np.ndarray) -> None:
        gz = np.zeros_like(x.data)
        grids = list(np.ogrid[tuple(slice(s) for s in index.shape)])
        grids[axis] = index
        np.add.at(gz, tuple(grids), g)
        _send(x, gz)

    return _result(out, (x,), backward)


def glorot_uniform(rng: Rng, shape: tuple[int, ...], fan_in: int, fan_out: int) -> Tensor:
    """Trainable array initialised uniformly in +-sqrt(6/(fan_in+fan_out))."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(rng.uniform(-limit, limit, shape), requires_grad=True)


def zeros(shape: tuple[int, ...], requires_grad: bool = False) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=requires_grad)


def ones(shape: tuple[int, ...], requires_grad: bool = False) -> Tensor:
    return Tensor(np.ones(shape), requires_grad=requires_grad)
