"""Finite-difference verification of backward-pass gradients."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from .errors import NumericError
from .tensor import Tensor


def grad_check(
    f: Callable[[Tensor], Tensor],
    x: Tensor,
    h: float = 1e-5,
) -> float:
    """Max relative error between backward gradients and central differences.

    ``f`` must map ``x`` to a scalar Tensor and be deterministic (any
    randomness inside must be frozen). The relative error of entry i is
    |analytic - numeric| / max(|analytic|, |numeric|, 1e-3); the floor keeps
    near-zero gradients from amplifying finite-difference round-off.
    """
    probe = Tensor(x.data.copy(), requires_grad=True)
    out = f(probe)
    if not np.isfinite(out.data).all():
        raise NumericError("function value is not finite at x")
    out.backward()
    analytic = (
        probe.grad.copy() if probe.grad is not None else np.zeros_like(probe.data)
    )

    numeric = np.zeros_like(probe.data)
    flat_num = numeric.reshape(-1)
    base = x.data.copy().reshape(-1)
    for i in range(base.size):
        for sign in (+1.0, -1.0):
            shifted = base.copy()
            shifted[i] += sign * h
            val = f(Tensor(shifted.reshape(x.data.shape))).data
            if not np.isfinite(val).all():
                raise NumericError(f"function value not finite at perturbation {i}")
            flat_num[i] += sign * float(val) / (2.0 * h)

    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-3)
    return float(np.max(np.abs(analytic - numeric) / scale))
