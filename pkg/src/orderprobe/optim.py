"""Adam with bias correction and the warmup/inverse-sqrt learning-rate rule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .tensor import Tensor


@dataclass
class OptimizerState:
    """Adam moment buffers for a fixed list of parameters."""

    beta1: float = 0.9
    beta2: float = 0.98
    epsilon: float = 1e-9
    step: int = 0
    first_moment: list[np.ndarray] = field(default_factory=list)
    second_moment: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_params(
        cls,
        params: list[Tensor],
        beta1: float = 0.9,
        beta2: float = 0.98,
        epsilon: float = 1e-9,
    ) -> "OptimizerState":
        return cls(
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
            step=0,
            first_moment=[np.zeros_like(p.data) for p in params],
            second_moment=[np.zeros_like(p.data) for p in params],
        )


def adam_step(
    params: list[Tensor],
    grads: list[np.ndarray],
    state: OptimizerState,
    lr: float,
) -> None:
    """One bias-corrected Adam update, in place on ``params``."""
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise DimensionError(
            f"adam_step got {len(params)} params, {len(grads)} grads, "
            f"{len(state.first_moment)} moment buffers"
        )
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.step
    c2 = 1.0 - b2**state.step
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        if g.shape != p.data.shape:
            raise DimensionError(
                f"gradient shape {g.shape} does not match parameter shape {p.data.shape}"
            )
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p.data -= lr * (m / c1) / (np.sqrt(v / c2) + state.epsilon)


@dataclass
class LrSchedule:
    """Linear warmup to step ``warmup_steps``, then inverse-sqrt decay."""

    model_dim: int
    warmup_steps: int

    def rate(self, step: int) -> float:
        return schedule_rate(self, step)


def schedule_rate(schedule: LrSchedule, step: int) -> float:
    """rate = model_dim^-0.5 * min(step^-0.5, step * warmup^-1.5), step >= 1."""
    if step < 1:
        raise ValueError(f"schedule step must be >= 1, got {step}")
    return schedule.model_dim**-0.5 * min(
        step**-0.5, step * schedule.warmup_steps**-1.5
    )
