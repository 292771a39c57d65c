"""Seeded randomness with reproducible, splittable streams."""

from __future__ import annotations

import numpy as np


class Rng:
    """Deterministic random stream backed by PCG64.

    Identical seeds yield bit-identical streams. ``spawn`` derives
    independent child streams deterministically, which is how dataset
    splits and shards stay reproducible without sharing state.
    """

    def __init__(self, seed: int, _seq: np.random.SeedSequence | None = None):
        self.seed = int(seed)
        self._seq = _seq if _seq is not None else np.random.SeedSequence(self.seed)
        self._gen = np.random.Generator(np.random.PCG64(self._seq))

    def spawn(self, n: int) -> list["Rng"]:
        """Derive n independent child streams."""
        return [Rng(self.seed, _seq=s) for s in self._seq.spawn(n)]

    def integers(self, low: int, high: int) -> int:
        """Single integer in [low, high)."""
        return int(self._gen.integers(low, high))

    def uniform(self, low: float, high: float, shape: tuple[int, ...]) -> np.ndarray:
        return self._gen.uniform(low, high, size=shape)

    def random(self, shape: tuple[int, ...]) -> np.ndarray:
        """Floats in [0, 1)."""
        return self._gen.random(size=shape)

    def normal(self, shape: tuple[int, ...]) -> np.ndarray:
        return self._gen.standard_normal(size=shape)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def choice(self, n: int, size: int, replace: bool = True) -> np.ndarray:
        return self._gen.choice(n, size=size, replace=replace)
