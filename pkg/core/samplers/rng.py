# Seeded random streams for the samplers.
"""Reproducible, splittable random number streams.

Every sampler is a pure function of its inputs and an :class:`RngState`. The
bit generator is numpy's counter-based ``Philox``; independent child streams
for parallel trials are derived through :class:`numpy.random.SeedSequence`
spawn keys, so ``seed_i = hash(base_seed, trial_index)`` is deterministic and
collision-resistant.

Standard normal variates always come from ``Generator.standard_normal``,
which uses the ziggurat method. Changing that method would change every
seeded stream in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from core.models.covariance import FloatArray

Shape = int | tuple[int, ...]


def _sequence(seed: int, spawn_key: tuple[int, ...]) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)


def derive_seed(base_seed: int, *key: int) -> int:
    """Deterministic 63-bit seed for the stream identified by ``key``.

    Fits a signed 64-bit integer, so it round-trips through CSV columns.
    """

    state = _sequence(base_seed, tuple(key)).generate_state(1, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))


@dataclass(eq=False)
class RngState:
    """A seeded Philox stream plus the zero-noise test hook.

    ``noise_scale`` multiplies every standard-normal draw. It is ``1.0`` in
    normal use; :meth:`zero_noise` returns a state with ``0.0`` so tests can
    force ``xi = 0`` and check deterministic mean propagation.
    """

    seed: int
    spawn_key: tuple[int, ...] = ()
    noise_scale: float = 1.0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        bit_generator = np.random.Philox(_sequence(self.seed, self.spawn_key))
        self.generator = np.random.Generator(bit_generator)

    @classmethod
    def from_seed(cls, seed: int) -> RngState:
        return cls(seed=seed)

    def spawn(self, *key: int) -> RngState:
        """Independent child stream; the same key always yields the same stream."""

        return RngState(
            seed=self.seed,
            spawn_key=self.spawn_key + tuple(key),
            noise_scale=self.noise_scale,
        )

    def zero_noise(self) -> RngState:
        return RngState(seed=self.seed, spawn_key=self.spawn_key, noise_scale=0.0)

    def standard_normal(self, shape: Shape) -> FloatArray:
        if self.noise_scale == 0.0:
            return np.zeros(shape, dtype=np.float64)
        draws = self.generator.standard_normal(shape)
        if self.noise_scale != 1.0:
            draws *= self.noise_scale
        return draws

    def uniform(
        self,
        low: float | FloatArray,
        high: float | FloatArray,
        size: Shape | None = None,
    ) -> FloatArray:
        return self.generator.uniform(low, high, size)

    def permutation(self, n: int) -> NDArray[np.int64]:
        return self.generator.permutation(n)
