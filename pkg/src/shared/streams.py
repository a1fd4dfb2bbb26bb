"""
RandomStream: counter-based, trial-indexed randomness.

PURPOSE:
    Every trial of every experiment draws from its own stream, keyed by the
    master seed and the trial index. Results therefore do not depend on how
    trials are distributed over workers.

DESIGN:
    Philox is a counter-based bit generator; SeedSequence spawn keys give
    statistically independent streams for distinct (seed, index, tag...) keys.
    The stream only hands out uniforms. Samplers turn them into discrete
    choices themselves, so a numba kernel fed the same buffer replays the
    exact same path.
"""

from __future__ import annotations

import numpy as np


class RandomStream:
    """Reproducible uniform source for one trial."""

    def __init__(self, seed: int, index: int = 0, tag: tuple[int, ...] = ()):
        if seed < 0 or index < 0:
            raise ValueError("seed and index must be non-negative")
        self.seed = int(seed)
        self.index = int(index)
        self.tag = tuple(int(t) for t in tag)
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.index, *self.tag)
        )
        self._generator = np.random.Generator(np.random.Philox(sequence))
        self.counter = 0

    def uniforms(self, size: int) -> np.ndarray:
        """Next `size` i.i.d. U[0,1) draws."""
        values = self._generator.random(size)
        self.counter += int(size)
        return values

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def bernoulli(self, p: float, size: int) -> np.ndarray:
        """Boolean draws with P(True) = p, as `uniform < p`."""
        return self.uniforms(size) < p

    def child(self, tag: int) -> RandomStream:
        """Independent sub-stream, for randomness that must not shift the parent."""
        return RandomStream(self.seed, self.index, (*self.tag, tag))

    def __repr__(self) -> str:
        return (
            f"RandomStream(seed={self.seed}, index={self.index}, "
            f"tag={self.tag}, counter={self.counter})"
        )


def uniform_index(u: float, size: int) -> int:
    """Map a uniform in [0,1) to an index in [0, size)."""
    j = int(u * size)
    return j if j < size else size - 1
