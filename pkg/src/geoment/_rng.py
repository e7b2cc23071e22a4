"""Counter-based RNG derivation.

Every random stream in the package is addressed by ``(seed, *keys)`` so that
results never depend on scheduling order or on how many workers share a job.
"""

from __future__ import annotations

import numpy as np


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Return an independent generator for the stream ``(seed, *keys)``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(ss)


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return derive_rng(seed)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unit_vectors(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """``count`` i.i.d. uniform unit vectors in C^n, shape ``(count, n)``."""
    z = complex_gaussian(rng, (count, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def derive_seed(seed: int, *keys: int) -> int:
    """A 63-bit integer seed for the stream ``(seed, *keys)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))
