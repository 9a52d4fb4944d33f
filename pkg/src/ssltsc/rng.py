"""Deterministic named RNG substreams.

Every random draw in the package flows from one top-level integer seed
through substreams named by (seed, key, key, ...). Deriving streams by
name instead of advancing one global generator means independent pieces
of work (subjects, folds, epochs) never perturb each other's randomness.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _key_material(key: int | str) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key) & _MASK64
    if isinstance(key, str):
        digest = hashlib.sha256(key.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"rng key must be int or str, got {type(key).__name__}")


def seed_sequence(*keys: int | str) -> np.random.SeedSequence:
    return np.random.SeedSequence([_key_material(k) for k in keys])


def derive_rng(*keys: int | str) -> np.random.Generator:
    """Generator for the substream named by `keys`."""
    return np.random.default_rng(seed_sequence(*keys))


def derive_seed(*keys: int | str) -> int:
    """Stable 63-bit integer sub-seed mixed from `keys`."""
    return int(seed_sequence(*keys).generate_state(1, np.uint64)[0] >> 1)
