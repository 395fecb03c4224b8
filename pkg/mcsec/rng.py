"""Deterministic random streams."""
from __future__ import annotations

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Return a generator that depends only on ``seed`` and ``path``.

    Per-epoch and per-trial streams are derived this way, so a run gives the
    same numbers whatever order its pieces are executed in.
    """
    entropy = [int(seed), *(int(p) for p in path)]
    return np.random.default_rng(np.random.SeedSequence(entropy))
