"""Deterministic random-stream derivation.

Every random draw in the package descends from a single integer seed through
named sub-streams, so independent pieces of work (paths, dither, per-m
repeats) can run in any order without changing results.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_rng(seed: int, *labels) -> np.random.Generator:
    """Generator for the sub-stream identified by (seed, labels...).

    Labels are hashed, so any mix of strings and integers works and unrelated
    label tuples give statistically independent streams.
    """
    tokens = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for lab in labels:
        digest = hashlib.sha256(repr(lab).encode()).digest()
        tokens.append(int.from_bytes(digest[:8], "little"))
    return np.random.default_rng(np.random.SeedSequence(tokens))
