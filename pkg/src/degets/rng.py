"""Deterministic RNG substreams keyed by (seed, tags...).

Every random stage in the benchmark draws from its own substream so that
adding or removing one estimator never perturbs another's results. Keys
may mix integers and strings; strings are hashed with sha256 so streams
are stable across processes and platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _as_int(key: int | str) -> int:
    if isinstance(key, str):
        return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:4], "big")
    return int(key)


def seed_sequence(*keys: int | str) -> np.random.SeedSequence:
    return np.random.SeedSequence([_as_int(k) for k in keys])


def stream(*keys: int | str) -> np.random.Generator:
    """Generator for the substream addressed by ``keys``."""
    return np.random.default_rng(seed_sequence(*keys))


def substream_seed(*keys: int | str) -> int:
    """A plain integer seed derived from ``keys`` (for APIs that take one)."""
    return int(seed_sequence(*keys).generate_state(1, np.uint32)[0])
