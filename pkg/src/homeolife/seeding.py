"""Deterministic random streams: one master seed fans out to independent
substreams keyed by a label and optional indices."""

from __future__ import annotations

import hashlib

import numpy as np


def derive_stream(master_seed: int, label: str, *indices: int) -> np.random.Generator:
    """Independent PCG64 generator for (master_seed, label, *indices).

    The key material is hashed with SHA-256, so distinct keys give
    statistically independent streams and the mapping is stable across
    platforms and processes.
    """
    parts = [str(int(master_seed)), str(label)]
    parts.extend(str(int(i)) for i in indices)
    digest = hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()
    entropy = int.from_bytes(digest, "little")
    return np.random.default_rng(np.random.SeedSequence(entropy))
