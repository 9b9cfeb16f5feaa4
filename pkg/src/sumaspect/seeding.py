"""Deterministic per-document random streams.

Every randomized selector derives its generator from the CLI seed plus a
stream label and the document id, so results do not depend on processing
order or worker count.
"""

from __future__ import annotations

import hashlib

import numpy as np


def rng_for(seed: int, *key: str) -> np.random.Generator:
    material = "\x1f".join([str(int(seed)), *key]).encode("utf-8")
    digest = hashlib.sha256(material).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "little")))
