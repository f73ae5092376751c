"""
Seeded random streams
One SeedSequence per scenario seed, split into named, independent sub-streams
"""
from typing import Dict

import numpy as np

STREAM_NAMES = ("chain", "gold", "poison", "reference")


def named_streams(seed: int) -> Dict[str, np.random.Generator]:
    """Return one Generator per stream name, all derived from ``seed``"""
    children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
    return {name: np.random.default_rng(child) for name, child in zip(STREAM_NAMES, children)}


def derive_seed(master_seed: int, *keys: int) -> int:
    """Deterministic 64-bit sub-seed for (master_seed, keys...), e.g. a repetition index"""
    sequence = np.random.SeedSequence([int(master_seed), *[int(k) for k in keys]])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
