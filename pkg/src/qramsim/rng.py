"""Seedable, splittable random streams for every stochastic piece of the lab.

All randomness flows through counter-based Philox (4x64) generators keyed by
(seed, stream tag, optional trial index) via numpy's SeedSequence, so any
consumer can derive its own substream independently of execution order.
GENERATOR_ID names the scheme and is recorded in emitted experiment rows.
"""

from __future__ import annotations

import numpy as np

GENERATOR_ID = "philox4x64-seedseq"

# Stream tags; distinct consumers must never share one.
STREAM_NOISE_TRIAL = 1
STREAM_MEMORY = 2
STREAM_QUERY = 3
STREAM_VERIFY = 4

_U64 = (1 << 64) - 1


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the (seed, *key) substream, independent of all others."""
    ss = np.random.SeedSequence(entropy=seed & _U64, spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    """Per-trial noise substream; trials may run in any order."""
    return substream(seed, STREAM_NOISE_TRIAL, trial)
