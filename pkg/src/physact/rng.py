"""Seeded, counter-based random streams (Philox).

Every stochastic routine takes an integer seed plus a fixed stream tag, so
separate consumers of one global seed never share draws.
"""
import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))
