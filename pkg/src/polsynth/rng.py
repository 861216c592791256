"""Deterministic random substreams.

Every random draw in the package comes from a generator derived from
``(seed, purpose, *indices)`` so that results do not depend on the order in
which columns or iterations are evaluated.
"""

import numpy as np

# purpose codes, part of the substream key; never renumber
SPLIT = 1
FIT = 2
SAMPLE = 3
CONDITIONAL = 4
DISTORT = 5
ENFORCE = 6
CLASSIFIER = 7
ATTACK = 8
BENCHMARK = 9


def substream(seed: int, purpose: int, *indices: int) -> np.random.Generator:
    key = (int(purpose),) + tuple(int(i) for i in indices)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def derive_seed(seed: int, purpose: int, *indices: int) -> int:
    """A plain integer seed for handing to code that takes ``seed=``."""
    key = (int(purpose),) + tuple(int(i) for i in indices)
    return int(np.random.SeedSequence(int(seed), spawn_key=key).generate_state(1, np.uint32)[0])
