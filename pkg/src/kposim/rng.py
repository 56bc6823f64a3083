"""Deterministic random-stream derivation.

Every random draw in the package comes from a numpy ``Generator`` built as

    default_rng(SeedSequence([seed, *path]))

where ``path`` is a fixed tuple of small integer tags (below) plus indices
such as cell or repeat numbers.  Distinct paths give statistically
independent streams, so graph construction, initial conditions and noise
never share bits, per-repeat streams do not depend on scheduling order, and
results are reproducible bit-for-bit from a single master seed.

Derivation paths used across the package:

* graph edges:            (graph_seed, TAG_GRAPH)
* initial conditions:     (seed, TAG_INIT)
* SDE noise:              (seed, TAG_NOISE)
* sweep cell seed:        (master_seed, TAG_CELL, cell_index)
* per-repeat seed:        (seed, TAG_REPEAT, repeat_index)
* per-detuning hist seed: (master_seed, TAG_DELTA, delta_index)
"""

import numpy as np

TAG_GRAPH = 1
TAG_INIT = 2
TAG_NOISE = 3
TAG_CELL = 4
TAG_REPEAT = 5
TAG_DELTA = 6


def seed_sequence(seed, *path):
    """SeedSequence for ``seed`` refined by a tuple of integer tags."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence([int(seed), *map(int, path)])


def stream(seed, *path):
    """Independent Generator for the given seed and derivation path."""
    return np.random.default_rng(seed_sequence(seed, *path))


def child_seed(seed, *path):
    """Derived unsigned integer seed, for APIs that accept a plain seed."""
    return int(seed_sequence(seed, *path).generate_state(1, np.uint64)[0])
