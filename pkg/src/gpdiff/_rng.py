from __future__ import annotations

import numpy as np

# purpose tags mixed into seed keys
INIT, OPTIMIZER, FDC, WALK, BEHAVIOR, VARIATION = range(6)


def _flatten(keys):
    for k in keys:
        if isinstance(k, (tuple, list)):
            yield from _flatten(k)
        else:
            yield int(k)


def stream(*keys) -> np.random.Generator:
    """Independent generator for a key path such as ``(seed, generation, index)``.

    Keys may be ints or nested tuples of ints; equal paths give equal streams.
    """
    return np.random.default_rng(np.random.SeedSequence(list(_flatten(keys))))
