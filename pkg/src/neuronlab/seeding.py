"""Deterministic seed derivation for trials, steps and workers.

All randomness in the package flows through ``numpy.random.Generator``
objects created from 64-bit seeds. Sub-seeds (per trial, per step) are
derived with a splitmix64 hash so that streams are independent and the
derivation does not depend on execution order or worker count.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 output for the given 64-bit state."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master: int, *indices: int) -> int:
    """Fold trial/step indices into a master seed.

    Each index is hashed before xor-ing so that nearby indices give
    unrelated streams (master ^ splitmix64(index) for a single level).
    """
    s = master & _MASK64
    for idx in indices:
        s = splitmix64(s ^ splitmix64(idx & _MASK64))
    return s


def rng_from(master: int, *indices: int) -> np.random.Generator:
    """Generator for the sub-stream identified by the index path."""
    if indices:
        return np.random.default_rng(derive_seed(master, *indices))
    return np.random.default_rng(master & _MASK64)
