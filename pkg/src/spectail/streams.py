"""Reproducible random streams derived from a master seed.

Every Monte Carlo loop in the package takes an explicit ``numpy.random.Generator``.
Streams for parallel work are derived, never shared: ``derive_seed`` mixes a
master seed with a sequence of labels (replicate index, model name, purpose tag)
through a 64-bit finalizer, so any (master, labels) pair maps to a stable seed
on every platform.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF

Label = int | str


def _mix64(z: int) -> int:
    """64-bit finalizer (splitmix64); full avalanche on single-bit flips."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _label_to_int(label: Label) -> int:
    if isinstance(label, bool):  # bool is an int subclass; reject to avoid surprises
        raise TypeError("labels must be ints or strings")
    if isinstance(label, int):
        return label & _MASK64
    if isinstance(label, str):
        digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    raise TypeError(f"labels must be ints or strings, got {type(label).__name__}")


def derive_seed(master: int, labels: tuple[Label, ...] | list[Label] = ()) -> int:
    """Collision-resistantly mix ``labels`` into ``master``; returns a 64-bit seed.

    With no labels the result is the mix of the master seed alone, so derived
    and underived streams never coincide by accident.
    """
    state = _mix64(master & _MASK64)
    for label in labels:
        state = _mix64(state ^ _mix64(_label_to_int(label)))
    return state


def make_stream(master: int, labels: tuple[Label, ...] | list[Label] = ()) -> np.random.Generator:
    """A ``numpy.random.Generator`` seeded by ``derive_seed(master, labels)``."""
    return np.random.default_rng(derive_seed(master, labels))


def substreams(stream_seed: int, count: int, tag: Label = "sub") -> list[np.random.Generator]:
    """Independent child streams for splitting one MC loop across tasks."""
    return [make_stream(stream_seed, (tag, i)) for i in range(count)]
