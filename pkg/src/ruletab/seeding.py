"""Stable seed derivation so every task is independently reproducible."""

from __future__ import annotations

import hashlib
import random


def stable_seed(*parts: object) -> int:
    """Hash arbitrary parts (ints, strings) into a 64-bit seed.

    The digest is platform- and process-independent, unlike ``hash()``.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(repr(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


def derive_rng(*parts: object) -> random.Random:
    """A fresh ``random.Random`` stream keyed by the given parts."""
    return random.Random(stable_seed(*parts))
