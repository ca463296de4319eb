"""Features-as-Text: flatten a row into "name | value" pairs, plus the
column-name scrambling transform used to test name-value grounding."""

from __future__ import annotations

import random
from typing import Mapping, Sequence

from .schema import Value

FIELD_SEP = " [SEP] "
PAIR_SEP = " | "


def linearize(example: Mapping[str, Value]) -> str:
    """Join fields in attribute order: ``a | 1 [SEP] b | x``.

    Missing values (None, only possible in ingested real data) render as
    empty fields.
    """
    if not example:
        raise ValueError("empty example")
    return FIELD_SEP.join(
        f"{name}{PAIR_SEP}{'' if value is None else value}"
        for name, value in example.items()
    )


def scramble(example: Mapping[str, Value], permutation: Mapping[str, str]) -> dict[str, Value]:
    """Permute column names while values stay in place.

    ``permutation`` maps each attribute name to the name whose value it
    should now carry; it must be a bijection over the example's keys. The
    result keeps the original key order, so the value multiset and the
    column layout are both preserved.
    """
    keys = set(example)
    if set(permutation) != keys or set(permutation.values()) != keys:
        raise ValueError("permutation must be a bijection over the example's attribute names")
    return {name: example[permutation[name]] for name in example}


def sample_scramble_permutation(names: Sequence[str], rng: random.Random) -> dict[str, str]:
    """A uniform derangement of the names, so every name-value pair becomes
    incoherent (no column keeps its own value)."""
    names = list(names)
    if len(names) < 2:
        raise ValueError("need at least two names to scramble")
    while True:
        shuffled = names[:]
        rng.shuffle(shuffled)
        if all(a != b for a, b in zip(names, shuffled)):
            return dict(zip(names, shuffled))
