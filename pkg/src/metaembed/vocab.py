"""Vocabulary alignment across embedding sets.

Computes the shared (intersection) and combined (union) vocabularies of
two or more embedding sets, plus per-set presence masks and row lookups.
A word counts as out-of-vocabulary (OOV) for a set when it is missing
from that set but covered by at least one of the others.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .io import EmbeddingSet


@dataclass(frozen=True)
class VocabAlignment:
    """Intersection/union bookkeeping for a fixed list of sets.

    ``presence[i, j]`` is True when set ``set_names[i]`` contains
    ``union[j]``.  Both word lists are sorted lexicographically so that
    downstream training batches and outputs are deterministic.
    """

    set_names: list[str]
    intersection: list[str]
    union: list[str]
    presence: np.ndarray
    index_maps: dict[str, dict[str, int]]

    def set_position(self, set_name: str) -> int:
        try:
            return self.set_names.index(set_name)
        except ValueError:
            raise KeyError(f"unknown set name {set_name!r}") from None


def align(sets: list[EmbeddingSet]) -> VocabAlignment:
    """Align the vocabularies of ``sets`` (at least two)."""
    if len(sets) < 2:
        raise ValueError(f"need at least 2 embedding sets, got {len(sets)}")
    names = [s.name for s in sets]
    if len(set(names)) != len(names):
        raise ValueError(f"embedding set names must be unique, got {names}")

    vocabs = [set(s.words) for s in sets]
    intersection = sorted(set.intersection(*vocabs))
    union = sorted(set.union(*vocabs))

    presence = np.zeros((len(sets), len(union)), dtype=bool)
    for i, vocab in enumerate(vocabs):
        presence[i] = [w in vocab for w in union]

    return VocabAlignment(
        set_names=names,
        intersection=intersection,
        union=union,
        presence=presence,
        index_maps={s.name: dict(s.index) for s in sets},
    )


def oov_words(alignment: VocabAlignment, set_name: str) -> list[str]:
    """Words of the union that the named set does not cover."""
    i = alignment.set_position(set_name)
    mask = alignment.presence[i]
    return [w for w, present in zip(alignment.union, mask) if not present]
