"""Equivalence-class sizes: how many records share a record's known values."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from typing import Sequence

import numpy as np

from .known_sets import KnownSet
from .model import Dataset, Value

# composite keys are re-densified before they could overflow int64
_KEY_LIMIT = 1 << 62
# below this many possible keys a bincount beats sorting
_BINCOUNT_LIMIT = 1 << 22


def project(record: Sequence[Value], ks: KnownSet) -> tuple[Value, ...]:
    """The record's values on the known attributes, in index order."""
    return tuple(record[j] for j in ks.members)


def group_keys(dataset: Dataset, ks: KnownSet) -> tuple[np.ndarray, int]:
    """Integer key per record, equal iff the projections are equal.

    Returns the keys and an exclusive upper bound on their values.
    """
    n = dataset.n_records
    key = np.zeros(n, dtype=np.int64)
    bound = 1
    for j in ks.members:
        card = max(len(dataset.levels[j]), 1)
        if bound * card >= _KEY_LIMIT:
            _, key = np.unique(key, return_inverse=True)
            key = key.astype(np.int64).reshape(-1)
            bound = int(key.max()) + 1
        key = key * card + dataset.codes[j]
        bound *= card
    return key, bound


def per_record_counts(dataset: Dataset, ks: KnownSet) -> np.ndarray:
    """count(r(KS)) for every record r, as an int64 array."""
    n = dataset.n_records
    if ks.mask == 0:
        return np.full(n, n, dtype=np.int64)
    key, bound = group_keys(dataset, ks)
    if bound <= max(_BINCOUNT_LIMIT, 4 * n):
        sizes = np.bincount(key, minlength=bound)
        return sizes[key]
    _, inverse, sizes = np.unique(key, return_inverse=True, return_counts=True)
    return sizes[inverse.reshape(-1)]


class CountTable:
    """Occurrence count of every projected value tuple for one known set."""

    def __init__(self, dataset: Dataset, ks: KnownSet):
        self.known_set = ks
        self._dataset = dataset
        key, _ = group_keys(dataset, ks)
        _, first, inverse, sizes = np.unique(
            key, return_index=True, return_inverse=True, return_counts=True
        )
        self.group_of = inverse.reshape(-1)
        self.sizes = sizes
        self._first = first
        self.group_of.setflags(write=False)
        self.sizes.setflags(write=False)

    @property
    def n_groups(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return int(self.sizes.sum())

    def record_counts(self) -> np.ndarray:
        return self.sizes[self.group_of]

    @cached_property
    def counts(self) -> dict[tuple[Value, ...], int]:
        """Projected value tuple -> number of records carrying it."""
        ds = self._dataset
        members = self.known_set.members
        out = {}
        for g, i in enumerate(self._first):
            t = tuple(ds.levels[j][ds.codes[j][i]] for j in members)
            out[t] = int(self.sizes[g])
        return out

    def __getitem__(self, projection: tuple[Value, ...]) -> int:
        return self.counts[projection]

    def __repr__(self) -> str:
        return f"CountTable(mask={self.known_set.mask}, groups={self.n_groups})"


def build_count_table(dataset: Dataset, ks: KnownSet) -> CountTable:
    return CountTable(dataset, ks)


def build_all_count_tables(
    dataset: Dataset, sets: Sequence[KnownSet], jobs: int | None = 1
) -> list[CountTable]:
    """One table per known set, in input order."""
    if jobs is None or jobs <= 1 or len(sets) <= 1:
        return [CountTable(dataset, ks) for ks in sets]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda ks: CountTable(dataset, ks), sets))
