"""Known-set enumeration with monotone probability pruning.

A known set is the group of attributes an adversary is assumed to know.
Its probability of being public is the product of the per-attribute
probabilities, so it can only shrink as attributes are added. Once a set
falls to ``epsilon`` or below, none of its supersets can qualify and the
whole subtree is skipped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import RiskConfig

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True, order=True)
class KnownSet:
    """Attribute indices known to the adversary; the rest are unknown.

    ``mask`` has bit j set when attribute j is a member, and doubles as the
    canonical sort key.
    """

    mask: int
    pk: float

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.mask.bit_length()) if self.mask >> j & 1)

    def unknown(self, m: int) -> tuple[int, ...]:
        return tuple(j for j in range(m) if not self.mask >> j & 1)

    def __contains__(self, j: int) -> bool:
        return bool(self.mask >> j & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def names(self, schema: Sequence[str]) -> tuple[str, ...]:
        return tuple(schema[j] for j in self.members)

    @classmethod
    def of(cls, members: Iterable[int], probs: Sequence[float]) -> "KnownSet":
        mask = members_to_mask(members)
        return cls(mask, _product(probs, mask))


def members_to_mask(members: Iterable[int]) -> int:
    mask = 0
    for j in members:
        mask |= 1 << j
    return mask


def _product(probs: Sequence[float], mask: int) -> float:
    # ascending index order, so a depth-first walk that multiplies one
    # attribute at a time reproduces this value bit for bit
    pk = 1.0
    for j, p in enumerate(probs):
        if mask >> j & 1:
            pk *= p
    return pk


def _probs(config: RiskConfig | Sequence[float]) -> tuple[float, ...]:
    if isinstance(config, RiskConfig):
        return config.probabilities
    return tuple(config)


def known_set_probability(config: RiskConfig | Sequence[float], members: Iterable[int]) -> float:
    """Probability that every attribute in ``members`` is publicly known."""
    probs = _probs(config)
    members = list(members)
    for j in members:
        if not 0 <= j < len(probs):
            raise IndexError(f"attribute index {j} out of range for {len(probs)} attributes")
    return _product(probs, members_to_mask(members))


def enumerate_known_sets(config: RiskConfig, epsilon: float | None = None) -> list[KnownSet]:
    """All known sets whose public probability is strictly above epsilon.

    Depth-first over the subset tree where a node's children append one
    attribute with a larger index than any it already holds. A child that
    fails the threshold is never expanded, so work is proportional to the
    number of retained sets times m. Output is sorted by mask.
    """
    probs = config.probabilities
    eps = config.epsilon if epsilon is None else epsilon
    m = len(probs)
    out: list[KnownSet] = []
    if not 1.0 > eps:
        return out
    # (mask, pk, next attribute index to try)
    stack = [(0, 1.0, 0)]
    while stack:
        mask, pk, start = stack.pop()
        out.append(KnownSet(mask, pk))
        for j in range(m - 1, start - 1, -1):
            child = pk * probs[j]
            if child > eps:
                stack.append((mask | 1 << j, child, j + 1))
    out.sort()
    return out


def brute_force_known_sets(
    config: RiskConfig, epsilon: float | None = None, limit: int = BRUTE_FORCE_LIMIT
) -> list[KnownSet]:
    """Filter every one of the 2^m subsets; the oracle for the pruned walk."""
    probs = config.probabilities
    eps = config.epsilon if epsilon is None else epsilon
    m = len(probs)
    if m > limit:
        raise ValueError(f"brute force limited to m ≤ {limit} (got m = {m})")
    out = []
    for mask in range(1 << m):
        pk = _product(probs, mask)
        if pk > eps:
            out.append(KnownSet(mask, pk))
    return out
