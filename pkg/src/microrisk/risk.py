"""Per-record disclosure risk.

For one record and one known set, the likelihood of re-identification is
the set's public probability divided by the size of the record's
equivalence class on the known attributes, and the consequence is the
weighted sensitivity of everything left unknown. A record's risk is alpha
times the sum of likelihood * consequence over all retained known sets.
"""
from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .counts import CountTable, per_record_counts, project
from .known_sets import KnownSet, brute_force_known_sets, enumerate_known_sets
from .model import Dataset, RiskConfig, Value, resolve_value_weight, sensitivity_levels

DEFAULT_TOP_K = 10


@dataclass(frozen=True)
class Contribution:
    known_set: KnownSet
    likelihood: float
    consequence: float
    term: float


@dataclass(frozen=True)
class RecordRisk:
    record_index: int
    risk: float
    top_contributions: Optional[tuple[Contribution, ...]] = None


def likelihood(record: Sequence[Value], ks: KnownSet, table: CountTable) -> float:
    if table.known_set.mask != ks.mask:
        raise ValueError("count table was built for a different known set")
    key = project(record, ks)
    try:
        count = table.counts[key]
    except KeyError:
        raise ValueError(f"projection {key!r} not found in count table") from None
    return ks.pk / count


def consequence(record: Sequence[Value], ks: KnownSet, config: RiskConfig) -> float:
    total = 0.0
    for j, attr in enumerate(config.attributes):
        if j in ks:
            continue
        total += attr.attr_weight * resolve_value_weight(attr, record[j])
    return total


def _top(terms: list[tuple[float, int, Contribution]], k: int) -> tuple[Contribution, ...]:
    ranked = sorted((t for t in terms if t[0] > 0), key=lambda t: (-t[0], t[1]))
    return tuple(c for _, _, c in ranked[:k])


def record_risk(
    record: Sequence[Value],
    retained: Sequence[tuple[KnownSet, CountTable]],
    config: RiskConfig,
    record_index: int = 0,
    top_k: int = DEFAULT_TOP_K,
) -> RecordRisk:
    """Risk of one record, summed over ``retained`` in the order given."""
    acc = 0.0
    terms = []
    for order, (ks, table) in enumerate(retained):
        lik = likelihood(record, ks, table)
        con = consequence(record, ks, config)
        acc += lik * con
        if top_k:
            terms.append((lik * con, order, Contribution(ks, lik, con, config.alpha * (lik * con))))
    top = _top(terms, top_k) if top_k else None
    return RecordRisk(record_index, config.alpha * acc, top)


def retained_sets(config: RiskConfig, brute_force: bool = False) -> list[KnownSet]:
    if brute_force:
        return brute_force_known_sets(config)
    return enumerate_known_sets(config)


def default_jobs() -> int:
    try:
        return max(len(os.sched_getaffinity(0)), 1)
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


@dataclass
class Scores:
    """Vectorized assessment output."""

    risks: np.ndarray
    known_sets: list[KnownSet]
    # (N, k) arrays, present when top-k tracking was requested
    top_set: Optional[np.ndarray] = None
    top_likelihood: Optional[np.ndarray] = None
    top_consequence: Optional[np.ndarray] = None
    top_term: Optional[np.ndarray] = None


class _Evaluator:
    def __init__(self, dataset: Dataset, config: RiskConfig):
        self.dataset = dataset
        self.m = dataset.n_attributes
        # per-record attr_weight * value weight, sensitive columns only
        self.sensitivity = {}
        for j, attr in enumerate(config.attributes):
            if attr.sensitive:
                levels = sensitivity_levels(attr, dataset.levels[j])
                self.sensitivity[j] = levels[dataset.codes[j]]

    def terms(self, ks: KnownSet) -> tuple[np.ndarray, np.ndarray]:
        n = self.dataset.n_records
        lik = ks.pk / per_record_counts(self.dataset, ks)
        con = np.zeros(n)
        for j, s in self.sensitivity.items():
            if j not in ks:
                con += s
        return lik, con


def score_dataset(
    dataset: Dataset,
    config: RiskConfig,
    known_sets: Optional[Sequence[KnownSet]] = None,
    jobs: Optional[int] = 1,
    top_k: int = 0,
) -> Scores:
    """Risk for every record as a float array.

    Known sets are processed in canonical order and each one's terms are
    added elementwise, so every record sees exactly the same sequence of
    floating-point operations as :func:`record_risk` whatever ``jobs`` is.
    With ``jobs > 1`` several known sets are counted concurrently while the
    accumulation itself stays ordered.
    """
    sets = list(retained_sets(config) if known_sets is None else known_sets)
    n = dataset.n_records
    jobs = default_jobs() if jobs is None else max(int(jobs), 1)
    ev = _Evaluator(dataset, config)
    acc = np.zeros(n)

    if top_k:
        rows = np.arange(n)
        top_term = np.zeros((n, top_k))
        top_set = np.full((n, top_k), -1, dtype=np.int64)
        top_lik = np.zeros((n, top_k))
        top_con = np.zeros((n, top_k))

    def consume(index: int, lik: np.ndarray, con: np.ndarray) -> None:
        nonlocal acc
        term = lik * con
        acc += term
        if top_k:
            # evict the smallest term; on ties the latest set, matching a stable sort
            low = top_term == top_term.min(axis=1, keepdims=True)
            slot = np.where(low, top_set, -2).argmax(axis=1)
            hit = term > top_term[rows, slot]
            r, s = rows[hit], slot[hit]
            top_term[r, s] = term[hit]
            top_set[r, s] = index
            top_lik[r, s] = lik[hit]
            top_con[r, s] = con[hit]

    if jobs == 1 or len(sets) <= 1:
        for index, ks in enumerate(sets):
            consume(index, *ev.terms(ks))
    else:
        window = 2 * jobs
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            pending: deque = deque()
            for index, ks in enumerate(sets):
                pending.append((index, pool.submit(ev.terms, ks)))
                if len(pending) >= window:
                    i, fut = pending.popleft()
                    consume(i, *fut.result())
            while pending:
                i, fut = pending.popleft()
                consume(i, *fut.result())

    scores = Scores(config.alpha * acc, sets)
    if top_k:
        # descending by term, ties broken by canonical set order
        missing = top_set < 0
        order = np.lexsort((np.where(missing, np.iinfo(np.int64).max, top_set), -top_term), axis=1)
        take = lambda a: np.take_along_axis(a, order, axis=1)  # noqa: E731
        scores.top_set = take(top_set)
        scores.top_likelihood = take(top_lik)
        scores.top_consequence = take(top_con)
        scores.top_term = config.alpha * take(top_term)
    return scores


def assess_dataset(
    dataset: Dataset,
    config: RiskConfig,
    known_sets: Optional[Sequence[KnownSet]] = None,
    jobs: Optional[int] = 1,
    top_k: int = DEFAULT_TOP_K,
) -> list[RecordRisk]:
    """Enumerate, count and score every record; output is in dataset order."""
    scores = score_dataset(dataset, config, known_sets, jobs=jobs, top_k=top_k)
    out = []
    for i, risk in enumerate(scores.risks.tolist()):
        top = None
        if top_k:
            top = tuple(
                Contribution(
                    scores.known_sets[s],
                    float(scores.top_likelihood[i, c]),
                    float(scores.top_consequence[i, c]),
                    float(scores.top_term[i, c]),
                )
                for c, s in enumerate(scores.top_set[i].tolist())
                if s >= 0
            )
        out.append(RecordRisk(i, risk, top))
    return out
