"""Summaries of an assessment: decade histogram, high-risk listing, stats."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .model import RiskConfig
from .risk import RecordRisk

# lowest decade edge used unless smaller positive risks are present
DEFAULT_MIN_DECADE = -12


@dataclass(frozen=True)
class BinSpec:
    """Decade bins 10^k .. 10^(k+1); ``edges`` overrides with explicit ones."""

    min_decade: int = DEFAULT_MIN_DECADE
    edges: Optional[tuple[float, ...]] = None


@dataclass(frozen=True)
class Bin:
    lower: float
    upper: float
    count: int


@dataclass(frozen=True)
class Summary:
    min: float
    max: float
    mean: float
    median: float


@dataclass(frozen=True)
class RiskReport:
    n_records: int
    retained_set_count: int
    epsilon: float
    alpha: float
    high_risk_threshold: float
    histogram: tuple[Bin, ...]
    high_risk: tuple[tuple[int, float], ...]
    summary: Summary
    notes: tuple[str, ...] = field(default=())

    @property
    def high_risk_count(self) -> int:
        return len(self.high_risk)

    @property
    def high_risk_percent(self) -> float:
        return 100.0 * len(self.high_risk) / self.n_records


def decade(k: int) -> float:
    # parsed from text so edges print as 1e-05, not 1.0000000000000001e-05
    return float(f"1e{k}")


def floor_decade(x: float) -> int:
    """Largest k with 10^k <= x, for x > 0."""
    k = math.floor(math.log10(x))
    while decade(k) > x:
        k -= 1
    while decade(k + 1) <= x:
        k += 1
    return k


def histogram(risks: np.ndarray, spec: BinSpec = BinSpec()) -> tuple[Bin, ...]:
    """Zero bin [0, 0] followed by contiguous half-open bins [lo, hi)."""
    risks = np.asarray(risks, dtype=float)
    zeros = int(np.count_nonzero(risks == 0))
    positive = np.sort(risks[risks > 0])
    bins = [Bin(0.0, 0.0, zeros)]
    if spec.edges is not None:
        edges = list(spec.edges)
        if positive.size and positive[0] < edges[0]:
            edges.insert(0, decade(floor_decade(float(positive[0]))))
        if positive.size and positive[-1] >= edges[-1]:
            edges.append(decade(floor_decade(float(positive[-1])) + 1))
    elif positive.size:
        lo = min(spec.min_decade, floor_decade(float(positive[0])))
        hi = floor_decade(float(positive[-1])) + 1
        edges = [decade(k) for k in range(lo, hi + 1)]
    else:
        edges = []
    if len(edges) >= 2:
        idx = np.searchsorted(positive, edges, side="left")
        for i in range(len(edges) - 1):
            bins.append(Bin(edges[i], edges[i + 1], int(idx[i + 1] - idx[i])))
    return tuple(bins)


def _as_array(risks) -> np.ndarray:
    if isinstance(risks, np.ndarray):
        return risks.astype(float, copy=False)
    return np.array([r.risk if isinstance(r, RecordRisk) else float(r) for r in risks], dtype=float)


def summarize(risks: np.ndarray) -> Summary:
    ordered = np.sort(risks)
    n = len(ordered)
    return Summary(
        min=float(ordered[0]),
        max=float(ordered[-1]),
        mean=math.fsum(ordered.tolist()) / n,
        median=float(ordered[(n - 1) // 2]),
    )


def high_risk_records(risks: np.ndarray, threshold: float) -> tuple[tuple[int, float], ...]:
    """(index, risk) for risk strictly above threshold, riskiest first."""
    idx = np.flatnonzero(risks > threshold)
    order = np.lexsort((idx, -risks[idx]))
    idx = idx[order]
    return tuple(zip(idx.tolist(), risks[idx].tolist()))


NOTES = (
    "known-set count includes the empty set",
    "known sets are kept when their public probability is strictly greater than epsilon",
    "high-risk records have risk strictly greater than the threshold",
    "histogram: zero bin [0, 0], then decade bins [lower, upper)",
    "median is the lower middle value for an even number of records",
)


def build_report(
    risks: Union[Sequence[RecordRisk], np.ndarray],
    config: RiskConfig,
    bin_spec: BinSpec = BinSpec(),
    retained_set_count: int = 0,
) -> RiskReport:
    arr = _as_array(risks)
    if arr.size == 0:
        raise ValueError("no risks to report")
    return RiskReport(
        n_records=int(arr.size),
        retained_set_count=retained_set_count,
        epsilon=config.epsilon,
        alpha=config.alpha,
        high_risk_threshold=config.high_risk_threshold,
        histogram=histogram(arr, bin_spec),
        high_risk=high_risk_records(arr, config.high_risk_threshold),
        summary=summarize(arr),
        notes=NOTES,
    )
