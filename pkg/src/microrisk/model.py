"""Dataset, attribute configuration and validation."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

# Missing cells are stored as None. In CSV input and config JSON they are
# written as the empty string.
MISSING = None

Value = Optional[str]


class ConfigError(ValueError):
    """A value weight could not be resolved for a sensitive attribute."""


class DatasetError(ValueError):
    """The dataset violates a structural invariant."""


def _normalize(value) -> Value:
    if value is None:
        return MISSING
    if isinstance(value, float) and math.isnan(value):
        return MISSING
    token = str(value)
    return MISSING if token == "" else token


class Dataset:
    """Immutable N x m table of categorical tokens.

    Cells are stored column-wise as integer codes into per-column level
    tuples, which keeps a million-row table compact and lets the counting
    code work on numpy arrays directly.
    """

    def __init__(self, schema: Sequence[str], records: Iterable[Sequence]):
        schema = tuple(str(name) for name in schema)
        rows = [tuple(_normalize(v) for v in row) for row in records]
        m = len(schema)
        for i, row in enumerate(rows):
            if len(row) != m:
                raise DatasetError(f"record {i} has {len(row)} cells, expected {m}")
        columns = []
        levels = []
        for j in range(m):
            codes, uniques = factorize([row[j] for row in rows])
            columns.append(codes)
            levels.append(uniques)
        self._init(schema, tuple(columns), tuple(levels))

    @classmethod
    def from_codes(
        cls,
        schema: Sequence[str],
        codes: Sequence[np.ndarray],
        levels: Sequence[Sequence[Value]],
    ) -> "Dataset":
        """Build directly from factorized columns (no per-cell Python work)."""
        obj = cls.__new__(cls)
        columns = []
        for col, lev in zip(codes, levels):
            col = np.ascontiguousarray(col, dtype=np.int64)
            if col.size and (col.min() < 0 or col.max() >= len(lev)):
                raise DatasetError("column codes out of range of their levels")
            columns.append(col)
        obj._init(
            tuple(str(name) for name in schema),
            tuple(columns),
            tuple(tuple(_normalize(v) for v in lev) for lev in levels),
        )
        return obj

    def _init(self, schema, columns, levels):
        if len(schema) < 1:
            raise DatasetError("dataset needs at least one attribute")
        if any(name == "" for name in schema):
            raise DatasetError("attribute names must be non-empty")
        if len(set(schema)) != len(schema):
            dupes = sorted({n for n in schema if schema.count(n) > 1})
            raise DatasetError(f"duplicate attribute names: {', '.join(dupes)}")
        if len(columns) != len(schema):
            raise DatasetError("column count does not match schema")
        n = len(columns[0])
        if n < 1:
            raise DatasetError("empty dataset")
        if any(len(col) != n for col in columns):
            raise DatasetError("columns have different lengths")
        for col in columns:
            col.setflags(write=False)
        self._schema = schema
        self._codes = columns
        self._levels = levels

    @property
    def schema(self) -> tuple[str, ...]:
        return self._schema

    @property
    def codes(self) -> tuple[np.ndarray, ...]:
        """Read-only integer code array per attribute."""
        return self._codes

    @property
    def levels(self) -> tuple[tuple[Value, ...], ...]:
        """Distinct values per attribute, indexed by code."""
        return self._levels

    @property
    def n_records(self) -> int:
        return len(self._codes[0])

    @property
    def n_attributes(self) -> int:
        return len(self._schema)

    def __len__(self) -> int:
        return self.n_records

    def record(self, index: int) -> tuple[Value, ...]:
        return tuple(lev[col[index]] for col, lev in zip(self._codes, self._levels))

    def __iter__(self) -> Iterator[tuple[Value, ...]]:
        for i in range(self.n_records):
            yield self.record(i)

    @cached_property
    def records(self) -> tuple[tuple[Value, ...], ...]:
        return tuple(self)

    def distinct_values(self, attribute: int | str) -> tuple[Value, ...]:
        j = attribute if isinstance(attribute, int) else self._schema.index(attribute)
        return self._levels[j]

    def __repr__(self) -> str:
        return f"Dataset(n_records={self.n_records}, schema={list(self._schema)!r})"


def factorize(values: Sequence[Value]) -> tuple[np.ndarray, tuple[Value, ...]]:
    """Integer-code a column; levels are ordered by first appearance."""
    arr = np.array(["" if v is None else v for v in values], dtype=object)
    codes, uniques = pd.factorize(arr, sort=False)
    return codes.astype(np.int64), tuple(_normalize(u) for u in uniques)


_NUMBER = re.compile(r"^\s*([-+]?(?:\d[\d,]*)?(?:\.\d+)?(?:[eE][-+]?\d+)?)\s*([kKmMbB]?)\s*$")
_SUFFIX = {"": 1.0, "k": 1e3, "m": 1e6, "b": 1e9}


def parse_number(token: Value) -> Optional[float]:
    """Parse '50000', '50K', '1,200' or '2.5M'; None when not numeric."""
    if token is None:
        return None
    match = _NUMBER.match(token)
    if not match or not any(ch.isdigit() for ch in match.group(1)):
        return None
    try:
        number = float(match.group(1).replace(",", ""))
    except ValueError:
        return None
    return number * _SUFFIX[match.group(2).lower()]


@dataclass(frozen=True)
class WeightRange:
    """Half-open numeric interval [lower, upper) carrying a weight."""

    lower: float = -math.inf
    upper: float = math.inf
    weight: float = 0.0

    def __contains__(self, x: float) -> bool:
        return self.lower <= x < self.upper


@dataclass(frozen=True)
class ValueWeightMap:
    exact: Mapping[Value, float] = field(default_factory=dict)
    ranges: tuple[WeightRange, ...] = ()
    default_weight: Optional[float] = None

    def lookup(self, value: Value) -> Optional[float]:
        """Weight for ``value`` by exact match, then range, then default."""
        if value in self.exact:
            return self.exact[value]
        if self.ranges:
            x = parse_number(value)
            if x is not None:
                for r in self.ranges:
                    if x in r:
                        return r.weight
        return self.default_weight


@dataclass(frozen=True)
class AttributeConfig:
    name: str
    public_prob: float
    attr_weight: float = 0.0
    value_weights: ValueWeightMap = field(default_factory=ValueWeightMap)

    @property
    def sensitive(self) -> bool:
        return self.attr_weight > 0


@dataclass(frozen=True)
class RiskConfig:
    attributes: tuple[AttributeConfig, ...]
    alpha: float
    epsilon: float = 0.0
    high_risk_threshold: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(a.public_prob for a in self.attributes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def replace(self, **changes) -> "RiskConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class Violation:
    rule: str
    attribute: Optional[str] = None
    token: Optional[str] = None

    def __str__(self) -> str:
        where = f"{self.attribute}: " if self.attribute is not None else ""
        what = f" (value {self.token!r})" if self.token is not None else ""
        return f"{where}{self.rule}{what}"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "ok" if self.ok else "\n".join(str(v) for v in self.violations)


def _unit(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and 0.0 <= x <= 1.0


def validate_attribute(attr: AttributeConfig) -> list[Violation]:
    """Checks that need no dataset."""
    out = []
    name = attr.name
    if not _unit(attr.public_prob):
        out.append(Violation("public_prob must be in [0, 1]", name))
    if not _unit(attr.attr_weight):
        out.append(Violation("attr_weight must be in [0, 1]", name))
    vw = attr.value_weights
    for token, w in vw.exact.items():
        if not _unit(w):
            out.append(Violation("value weight must be in [0, 1]", name, token))
    if vw.default_weight is not None and not _unit(vw.default_weight):
        out.append(Violation("default weight must be in [0, 1]", name))
    for r in vw.ranges:
        if not _unit(r.weight):
            out.append(Violation("range weight must be in [0, 1]", name))
        if not r.lower <= r.upper:
            out.append(Violation(f"range lower bound {r.lower} exceeds upper bound {r.upper}", name))
    ordered = sorted(vw.ranges, key=lambda r: (r.lower, r.upper))
    for a, b in zip(ordered, ordered[1:]):
        if b.lower < a.upper and a.lower < a.upper and b.lower < b.upper:
            out.append(Violation(f"ranges [{a.lower}, {a.upper}) and [{b.lower}, {b.upper}) overlap", name))
    return out


def validate_settings(config: RiskConfig) -> list[Violation]:
    """Checks on the configuration alone (usable without a dataset)."""
    out = []
    alpha = config.alpha
    if not isinstance(alpha, (int, float)) or isinstance(alpha, bool) or not alpha > 1 or math.isinf(alpha):
        out.append(Violation("alpha must exceed 1"))
    if not _unit(config.epsilon):
        out.append(Violation("epsilon must be in [0, 1]"))
    t = config.high_risk_threshold
    if not isinstance(t, (int, float)) or isinstance(t, bool) or not t >= 0 or math.isinf(t):
        out.append(Violation("high_risk_threshold must be a finite number >= 0"))
    names = [a.name for a in config.attributes]
    if not names:
        out.append(Violation("at least one attribute must be configured"))
    for name in sorted({n for n in names if names.count(n) > 1}):
        out.append(Violation("attribute configured more than once", name))
    for attr in config.attributes:
        out.extend(validate_attribute(attr))
    return out


def validate_config(dataset: Dataset, config: RiskConfig) -> ValidationResult:
    """Collect every violation of the config against ``dataset``.

    Nothing is raised; an empty result means the pair is usable.
    """
    out = validate_settings(config)
    names = list(config.names)
    schema = list(dataset.schema)
    for name in schema:
        if name not in names:
            out.append(Violation("attribute present in data but missing from config", name))
    for name in names:
        if name not in schema:
            out.append(Violation("configured attribute not present in data", name))
    if set(names) == set(schema) and len(names) == len(schema) and names != schema:
        out.append(Violation("config attribute order must match the data header"))
    if not out:
        for attr, values in zip(config.attributes, dataset.levels):
            if not attr.sensitive:
                continue
            for value in values:
                if attr.value_weights.lookup(value) is None:
                    shown = "" if value is None else value
                    out.append(Violation("no value weight resolves", attr.name, shown))
    return ValidationResult(tuple(out))


def resolve_value_weight(attr: AttributeConfig, value: Value) -> float:
    """Sensitivity weight of one cell value; 0 for non-sensitive attributes."""
    if not attr.sensitive:
        return 0.0
    weight = attr.value_weights.lookup(_normalize(value))
    if weight is None:
        raise ConfigError(f"{attr.name}: no value weight resolves for {value!r}")
    return float(weight)


def sensitivity_levels(attr: AttributeConfig, levels: Sequence[Value]) -> np.ndarray:
    """attr_weight * value weight for every level of one column."""
    if not attr.sensitive:
        return np.zeros(len(levels))
    return np.array([attr.attr_weight * resolve_value_weight(attr, v) for v in levels], dtype=float)
