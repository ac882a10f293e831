"""CSV and JSON formats: dataset input, config files, report output."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np
import pandas as pd

from . import __version__
from .known_sets import KnownSet
from .model import (
    AttributeConfig,
    Dataset,
    DatasetError,
    RiskConfig,
    ValueWeightMap,
    Violation,
    WeightRange,
)
from .report import Bin, RiskReport

CONFIG_KEYS = {"alpha", "epsilon", "high_risk_threshold", "attributes"}
ATTRIBUTE_KEYS = {"name", "public_prob", "attr_weight", "values"}
VALUE_KEYS = {"exact", "ranges", "default"}
RANGE_KEYS = {"min", "max", "weight"}


class ConfigFileError(ValueError):
    def __init__(self, violations: Iterable[Violation]):
        self.violations = tuple(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def load_dataset(path: str | Path) -> Dataset:
    """Read a UTF-8 CSV with a header row; empty cells become missing."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DatasetError(f"{path}: empty file")
        m = len(header)
        if len(set(header)) != m or "" in header:
            raise DatasetError(f"{path}: header names must be unique and non-empty")
        n = 0
        for row in reader:
            if not row and m > 1:
                continue
            if len(row) != m and not (m == 1 and not row):
                raise DatasetError(
                    f"{path}: row {reader.line_num} has {len(row)} cells, header has {m}"
                )
            n += 1
    if n == 0:
        raise DatasetError(f"{path}: empty dataset (header only)")
    frame = pd.read_csv(
        path,
        dtype=str,
        keep_default_na=False,
        na_filter=False,
        encoding="utf-8-sig",
        skip_blank_lines=m > 1,
        header=0,
        names=header,
    )
    codes, levels = [], []
    for name in frame.columns:
        c, u = pd.factorize(frame[name].to_numpy(dtype=object), sort=False)
        codes.append(c.astype(np.int64))
        levels.append(list(u))
    return Dataset.from_codes(header, codes, levels)


def _number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def parse_config(doc: Any) -> RiskConfig:
    """Turn a config document into a RiskConfig; shape errors raise ConfigFileError.

    Range checks (alpha > 1, weights in [0, 1], ...) are left to
    :func:`validate_config` so that all of them are reported together.
    """
    errs: list[Violation] = []
    if not isinstance(doc, dict):
        raise ConfigFileError([Violation("config must be a JSON object")])
    for key in sorted(set(doc) - CONFIG_KEYS):
        errs.append(Violation(f"unknown top-level key {key!r}"))
    for key in ("alpha", "epsilon", "attributes"):
        if key not in doc:
            errs.append(Violation(f"missing required key {key!r}"))
    for key in ("alpha", "epsilon", "high_risk_threshold"):
        if key in doc and not _number(doc[key]):
            errs.append(Violation(f"{key} must be a number"))
    attrs = doc.get("attributes", [])
    if not isinstance(attrs, list):
        errs.append(Violation("attributes must be a list"))
        attrs = []
    parsed = []
    for pos, item in enumerate(attrs):
        attr, problems = _parse_attribute(item, pos)
        errs.extend(problems)
        if attr is not None:
            parsed.append(attr)
    if errs:
        raise ConfigFileError(errs)
    return RiskConfig(
        attributes=tuple(parsed),
        alpha=doc["alpha"],
        epsilon=doc["epsilon"],
        high_risk_threshold=doc.get("high_risk_threshold", 0.01),
    )


def _parse_attribute(item, pos):
    errs = []
    if not isinstance(item, dict):
        return None, [Violation(f"attributes[{pos}] must be an object")]
    name = item.get("name")
    label = name if isinstance(name, str) and name else f"attributes[{pos}]"
    if not isinstance(name, str) or not name:
        errs.append(Violation("name must be a non-empty string", label))
    for key in sorted(set(item) - ATTRIBUTE_KEYS):
        errs.append(Violation(f"unknown key {key!r}", label))
    if not _number(item.get("public_prob")):
        errs.append(Violation("public_prob must be a number", label))
    if "attr_weight" in item and not _number(item["attr_weight"]):
        errs.append(Violation("attr_weight must be a number", label))
    values = item.get("values", {})
    if not isinstance(values, dict):
        return None, errs + [Violation("values must be an object", label)]
    for key in sorted(set(values) - VALUE_KEYS):
        errs.append(Violation(f"unknown values key {key!r}", label))
    exact = values.get("exact", {})
    if not isinstance(exact, dict) or not all(_number(w) for w in exact.values()):
        errs.append(Violation("values.exact must map tokens to numbers", label))
        exact = {}
    ranges = []
    raw_ranges = values.get("ranges", [])
    if not isinstance(raw_ranges, list):
        errs.append(Violation("values.ranges must be a list", label))
        raw_ranges = []
    for r in raw_ranges:
        if (
            not isinstance(r, dict)
            or set(r) - RANGE_KEYS
            or not _number(r.get("weight"))
            or any(k in r and not _number(r[k]) for k in ("min", "max"))
        ):
            errs.append(Violation("each range needs numeric weight and optional numeric min/max", label))
            continue
        ranges.append(WeightRange(float(r.get("min", -math.inf)), float(r.get("max", math.inf)), r["weight"]))
    default = values.get("default")
    if default is not None and not _number(default):
        errs.append(Violation("values.default must be a number", label))
    if errs:
        return None, errs
    vw = ValueWeightMap(
        exact={(None if k == "" else k): w for k, w in exact.items()},
        ranges=tuple(ranges),
        default_weight=default,
    )
    return AttributeConfig(name, item["public_prob"], item.get("attr_weight", 0.0), vw), errs


def load_config(path: str | Path) -> RiskConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigFileError([Violation(f"invalid JSON: {exc}")]) from None
    return parse_config(doc)


def config_to_dict(config: RiskConfig) -> dict:
    """Inverse of :func:`parse_config`."""
    attrs = []
    for a in config.attributes:
        vw = a.value_weights
        values: dict = {}
        if vw.exact:
            values["exact"] = {("" if k is None else k): w for k, w in vw.exact.items()}
        if vw.ranges:
            values["ranges"] = []
            for r in vw.ranges:
                entry = {}
                if r.lower != -math.inf:
                    entry["min"] = r.lower
                if r.upper != math.inf:
                    entry["max"] = r.upper
                entry["weight"] = r.weight
                values["ranges"].append(entry)
        if vw.default_weight is not None:
            values["default"] = vw.default_weight
        attrs.append({"name": a.name, "public_prob": a.public_prob, "attr_weight": a.attr_weight, "values": values})
    return {
        "alpha": config.alpha,
        "epsilon": config.epsilon,
        "high_risk_threshold": config.high_risk_threshold,
        "attributes": attrs,
    }


# -- report JSON ---------------------------------------------------------


def fmt_float(x: float) -> str:
    """17 significant digits: round-trips and is platform independent."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return "%.17g" % x


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with insertion key order and fixed float formatting."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str, bool)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def report_to_dict(report: RiskReport, schema=None, known_sets: list[KnownSet] | None = None) -> dict:
    s = report.summary
    doc = {
        "metadata": {
            "tool": "microrisk",
            "version": __version__,
            "epsilon": float(report.epsilon),
            "alpha": float(report.alpha),
            "high_risk_threshold": float(report.high_risk_threshold),
            "retained_set_count": report.retained_set_count,
            "notes": list(report.notes),
        },
        "n_records": report.n_records,
        "retained_set_count": report.retained_set_count,
        "epsilon": float(report.epsilon),
        "alpha": float(report.alpha),
        "high_risk_threshold": float(report.high_risk_threshold),
        "summary": {"min": s.min, "max": s.max, "mean": s.mean, "median": s.median},
        "high_risk_count": report.high_risk_count,
        "high_risk_percent": report.high_risk_percent,
        "histogram": [{"bin_lower": b.lower, "bin_upper": b.upper, "count": b.count} for b in report.histogram],
        "high_risk": [{"record_index": i, "risk": r} for i, r in report.high_risk],
    }
    if known_sets is not None and schema is not None:
        doc["known_sets"] = [
            {"attributes": list(ks.names(schema)), "pk": ks.pk} for ks in known_sets
        ]
    return doc


def write_report(path: str | Path, report: RiskReport, schema=None, known_sets=None) -> None:
    text = dumps(report_to_dict(report, schema, known_sets)) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_histogram(path: str | Path) -> list[Bin]:
    """Histogram bins from a report JSON; ValueError if malformed."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        rows = doc["histogram"]
        return [Bin(float(b["bin_lower"]), float(b["bin_upper"]), int(b["count"])) for b in rows]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: not a risk report ({exc})") from None


def write_scores(path: str | Path, risks: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("record_index,risk\n")
        fh.writelines(f"{i},{fmt_float(r)}\n" for i, r in enumerate(risks.tolist()))
