"""Record-level disclosure risk for microdata.

Scores every record by combining how identifiable it is under each
plausible adversary knowledge set with how sensitive the remaining,
unknown attributes are.
"""
__version__ = "0.1.0"

from .counts import CountTable, build_all_count_tables, build_count_table, project
from .known_sets import KnownSet, brute_force_known_sets, enumerate_known_sets, known_set_probability
from .model import (
    MISSING,
    AttributeConfig,
    ConfigError,
    Dataset,
    DatasetError,
    RiskConfig,
    ValidationResult,
    ValueWeightMap,
    Violation,
    WeightRange,
    resolve_value_weight,
    validate_config,
)
from .report import BinSpec, RiskReport, build_report
from .risk import RecordRisk, assess_dataset, consequence, likelihood, record_risk, score_dataset

__all__ = [
    "MISSING", "AttributeConfig", "ConfigError", "CountTable", "Dataset", "DatasetError",
    "KnownSet", "RecordRisk", "RiskConfig", "RiskReport", "BinSpec", "ValidationResult",
    "ValueWeightMap", "Violation", "WeightRange", "assess_dataset", "brute_force_known_sets",
    "build_all_count_tables", "build_count_table", "build_report", "consequence",
    "enumerate_known_sets", "known_set_probability", "likelihood", "project", "record_risk",
    "resolve_value_weight", "score_dataset", "validate_config",
]
