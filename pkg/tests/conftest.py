from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

from microrisk.io import load_config, load_dataset
from microrisk.model import AttributeConfig, Dataset, RiskConfig, ValueWeightMap

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))

SAMPLE_ROWS = [
    ("34", "Male", "Black", "60K", "Flu"),
    ("19", "Female", "White", "36K", "Flu"),
    ("40", "Male", "Asian-Pac-Islander", "45K", "Flu"),
    ("34", "Male", "Black", "50K", "Cancer"),
    ("51", "Female", "Black", "65K", "Flu"),
]
SCHEMA = ("Age", "Gender", "Race", "Income", "Disease")
AGE, GENDER, RACE, INCOME, DISEASE = range(5)
R2, R4 = 1, 3


@pytest.fixture
def sample() -> Dataset:
    return load_dataset(DATA / "sample.csv")


@pytest.fixture
def sample_config() -> RiskConfig:
    return load_config(DATA / "sample_config.json")


@pytest.fixture
def sample_csv() -> Path:
    return DATA / "sample.csv"


@pytest.fixture
def sample_json() -> Path:
    return DATA / "sample_config.json"


def random_instance(rng: np.random.Generator, n_max: int = 200, m_max: int = 8, alpha=None):
    """Random categorical dataset with a config that validates against it.

    Values are drawn from small alphabets so equivalence classes of size > 1
    are common. Returns (dataset, config, rows, probs, sensitivities) where
    ``sensitivities[r][j]`` is the attribute weight times value weight.
    """
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    cards = rng.integers(1, 5, size=m)
    rows = [tuple(f"v{int(rng.integers(0, cards[j]))}" for j in range(m)) for _ in range(n)]
    attrs = []
    for j in range(m):
        prob = float(rng.choice([rng.uniform(0, 1), rng.uniform(0, 0.05), 1.0, 0.0], p=[0.7, 0.2, 0.05, 0.05]))
        weight = float(rng.choice([0.0, rng.uniform(0, 1), 1.0], p=[0.3, 0.6, 0.1]))
        exact = {f"v{k}": float(rng.uniform(0, 1)) for k in range(int(cards[j]))}
        attrs.append(AttributeConfig(f"a{j}", prob, weight, ValueWeightMap(exact=exact)))
    cfg = RiskConfig(tuple(attrs), alpha=float(alpha if alpha is not None else rng.uniform(1.01, 200)), epsilon=0.0)
    ds = Dataset([f"a{j}" for j in range(m)], rows)
    probs = [a.public_prob for a in attrs]
    sens = [[a.attr_weight * a.value_weights.exact[row[j]] for j, a in enumerate(attrs)] for row in rows]
    return ds, cfg, rows, probs, sens


# -- acceptance summary --------------------------------------------------

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0].lstrip("AC"))):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
