import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import AGE, GENDER, R2, R4, RACE, SCHEMA, SAMPLE_ROWS
from microrisk.counts import (
    build_all_count_tables,
    build_count_table,
    group_keys,
    per_record_counts,
    project,
)
from microrisk.known_sets import KnownSet, enumerate_known_sets
from microrisk.model import Dataset


def ks(*members, probs=(0.5,) * 5):
    return KnownSet.of(members, probs)


def test_project_examples():
    assert project(SAMPLE_ROWS[R4], ks(AGE, GENDER, RACE)) == ("34", "Male", "Black")
    assert project(SAMPLE_ROWS[R4], ks()) == ()
    assert project(SAMPLE_ROWS[R2], ks(GENDER)) == ("Female",)


def test_count_examples(sample):
    assert build_count_table(sample, ks(AGE, GENDER, RACE)).counts[("34", "Male", "Black")] == 2
    assert build_count_table(sample, ks()).counts == {(): 5}
    everything = build_count_table(sample, ks(0, 1, 2, 3, 4))
    # scanning the five rows by hand: no two are equal
    assert len(set(SAMPLE_ROWS)) == 5
    assert set(everything.counts.values()) == {1}
    assert len(everything.counts) == 5


def test_gender_counts(sample):
    assert build_count_table(sample, ks(GENDER)).counts == {("Male",): 3, ("Female",): 2}


def test_build_all(sample, sample_config):
    sets = enumerate_known_sets(sample_config)
    tables = build_all_count_tables(sample, sets)
    assert len(tables) == 8
    assert [t.known_set for t in tables] == sets
    assert all(sum(t.counts.values()) == 5 for t in tables)
    assert build_all_count_tables(sample, []) == []
    (only,) = build_all_count_tables(sample, [ks()])
    assert only.counts == {(): 5}


def test_parallel_build_matches(sample, sample_config):
    sets = enumerate_known_sets(sample_config, epsilon=0.0)
    a = build_all_count_tables(sample, sets, jobs=1)
    b = build_all_count_tables(sample, sets, jobs=4)
    assert [t.counts for t in a] == [t.counts for t in b]


def test_missing_values_count_together():
    ds = Dataset(["a", "b"], [("x", ""), ("x", None), ("x", "y")])
    table = build_count_table(ds, ks(0, 1))
    assert table.counts == {("x", None): 2, ("x", "y"): 1}


def test_key_overflow_path_matches_dict_count():
    # 8 columns of 300 levels: 300^8 > 2^62 forces re-densification
    rng = np.random.default_rng(0)
    rows = [tuple(str(v) for v in rng.integers(0, 300, 8)) for _ in range(500)]
    rows += rows[:50]
    ds = Dataset([f"c{j}" for j in range(8)], rows)
    full = ks(*range(8), probs=(0.5,) * 8)
    key, bound = group_keys(ds, full)
    assert bound < 1 << 62
    counts = per_record_counts(ds, full)
    expected = [rows.count(r) for r in rows]
    assert counts.tolist() == expected
    assert build_count_table(ds, full).record_counts().tolist() == expected


rows_st = st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("xy"), st.sampled_from("pq")), min_size=1, max_size=40)
mask_st = st.integers(0, 7)


def _set(mask):
    return KnownSet(mask, 1.0)


@settings(max_examples=80, deadline=None)
@given(rows=rows_st, mask=mask_st)
def test_table_invariants(rows, mask):
    ds = Dataset("ABC", rows)
    table = build_count_table(ds, _set(mask))
    assert sum(table.counts.values()) == len(rows)
    assert min(table.counts.values()) >= 1
    for r in rows:
        assert table.counts[project(r, _set(mask))] == sum(1 for s in rows if project(s, _set(mask)) == project(r, _set(mask)))
    assert per_record_counts(ds, _set(mask)).tolist() == table.record_counts().tolist()


@settings(max_examples=80, deadline=None)
@given(rows=rows_st, small=mask_st, extra=mask_st)
def test_refinement(rows, small, extra):
    ds = Dataset("ABC", rows)
    coarse = per_record_counts(ds, _set(small))
    fine = per_record_counts(ds, _set(small | extra))
    assert np.all(fine <= coarse)


@settings(max_examples=50, deadline=None)
@given(rows=rows_st, mask=mask_st, seed=st.integers(0, 1000))
def test_row_order_does_not_matter(rows, mask, seed):
    shuffled = list(rows)
    np.random.default_rng(seed).shuffle(shuffled)
    a = build_count_table(Dataset("ABC", rows), _set(mask)).counts
    b = build_count_table(Dataset("ABC", shuffled), _set(mask)).counts
    assert a == b
