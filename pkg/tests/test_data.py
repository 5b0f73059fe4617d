import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fallrule import _bits
from fallrule.data import (
    BinaryDataset,
    RawDataset,
    apply_predicates,
    binarize,
    fit_predicates,
    load_csv,
    quantile_cuts,
    split,
    split_indices,
    split_raw,
)
from fallrule.exceptions import DataError


def write_csv(path, header, rows, sep=","):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=sep)
        w.writerow(header)
        w.writerows(rows)
    return path


@pytest.fixture
def toy_csv(tmp_path):
    rows = [[20 + i, "yes" if i % 2 else "no", "yes" if i < 14 else "no"] for i in range(19)]
    return write_csv(tmp_path / "toy.csv", ["age", "housing", "y"], rows)


def test_toy_csv_counts(toy_csv):
    raw = load_csv(toy_csv, "y", "yes")
    assert raw.n_rows == 19
    assert raw.n_pos == 14
    assert raw.kinds == ("numeric", "categorical")


def test_header_only_is_an_error(tmp_path):
    path = write_csv(tmp_path / "h.csv", ["a", "y"], [])
    with pytest.raises(DataError, match="no data rows"):
        load_csv(path, "y", "1")


@pytest.mark.parametrize(
    "header,rows,match",
    [
        (["a", "b"], [[1, 2]], "label column"),
        (["a", "y"], [[1, "p"], [2]], "ragged"),
        (["a", "y"], [[1, "p"], [2, "q"], [3, "r"]], "distinct values"),
        (["a", "y"], [[1, "p"], [2, "q"]], "positive value"),
    ],
)
def test_malformed_csv(tmp_path, header, rows, match):
    path = write_csv(tmp_path / "bad.csv", header, rows)
    with pytest.raises(DataError, match=match):
        load_csv(path, "y", "yes")


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="no such file"):
        load_csv(tmp_path / "nope.csv", "y", "yes")


def test_missing_numeric_rows_are_dropped(tmp_path):
    path = write_csv(tmp_path / "m.csv", ["a", "c", "y"], [[1, "", "yes"], ["", "u", "no"], [3, "v", "no"]])
    with pytest.warns(UserWarning, match="dropped 1"):
        raw = load_csv(path, "y", "yes")
    assert raw.n_rows == 2
    assert raw.column("c") == ("?", "v")


def test_semicolon_delimiter(tmp_path):
    path = write_csv(tmp_path / "s.csv", ["a", "y"], [[1, "yes"], [2, "no"]], sep=";")
    assert load_csv(path, "y", "yes", delimiter=";").n_pos == 1


def test_categorical_predicates_are_complements():
    raw = RawDataset(("housing",), (("yes", "no", "no", "yes", "no"),), ("categorical",), (1, -1, 1, -1, -1))
    ds = binarize(raw)
    assert ds.predicate_names == ["housing=no", "housing=yes"]
    yes, no = ds.predicate_bits[1], ds.predicate_bits[0]
    assert yes & no == 0
    assert yes | no == ds.all_rows


def test_interval_predicate_names_and_membership():
    ages = tuple(float(a) for a in [17, 22, 25, 30, 33, 35, 41, 55, 58, 60, 67, 80])
    raw = RawDataset(("age",), (ages,), ("numeric",), tuple([1, -1] * 6))
    ds = binarize(raw, bins_per_numeric=3)
    assert ds.predicate_names == ["17 <= age < 30", "30 <= age < 55", "55 <= age <= 80"]
    first = _bits.to_bool(ds.predicate_bits[0], ds.n)
    assert first[ages.index(25.0)]
    assert not first[ages.index(30.0)]


def test_few_distinct_values_become_categories():
    raw = RawDataset(("k",), ((1.0, 2.0, 1.0, 2.0),), ("numeric",), (1, -1, 1, -1))
    assert binarize(raw).predicate_names == ["k=1", "k=2"]


def test_constant_column_gives_one_predicate():
    raw = RawDataset(("k",), ((5.0,) * 4,), ("numeric",), (1, -1, 1, -1))
    ds = binarize(raw)
    assert ds.predicate_names == ["k=5"]
    assert ds.predicate_bits[0] == ds.all_rows


def test_quantile_cuts_are_data_values_above_min():
    v = np.array([1, 1, 1, 1, 2, 3, 4, 5], dtype=float)
    cuts = quantile_cuts(v, 4)
    assert all(c > 1 for c in cuts)
    assert set(cuts) <= set(v)


column_values = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=60)


@settings(max_examples=60, deadline=None)
@given(column_values, st.integers(2, 8))
def test_numeric_bins_partition_rows(values, bins):
    labels = tuple(1 if i % 2 else -1 for i in range(len(values)))
    raw = RawDataset(("x",), (tuple(values),), ("numeric",), labels)
    ds = binarize(raw, bins)
    total = sum(_bits.to_bool(b, ds.n).astype(int) for b in ds.predicate_bits)
    assert (total == 1).all()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["a", "b", "c", "?"]), min_size=1, max_size=40), column_values)
def test_every_source_column_is_partitioned(cats, nums):
    n = min(len(cats), len(nums))
    raw = RawDataset(
        ("c", "x"),
        (tuple(cats[:n]), tuple(nums[:n])),
        ("categorical", "numeric"),
        tuple(1 if i % 3 else -1 for i in range(n)),
    )
    ds = binarize(raw)
    for j in range(2):
        bits = [b for p, b in zip(ds.predicates, ds.predicate_bits) if p.source_column == j]
        union = 0
        for b in bits:
            assert union & b == 0
            union |= b
        assert union == ds.all_rows


def test_binarize_is_deterministic(toy_csv):
    raw = load_csv(toy_csv, "y", "yes")
    a, b = binarize(raw), binarize(raw)
    assert a.predicate_bits == b.predicate_bits
    assert a.predicate_names == b.predicate_names
    assert a.labels == b.labels


def test_test_rows_use_training_cut_points(toy_csv):
    raw = load_csv(toy_csv, "y", "yes")
    train, test = split_raw(raw, 0.6, seed=3)
    preds = fit_predicates(train)
    ds = apply_predicates(test, preds)
    assert ds.predicate_names == [p.name for p in preds]


def test_apply_predicates_needs_the_columns(toy_csv):
    raw = load_csv(toy_csv, "y", "yes")
    preds = fit_predicates(raw)
    other = RawDataset(("zzz",), ((1.0,),), ("numeric",), (1,))
    with pytest.raises(DataError, match="lacks column"):
        apply_predicates(other, preds)


def test_split_cardinality_and_determinism():
    ds = BinaryDataset.from_matrix(np.eye(10, dtype=int), [1, -1] * 5)
    tr, te = split(ds, 0.8, seed=7)
    assert (tr.n, te.n) == (8, 2)
    a = split_indices(10, 0.8, 7)
    b = split_indices(10, 0.8, 7)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert set(a[0]).isdisjoint(a[1])
    assert set(a[0]) | set(a[1]) == set(range(10))


def test_split_size_on_bank_scale():
    tr, te = split_indices(45211, 0.8, 0)
    assert len(tr) == round(0.8 * 45211) == 36169
    assert len(te) == 45211 - 36169


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 300), st.floats(0.05, 0.95), st.integers(0, 2**31))
def test_split_is_a_partition(n, frac, seed):
    tr, te = split_indices(n, frac, seed)
    assert len(tr) + len(te) == n
    assert len(set(tr) | set(te)) == n
    assert len(tr) >= 1 and len(te) >= 1


def test_from_matrix_default_names():
    ds = BinaryDataset.from_matrix([[1, 0], [0, 1], [1, 1]], [1, -1, 1])
    assert ds.predicate_names == ["x0", "x1"]
    assert ds.n_pos == 2
    assert ds.bits_of(["x0", "x1"]) == 0b100
