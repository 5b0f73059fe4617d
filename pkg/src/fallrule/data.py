"""Tabular ingestion: CSV loading, discretization into binary predicates, splitting."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _bits
from .exceptions import DataError

MISSING = "?"


@dataclass(frozen=True)
class RawDataset:
    column_names: tuple[str, ...]
    columns: tuple[tuple, ...]
    kinds: tuple[str, ...]  # "numeric" or "categorical" per column
    labels: tuple[int, ...]  # +1 / -1

    def __post_init__(self):
        n = len(self.labels)
        if len(self.columns) != len(self.column_names) or len(self.kinds) != len(self.columns):
            raise DataError("column names, columns and kinds must align")
        for name, col in zip(self.column_names, self.columns):
            if len(col) != n:
                raise DataError(f"column {name!r} has {len(col)} values, expected {n}")
        if any(y not in (1, -1) for y in self.labels):
            raise DataError("labels must be +1 or -1")

    @property
    def n_rows(self) -> int:
        return len(self.labels)

    @property
    def n_pos(self) -> int:
        return sum(1 for y in self.labels if y == 1)

    def column(self, name: str) -> tuple:
        try:
            return self.columns[self.column_names.index(name)]
        except ValueError:
            raise DataError(f"no column named {name!r}") from None


@dataclass(frozen=True)
class Predicate:
    """An atomic row condition derived from one source column.

    Categorical predicates test equality with ``value``. Interval predicates
    test ``low <= x < high``; a missing ``low``/``high`` is unbounded, so the
    bins of one column cover the real line.
    """

    name: str
    source_column: int
    kind: str  # "category" or "interval"
    column_name: str = ""
    value: str | float | None = None
    low: float | None = None
    high: float | None = None

    def evaluate(self, column: Sequence) -> np.ndarray:
        if self.kind == "category":
            if isinstance(self.value, str):
                return np.array([str(v) == self.value for v in column], dtype=bool)
            vals = np.asarray(column, dtype=float)
            return vals == self.value
        vals = np.asarray(column, dtype=float)
        mask = np.ones(len(vals), dtype=bool)
        if self.low is not None:
            mask &= vals >= self.low
        if self.high is not None:
            mask &= vals < self.high
        return mask

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "column": self.column_name,
            "kind": self.kind,
            "value": self.value,
            "low": self.low,
            "high": self.high,
        }

    @classmethod
    def from_dict(cls, d: dict, source_column: int = -1) -> "Predicate":
        return cls(
            name=d["name"],
            source_column=source_column,
            kind=d["kind"],
            column_name=d["column"],
            value=d.get("value"),
            low=d.get("low"),
            high=d.get("high"),
        )


@dataclass(frozen=True, eq=False)
class BinaryDataset:
    """Predicate bit vectors over rows plus the positive-label bit vector.

    Bit vectors are Python ints (bit ``i`` is row ``i``), so conjunctions are
    ``&`` and counts are ``int.bit_count``.
    """

    predicates: tuple[Predicate, ...]
    predicate_bits: tuple[int, ...]
    labels: int
    n: int

    def __post_init__(self):
        if len(self.predicates) != len(self.predicate_bits):
            raise DataError("one bit vector per predicate required")
        names = [p.name for p in self.predicates]
        if len(set(names)) != len(names):
            raise DataError("predicate names must be unique")
        limit = 1 << self.n
        if self.labels >= limit or any(b >= limit for b in self.predicate_bits):
            raise DataError("bit vector longer than the row count")
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(names)})
        object.__setattr__(self, "n_pos", _bits.popcount(self.labels))

    @property
    def n_neg(self) -> int:
        return self.n - self.n_pos

    @property
    def all_rows(self) -> int:
        return _bits.full(self.n)

    @property
    def negatives(self) -> int:
        return self.all_rows & ~self.labels

    @property
    def predicate_names(self) -> list[str]:
        return [p.name for p in self.predicates]

    def index_of(self, name: str) -> int:
        return self._index[name]

    def has_predicate(self, name: str) -> bool:
        return name in self._index

    def bits_of(self, names: Sequence[str]) -> int:
        """Rows satisfying the conjunction of the named predicates."""
        bits = self.all_rows
        for name in names:
            bits &= self.predicate_bits[self._index[name]]
        return bits

    def label_array(self) -> np.ndarray:
        return np.where(_bits.to_bool(self.labels, self.n), 1, -1)

    def matrix(self) -> np.ndarray:
        """Dense ``(n, n_predicates)`` boolean matrix."""
        if not self.predicates:
            return np.zeros((self.n, 0), dtype=bool)
        return np.column_stack([_bits.to_bool(b, self.n) for b in self.predicate_bits])

    def take(self, rows) -> "BinaryDataset":
        rows = np.asarray(rows, dtype=np.intp)
        return BinaryDataset(
            predicates=self.predicates,
            predicate_bits=tuple(_bits.take(b, rows, self.n) for b in self.predicate_bits),
            labels=_bits.take(self.labels, rows, self.n),
            n=len(rows),
        )

    @classmethod
    def from_matrix(cls, X, y, names: Sequence[str] | None = None) -> "BinaryDataset":
        """Build from a 0/1 matrix and +1/-1 (or boolean) labels."""
        X = np.asarray(X)
        y = np.asarray(y)
        if X.ndim != 2:
            raise DataError("X must be two-dimensional")
        if len(y) != X.shape[0]:
            raise DataError("X and y have different row counts")
        if names is None:
            names = [f"x{j}" for j in range(X.shape[1])]
        preds = tuple(
            Predicate(name=str(nm), source_column=j, kind="category", column_name=str(nm), value=1.0)
            for j, nm in enumerate(names)
        )
        return cls(
            predicates=preds,
            predicate_bits=tuple(_bits.from_bool(X[:, j] != 0) for j in range(X.shape[1])),
            labels=_bits.from_bool(y > 0),
            n=X.shape[0],
        )


def _parses_as_number(cell: str) -> bool:
    try:
        return math.isfinite(float(cell))
    except ValueError:
        return False


def load_csv(path, label_column: str, positive_value: str, delimiter: str = ",") -> RawDataset:
    """Read a headed CSV; rows whose label equals ``positive_value`` become +1."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError("empty file") from None
        rows = [r for r in reader if r]
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not in header")
    if not rows:
        raise DataError("no data rows")
    width = len(header)
    for lineno, r in enumerate(rows, start=2):
        if len(r) != width:
            raise DataError(f"ragged row at line {lineno}: {len(r)} fields, expected {width}")

    li = header.index(label_column)
    label_values = sorted({r[li].strip() for r in rows})
    if len(label_values) > 2:
        raise DataError(f"label column has {len(label_values)} distinct values, expected at most 2")
    if positive_value not in label_values and len(label_values) == 2:
        raise DataError(f"positive value {positive_value!r} not among labels {label_values}")

    feature_idx = [j for j in range(width) if j != li]
    kinds = []
    for j in feature_idx:
        cells = [r[j].strip() for r in rows]
        present = [c for c in cells if c != ""]
        kinds.append("numeric" if present and all(_parses_as_number(c) for c in present) else "categorical")

    keep = []
    dropped = 0
    for r in rows:
        if any(kind == "numeric" and r[j].strip() == "" for j, kind in zip(feature_idx, kinds)):
            dropped += 1
        else:
            keep.append(r)
    if dropped:
        warnings.warn(f"dropped {dropped} rows with missing numeric values", stacklevel=2)
    if not keep:
        raise DataError("no data rows")

    columns = []
    for j, kind in zip(feature_idx, kinds):
        if kind == "numeric":
            columns.append(tuple(float(r[j]) for r in keep))
        else:
            columns.append(tuple(r[j].strip() or MISSING for r in keep))
    labels = tuple(1 if r[li].strip() == positive_value else -1 for r in keep)
    return RawDataset(
        column_names=tuple(header[j] for j in feature_idx),
        columns=tuple(columns),
        kinds=tuple(kinds),
        labels=labels,
    )


def _fmt(x: float) -> str:
    return f"{x:g}"


def quantile_cuts(values: np.ndarray, bins: int) -> list[float]:
    """Interior cut points taken from the data, strictly above the minimum.

    Cuts are actual data values (lower quantiles), so every half-open bin
    ``[cut_k, cut_{k+1})`` holds at least the row equal to ``cut_k``.
    """
    qs = np.quantile(values, [k / bins for k in range(1, bins)], method="lower")
    lo = values.min()
    return sorted({float(c) for c in qs if c > lo})


def _is_missing(cell) -> bool:
    if cell is None:
        return True
    if isinstance(cell, str):
        return cell.strip() in ("", MISSING)
    return isinstance(cell, float) and math.isnan(cell)


def infer_kind(cells: Sequence) -> str:
    """``numeric`` when every non-missing cell is, or parses as, a finite number."""
    present = [c for c in cells if not _is_missing(c)]
    if not present:
        return "categorical"
    for c in present:
        if isinstance(c, bool):
            return "categorical"
        if isinstance(c, (int, float, np.integer, np.floating)):
            if not math.isfinite(float(c)):
                return "categorical"
        elif not (isinstance(c, str) and _parses_as_number(c)):
            return "categorical"
    return "numeric"


def to_numeric(cells: Sequence) -> np.ndarray:
    """Float array with NaN for missing cells."""
    return np.array([math.nan if _is_missing(c) else float(c) for c in cells], dtype=float)


def column_predicates(name: str, j: int, column: Sequence, kind: str, bins: int) -> list[Predicate]:
    """Predicates that partition the rows of one source column."""
    if kind == "categorical":
        return [Predicate(f"{name}={v}", j, "category", name, value=v) for v in sorted({str(c) for c in column})]
    vals = np.asarray(column, dtype=float)
    vals = vals[~np.isnan(vals)]
    if not len(vals):
        return []
    distinct = np.unique(vals)
    if len(distinct) <= bins:
        # too few values to bin: one predicate per value (covers zero variance)
        return [Predicate(f"{name}={_fmt(v)}", j, "category", name, value=float(v)) for v in distinct]
    edges = [float(distinct[0])] + quantile_cuts(vals, bins)
    preds = []
    for k, lo in enumerate(edges):
        if k + 1 < len(edges):
            hi = edges[k + 1]
            label = f"{_fmt(lo)} <= {name} < {_fmt(hi)}"
        else:
            hi = None
            label = f"{_fmt(lo)} <= {name} <= {_fmt(distinct[-1])}"
        preds.append(Predicate(label, j, "interval", name, low=None if k == 0 else lo, high=hi))
    return preds


def fit_predicates(raw: RawDataset, bins_per_numeric: int = 4) -> list[Predicate]:
    """Derive the predicate vocabulary (names, categories, cut points) from data."""
    if bins_per_numeric < 2:
        raise ValueError("bins_per_numeric must be at least 2")
    preds: list[Predicate] = []
    for j, (name, col, kind) in enumerate(zip(raw.column_names, raw.columns, raw.kinds)):
        preds.extend(column_predicates(name, j, col, kind, bins_per_numeric))
    return preds


def apply_predicates(raw: RawDataset, predicates: Sequence[Predicate]) -> BinaryDataset:
    """Binarize ``raw`` with a fixed vocabulary, matching source columns by name."""
    bits = []
    resolved = []
    for p in predicates:
        try:
            j = raw.column_names.index(p.column_name)
        except ValueError:
            raise DataError(f"dataset lacks column {p.column_name!r} used by {p.name!r}") from None
        bits.append(_bits.from_bool(p.evaluate(raw.columns[j])))
        resolved.append(p if p.source_column == j else replace(p, source_column=j))
    return BinaryDataset(
        predicates=tuple(resolved),
        predicate_bits=tuple(bits),
        labels=_bits.from_bool(np.asarray(raw.labels) == 1),
        n=raw.n_rows,
    )


def binarize(raw: RawDataset, bins_per_numeric: int = 4) -> BinaryDataset:
    return apply_predicates(raw, fit_predicates(raw, bins_per_numeric))


def split_indices(n: int, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    if n < 2:
        raise DataError("need at least two rows to split")
    n_train = min(max(round(train_fraction * n), 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def split(dataset: BinaryDataset, train_fraction: float, seed: int) -> tuple[BinaryDataset, BinaryDataset]:
    """Seeded disjoint train/test partition with ``round(fraction * n)`` train rows."""
    tr, te = split_indices(dataset.n, train_fraction, seed)
    return dataset.take(tr), dataset.take(te)


def split_raw(raw: RawDataset, train_fraction: float, seed: int) -> tuple[RawDataset, RawDataset]:
    tr, te = split_indices(raw.n_rows, train_fraction, seed)

    def sub(rows):
        return RawDataset(
            column_names=raw.column_names,
            columns=tuple(tuple(col[i] for i in rows) for col in raw.columns),
            kinds=raw.kinds,
            labels=tuple(raw.labels[i] for i in rows),
        )

    return sub(tr), sub(te)
