"""Mining the candidate antecedents: conjunctions of at most two predicates."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

from .data import BinaryDataset
from .exceptions import DataError, DegenerateLabels


@dataclass(frozen=True)
class Antecedent:
    predicate_ids: tuple[int, ...]
    names: tuple[str, ...]
    bits: int
    support_pos: int
    support_neg: int

    @property
    def label(self) -> str:
        return " AND ".join(self.names)

    @classmethod
    def from_predicates(cls, dataset: BinaryDataset, ids: Sequence[int]) -> "Antecedent":
        ids = tuple(sorted(ids))
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate predicate in conjunction")
        bits = dataset.all_rows
        for i in ids:
            bits &= dataset.predicate_bits[i]
        pos = (bits & dataset.labels).bit_count()
        return cls(ids, tuple(dataset.predicates[i].name for i in ids), bits, pos, bits.bit_count() - pos)

    @classmethod
    def from_bits(cls, bits: int, labels: int, name: str = "") -> "Antecedent":
        """An antecedent given directly by its satisfying rows (no predicates)."""
        pos = (bits & labels).bit_count()
        return cls((), (name,) if name else (), bits, pos, bits.bit_count() - pos)


class AntecedentSet(Sequence[Antecedent]):
    """Immutable, ordered collection of antecedents; indices are antecedent ids."""

    def __init__(self, antecedents: Sequence[Antecedent]):
        self._items = tuple(antecedents)
        keys = [a.predicate_ids for a in self._items if a.predicate_ids]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate antecedent")

    def __getitem__(self, i):
        return self._items[i]

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[Antecedent]:
        return iter(self._items)

    @property
    def m(self) -> int:
        return len(self._items)

    def to_json(self) -> str:
        rows = [
            {"predicates": list(a.names), "support_pos": a.support_pos, "support_neg": a.support_neg}
            for a in self._items
        ]
        return json.dumps(rows, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, dataset: BinaryDataset) -> "AntecedentSet":
        """Rebuild against ``dataset``; cached supports are recomputed from it."""
        out = []
        for row in json.loads(text):
            missing = [p for p in row["predicates"] if not dataset.has_predicate(p)]
            if missing:
                raise DataError(f"unknown predicates {missing}")
            out.append(Antecedent.from_predicates(dataset, [dataset.index_of(p) for p in row["predicates"]]))
        return cls(out)


def _meets(count: int, total: int, threshold: Fraction) -> bool:
    # count >= threshold * total, in integers
    return count * threshold.denominator >= threshold.numerator * total


def mine(
    dataset: BinaryDataset,
    max_predicates: int = 2,
    min_class_support: float | Fraction = Fraction(1, 10),
) -> AntecedentSet:
    """All conjunctions of up to ``max_predicates`` predicates from different
    source columns whose support within the positive rows or within the
    negative rows reaches ``min_class_support`` (inclusive).
    """
    if max_predicates not in (1, 2):
        raise ValueError("max_predicates must be 1 or 2")
    threshold = Fraction(str(min_class_support)) if isinstance(min_class_support, float) else Fraction(min_class_support)
    if not 0 < threshold <= 1:
        raise ValueError("min_class_support must be in (0, 1]")
    n_pos, n_neg = dataset.n_pos, dataset.n_neg
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels("both classes must be present to mine antecedents")

    labels = dataset.labels
    preds = dataset.predicates
    bits = dataset.predicate_bits

    def keep(b: int) -> tuple[int, int] | None:
        pos = (b & labels).bit_count()
        neg = b.bit_count() - pos
        if pos + neg == 0:
            return None
        if _meets(pos, n_pos, threshold) or _meets(neg, n_neg, threshold):
            return pos, neg
        return None

    found = []
    m = len(preds)
    for i in range(m):
        c = keep(bits[i])
        if c is not None:
            found.append(Antecedent((i,), (preds[i].name,), bits[i], *c))
    if max_predicates == 2:
        for i, j in combinations(range(m), 2):
            if preds[i].source_column == preds[j].source_column:
                continue
            b = bits[i] & bits[j]
            c = keep(b)
            if c is not None:
                found.append(Antecedent((i, j), (preds[i].name, preds[j].name), b, *c))
    found.sort(key=lambda a: a.predicate_ids)
    return AntecedentSet(found)


def coverage_counts(antecedent: Antecedent, alive: int, positives: int) -> tuple[int, int]:
    """Positive and negative rows of ``alive`` that satisfy ``antecedent``."""
    hit = antecedent.bits & alive
    pos = (hit & positives).bit_count()
    return pos, hit.bit_count() - pos
