"""Model files: a rule list plus the predicate vocabulary needed to apply it."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .data import BinaryDataset, Predicate, RawDataset, apply_predicates
from .exceptions import DataError
from .rulelist import RuleList, dumps

FORMAT = "fallrule-model/1"


@dataclass(frozen=True)
class Model:
    """A fitted rule list with the cut points and categories it was trained on.

    Test data is binarized with ``predicates`` so train and test agree on
    every predicate name.
    """

    rule_list: RuleList
    predicates: tuple[Predicate, ...]
    params: dict = field(default_factory=dict)
    objective: Fraction | None = None

    def binarize(self, raw: RawDataset) -> BinaryDataset:
        return apply_predicates(raw, self.predicates)

    def to_dict(self) -> dict:
        d = {
            "format": FORMAT,
            "rule_list": self.rule_list.to_dict(),
            "predicates": [p.to_dict() for p in self.predicates],
            "params": dict(self.params),
        }
        if self.objective is not None:
            d["objective"] = float(self.objective)
            d["objective_exact"] = str(self.objective)
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_dict(cls, d: dict) -> "Model":
        if d.get("format") != FORMAT:
            raise DataError(f"not a model file (format {d.get('format')!r})")
        try:
            objective = Fraction(d["objective_exact"]) if "objective_exact" in d else None
            return cls(
                rule_list=RuleList.from_dict(d["rule_list"]),
                predicates=tuple(Predicate.from_dict(p) for p in d["predicates"]),
                params=dict(d.get("params", {})),
                objective=objective,
            )
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed model file: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "Model":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise DataError(f"model file is not JSON: {exc}") from None

    @classmethod
    def load(cls, path) -> "Model":
        path = Path(path)
        if not path.is_file():
            raise DataError(f"no such file: {path}")
        return cls.from_json(path.read_text(encoding="utf-8"))


def used_predicates(rule_list: RuleList, predicates: Sequence[Predicate]) -> tuple[Predicate, ...]:
    names = rule_list.antecedent_names()
    return tuple(p for p in predicates if p.name in names)
