"""Cost-sensitive evaluation, ROC sweeps over the class weight, and text rendering."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .data import BinaryDataset
from .exceptions import SchemaMismatch
from .mining import Antecedent
from .rulelist import SOFT, RuleList, as_fraction, capture_counts, predict, threshold
from .search import SearchConfig, run_frl, run_soft_frl


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    tn: int
    fn: int
    w: Fraction
    tau: Fraction

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def tpr(self) -> float:
        """True positive rate; NaN when there are no positives."""
        pos = self.tp + self.fn
        return self.tp / pos if pos else float("nan")

    @property
    def fpr(self) -> float:
        neg = self.fp + self.tn
        return self.fp / neg if neg else float("nan")

    @property
    def weighted_loss(self) -> Fraction:
        return (self.w * self.fn + self.fp) / self.n if self.n else Fraction(0)

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "weighted_loss": float(self.weighted_loss),
            "w": float(self.w),
            "tau": float(self.tau),
        }


def evaluate(rule_list: RuleList, dataset: BinaryDataset, w) -> EvalReport:
    """Confusion counts of the list at the cost-optimal threshold 1/(1+w)."""
    missing = sorted(p for p in rule_list.antecedent_names() if not dataset.has_predicate(p))
    if missing:
        raise SchemaMismatch(f"dataset lacks predicates used by the model: {missing}")
    w = as_fraction(w)
    tau = threshold(w)
    pred = predict(rule_list, dataset, tau) == 1
    truth = dataset.label_array() == 1
    return EvalReport(
        tp=int(np.sum(pred & truth)),
        fp=int(np.sum(pred & ~truth)),
        tn=int(np.sum(~pred & ~truth)),
        fn=int(np.sum(~pred & truth)),
        w=w,
        tau=tau,
    )


ROC_FIELDS = ("algorithm", "w", "tpr", "fpr", "weighted_loss", "size")


def roc_sweep(
    train: BinaryDataset,
    test: BinaryDataset,
    w_values: Sequence,
    base_config: SearchConfig,
    antecedents: Sequence[Antecedent],
    algorithms: Sequence[str] = ("frl", "softfrl"),
) -> list[dict]:
    """Train each algorithm at every w and evaluate on ``test``; rows sorted by w."""
    if not w_values:
        raise ValueError("w_values must be nonempty")
    runners = {"frl": run_frl, "softfrl": run_soft_frl}
    unknown = set(algorithms) - set(runners)
    if unknown:
        raise ValueError(f"unknown algorithms: {sorted(unknown)}")
    rows = []
    for w in sorted(w_values, key=as_fraction):
        config = replace(base_config, w=w)
        for name in algorithms:
            result = runners[name](train, antecedents, config)
            report = evaluate(result.rule_list, test, w)
            rows.append(
                {
                    "algorithm": name,
                    "w": float(as_fraction(w)),
                    "tpr": report.tpr,
                    "fpr": report.fpr,
                    "weighted_loss": float(report.weighted_loss),
                    "size": result.rule_list.size,
                }
            )
    return rows


def write_csv(rows: Sequence[dict], target, fields: Sequence[str] = ROC_FIELDS) -> None:
    """Write ``rows`` to a path or an open text stream."""
    if hasattr(target, "write"):
        writer = csv.DictWriter(target, fieldnames=list(fields), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return
    with open(target, "w", newline="") as fh:
        write_csv(rows, fh, fields)


def format_probability(p: Fraction) -> str:
    # exact half-even rounding, so 0.125 -> 0.12 and 0.135 -> 0.14
    return f"{float(round(Fraction(p), 2)):.2f}"


def render_rulelist(rule_list: RuleList, dataset: BinaryDataset | None = None) -> str:
    """IF / ELSE IF / ELSE table with probabilities and +/- supports.

    Supports come from the list itself unless ``dataset`` is given, in which
    case rows of that dataset are recounted. Softly falling lists get an
    extra column with each rule's own positive proportion.
    """
    counts = capture_counts(rule_list, dataset) if dataset is not None else [(r.n_pos, r.n_neg) for r in rule_list.all_rules()]
    soft = rule_list.mode == SOFT
    rows = []
    for j, rule in enumerate(rule_list.all_rules()):
        if j == rule_list.size:
            keyword, text = "ELSE", ""
        else:
            keyword = "IF" if j == 0 else "ELSE IF"
            text = " AND ".join(rule.antecedent)
        pos, neg = counts[j]
        row = [keyword, text, "THEN" if text else "", "prob. is", format_probability(rule.estimate)]
        if soft:
            alpha = rule.alpha
            row.append(format_probability(alpha) if alpha is not None else "-")
        row += [str(pos), str(neg)]
        rows.append(row)

    header = ["", "antecedent", "", "", "prob."] + (["prop."] if soft else []) + ["+", "-"]
    table = [header] + rows
    widths = [max(len(r[k]) for r in table) for k in range(len(header))]
    numeric_from = 4
    lines = []
    for r in table:
        cells = [c.rjust(wd) if k >= numeric_from else c.ljust(wd) for k, (c, wd) in enumerate(zip(r, widths))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"
