"""Prefixes and rule lists, their capture statistics and objectives.

Everything that feeds a comparison is an exact ``Fraction`` over integer
counts. A prefix tracks, incrementally, what the from-scratch functions
(``objective_L``, ``soft_objective``) recompute from the data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from . import _bits
from .data import BinaryDataset
from .exceptions import DataError, SchemaMismatch, ZeroCapture
from .mining import Antecedent

COMPATIBLE = "compatible"
SOFT = "softly-falling"

ONE = Fraction(1)
ZERO = Fraction(0)


def as_fraction(x) -> Fraction:
    """Exact value of a user parameter; floats go through their shortest repr (1e-6 -> 1/1000000)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    return Fraction(str(x))


def threshold(w) -> Fraction:
    """The risk-minimizing decision threshold 1/(1+w)."""
    return 1 / (1 + as_fraction(w))


def above_threshold(pos: int, neg: int, w: Fraction) -> bool:
    # pos/(pos+neg) > 1/(1+w)
    return pos * (1 + w) > pos + neg


def positive_part(x: Fraction) -> Fraction:
    return x if x > 0 else ZERO


@dataclass(frozen=True)
class PrefixState:
    """An ordered list of rules without its final else clause.

    ``missed_pos`` and ``false_pos`` count, over the captured rows, the
    positives whose rule predicts negative and the negatives whose rule
    predicts positive at threshold 1/(1+w); ``penalty`` is the accumulated
    monotonicity overshoot of the rule proportions.
    """

    antecedent_ids: tuple[int, ...]
    names: tuple[tuple[str, ...], ...]
    rule_pos: tuple[int, ...]
    rule_neg: tuple[int, ...]
    alphas: tuple[Fraction, ...]
    alive: int
    tilde_pos: int
    tilde_neg: int
    min_alpha: Fraction
    missed_pos: int
    false_pos: int
    penalty: Fraction
    w: Fraction
    n: int
    positives: int = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.antecedent_ids)

    @property
    def last_alpha(self) -> Fraction:
        return self.alphas[-1] if self.alphas else ONE

    @property
    def tilde_n(self) -> int:
        return self.tilde_pos + self.tilde_neg

    @property
    def tilde_alpha(self) -> Fraction | None:
        """Positive proportion of the uncaptured rows (None when nothing is left)."""
        if self.tilde_n == 0:
            return None
        return Fraction(self.tilde_pos, self.tilde_n)

    def risk(self) -> Fraction:
        return (self.w * self.missed_pos + self.false_pos) / self.n

    def objective(self, C) -> Fraction:
        return self.risk() + as_fraction(C) * self.size

    def soft_objective(self, C, C1) -> Fraction:
        return self.objective(C) + as_fraction(C1) * self.penalty

    def is_falling(self) -> bool:
        return all(a >= b for a, b in zip(self.alphas, self.alphas[1:]))

    def contains(self, antecedent_id: int) -> bool:
        return antecedent_id in self.antecedent_ids


def empty_prefix(dataset: BinaryDataset, w=1) -> PrefixState:
    """The prefix with no rules: every row is still uncaptured."""
    if dataset.n == 0:
        raise DataError("empty dataset")
    return PrefixState(
        antecedent_ids=(),
        names=(),
        rule_pos=(),
        rule_neg=(),
        alphas=(),
        alive=dataset.all_rows,
        tilde_pos=dataset.n_pos,
        tilde_neg=dataset.n_neg,
        min_alpha=ONE,
        missed_pos=0,
        false_pos=0,
        penalty=ZERO,
        w=as_fraction(w),
        n=dataset.n,
        positives=dataset.labels,
    )


def capture(prefix: PrefixState, antecedent: Antecedent) -> tuple[int, int]:
    """Positive/negative rows the antecedent would capture after ``prefix``."""
    hit = antecedent.bits & prefix.alive
    pos = (hit & prefix.positives).bit_count()
    return pos, hit.bit_count() - pos


def extend(prefix: PrefixState, antecedent: Antecedent, antecedent_id: int = -1) -> PrefixState:
    """Append ``antecedent`` as the next rule; raises ZeroCapture if it captures nothing."""
    hit = antecedent.bits & prefix.alive
    total = hit.bit_count()
    if total == 0:
        raise ZeroCapture(f"antecedent {antecedent.label or antecedent_id} captures no uncovered row")
    pos = (hit & prefix.positives).bit_count()
    neg = total - pos
    alpha = Fraction(pos, total)
    if above_threshold(pos, neg, prefix.w):
        missed, fp = prefix.missed_pos, prefix.false_pos + neg
    else:
        missed, fp = prefix.missed_pos + pos, prefix.false_pos
    return PrefixState(
        antecedent_ids=prefix.antecedent_ids + (antecedent_id,),
        names=prefix.names + (antecedent.names,),
        rule_pos=prefix.rule_pos + (pos,),
        rule_neg=prefix.rule_neg + (neg,),
        alphas=prefix.alphas + (alpha,),
        alive=prefix.alive & ~hit,
        tilde_pos=prefix.tilde_pos - pos,
        tilde_neg=prefix.tilde_neg - neg,
        min_alpha=min(prefix.min_alpha, alpha),
        missed_pos=missed,
        false_pos=fp,
        penalty=prefix.penalty + positive_part(alpha - prefix.min_alpha),
        w=prefix.w,
        n=prefix.n,
        positives=prefix.positives,
    )


def closed_objective(prefix: PrefixState, C, C1=None) -> Fraction:
    """Objective of the list that closes ``prefix`` with its else clause.

    With ``C1`` the softly falling objective, otherwise the plain one.
    """
    value = prefix.objective(C)
    if prefix.tilde_n:
        if above_threshold(prefix.tilde_pos, prefix.tilde_neg, prefix.w):
            value += Fraction(prefix.tilde_neg, prefix.n)
        else:
            value += prefix.w * prefix.tilde_pos / prefix.n
    if C1 is not None:
        value += as_fraction(C1) * prefix.penalty
        if prefix.tilde_n:
            value += as_fraction(C1) * positive_part(prefix.tilde_alpha - prefix.min_alpha)
    return value


@dataclass(frozen=True)
class Rule:
    antecedent: tuple[str, ...]
    estimate: Fraction
    n_pos: int
    n_neg: int

    @property
    def alpha(self) -> Fraction | None:
        total = self.n_pos + self.n_neg
        return Fraction(self.n_pos, total) if total else None


@dataclass(frozen=True)
class RuleList:
    """``IF a_0 THEN p_0 ELSE IF a_1 THEN p_1 ... ELSE p_else``.

    In ``compatible`` mode estimates are the empirical positive proportions;
    in ``softly-falling`` mode they are running minima of those proportions.
    An else clause that captures no training row gets the running minimum.
    """

    rules: tuple[Rule, ...]
    else_rule: Rule
    mode: str = COMPATIBLE

    @property
    def size(self) -> int:
        return len(self.rules)

    @property
    def else_estimate(self) -> Fraction:
        return self.else_rule.estimate

    @property
    def estimates(self) -> list[Fraction]:
        return [r.estimate for r in self.rules] + [self.else_rule.estimate]

    @property
    def alphas(self) -> list[Fraction | None]:
        return [r.alpha for r in self.rules] + [self.else_rule.alpha]

    def all_rules(self) -> tuple[Rule, ...]:
        return self.rules + (self.else_rule,)

    def is_falling(self) -> bool:
        est = self.estimates
        return all(a >= b for a, b in zip(est, est[1:]))

    def antecedent_names(self) -> set[str]:
        return {p for r in self.rules for p in r.antecedent}

    def to_dict(self) -> dict:
        def rule(r: Rule) -> dict:
            return {"estimate": float(r.estimate), "n_pos": r.n_pos, "n_neg": r.n_neg}

        return {
            "mode": self.mode,
            "rules": [{"antecedent": list(r.antecedent), **rule(r)} for r in self.rules],
            "else": rule(self.else_rule),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "RuleList":
        """Exact estimates are rebuilt from the stored supports and checked against the stored floats."""
        mode = d["mode"]
        if mode not in (COMPATIBLE, SOFT):
            raise DataError(f"unknown rule list mode {mode!r}")
        counts = [(r["n_pos"], r["n_neg"]) for r in d["rules"]] + [(d["else"]["n_pos"], d["else"]["n_neg"])]
        estimates = _estimates_from_counts(counts, soft=mode == SOFT)
        stored = [r["estimate"] for r in d["rules"]] + [d["else"]["estimate"]]
        for exact, given in zip(estimates, stored):
            if abs(float(exact) - given) > 1e-9:
                raise DataError("stored estimates disagree with stored supports")
        rules = tuple(
            Rule(tuple(r["antecedent"]), est, pos, neg)
            for r, est, (pos, neg) in zip(d["rules"], estimates, counts)
        )
        return cls(rules, Rule((), estimates[-1], *counts[-1]), mode)

    @classmethod
    def from_json(cls, text: str) -> "RuleList":
        return cls.from_dict(json.loads(text))


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _estimates_from_counts(counts: Sequence[tuple[int, int]], soft: bool) -> list[Fraction]:
    out = []
    running = ONE
    for pos, neg in counts:
        alpha = Fraction(pos, pos + neg) if pos + neg else None
        if alpha is None:
            est = running
        elif soft:
            est = min(running, alpha)
        else:
            est = alpha
        if alpha is not None:
            running = min(running, alpha)
        out.append(est)
    return out


def close(prefix: PrefixState, mode: str = COMPATIBLE) -> RuleList:
    """Append the final else clause, whose estimate is the proportion of what is left."""
    counts = list(zip(prefix.rule_pos, prefix.rule_neg)) + [(prefix.tilde_pos, prefix.tilde_neg)]
    estimates = _estimates_from_counts(counts, soft=mode == SOFT)
    rules = tuple(Rule(names, est, pos, neg) for names, est, (pos, neg) in zip(prefix.names, estimates, counts))
    return RuleList(rules, Rule((), estimates[-1], prefix.tilde_pos, prefix.tilde_neg), mode)


def softify(rule_list: RuleList) -> RuleList:
    """Replace each estimate by the running minimum of the proportions up to it."""
    counts = [(r.n_pos, r.n_neg) for r in rule_list.all_rules()]
    estimates = _estimates_from_counts(counts, soft=True)
    rules = tuple(
        Rule(r.antecedent, est, r.n_pos, r.n_neg) for r, est in zip(rule_list.all_rules(), estimates)
    )
    return RuleList(rules[:-1], rules[-1], SOFT)


def _rule_bits(rule_list: RuleList, dataset: BinaryDataset) -> list[int]:
    missing = sorted(p for p in rule_list.antecedent_names() if not dataset.has_predicate(p))
    if missing:
        raise SchemaMismatch(f"dataset lacks predicates {missing}")
    return [dataset.bits_of(r.antecedent) for r in rule_list.rules]


def capture_counts(rule_list: RuleList, dataset: BinaryDataset) -> list[tuple[int, int]]:
    """Per rule (else clause last), the positive/negative rows it captures in ``dataset``."""
    alive = dataset.all_rows
    out = []
    for bits in _rule_bits(rule_list, dataset):
        hit = bits & alive
        alive &= ~hit
        pos = (hit & dataset.labels).bit_count()
        out.append((pos, hit.bit_count() - pos))
    pos = (alive & dataset.labels).bit_count()
    out.append((pos, alive.bit_count() - pos))
    return out


def is_compatible(rule_list: RuleList, dataset: BinaryDataset) -> bool:
    """Every rule captures something and every estimate equals its empirical proportion."""
    counts = capture_counts(rule_list, dataset)
    if any(pos + neg == 0 for pos, neg in counts[:-1]):
        return False
    return all(
        est == Fraction(pos, pos + neg)
        for est, (pos, neg) in zip(rule_list.estimates, counts)
        if pos + neg
    )


def _empirical(counts):
    return [Fraction(p, p + q) if p + q else None for p, q in counts]


def objective_L(rule_list: RuleList, dataset: BinaryDataset, tau, w, C) -> Fraction:
    """Weighted misclassification risk at threshold ``tau`` plus C per rule, from scratch."""
    w = as_fraction(w)
    counts = capture_counts(rule_list, dataset)
    missed = fp = 0
    for est, (pos, neg) in zip(rule_list.estimates, counts):
        if est <= tau:
            missed += pos
        else:
            fp += neg
    return (w * missed + fp) / dataset.n + as_fraction(C) * rule_list.size


def monotonicity_penalty(alphas: Sequence[Fraction | None]) -> Fraction:
    """Sum over j of max(0, alpha_j - min_{k<j} alpha_k); empty clauses are skipped."""
    total = ZERO
    running = ONE
    for a in alphas:
        if a is None:
            continue
        total += positive_part(a - running)
        running = min(running, a)
    return total


def soft_objective(rule_list: RuleList, dataset: BinaryDataset, tau, w, C, C1) -> Fraction:
    """Plain objective of the compatible list plus C1 times its monotonicity overshoot.

    The risk term uses the empirical proportions, so a softened list is
    scored as the compatible list it was made from.
    """
    counts = capture_counts(rule_list, dataset)
    alphas = _empirical(counts)
    compatible = RuleList(
        tuple(Rule(r.antecedent, a, p, q) for r, a, (p, q) in zip(rule_list.rules, alphas, counts)),
        Rule((), alphas[-1] if alphas[-1] is not None else ONE, *counts[-1]),
    )
    return objective_L(compatible, dataset, tau, w, C) + as_fraction(C1) * monotonicity_penalty(alphas)


def capture_index(rule_list: RuleList, dataset: BinaryDataset) -> np.ndarray:
    """Index of the capturing rule per row; ``size`` means the else clause."""
    idx = np.full(dataset.n, rule_list.size, dtype=np.intp)
    free = np.ones(dataset.n, dtype=bool)
    for j, bits in enumerate(_rule_bits(rule_list, dataset)):
        hit = _bits.to_bool(bits, dataset.n) & free
        idx[hit] = j
        free &= ~hit
    return idx


def predict_proba(rule_list: RuleList, dataset: BinaryDataset) -> np.ndarray:
    est = np.array([float(e) for e in rule_list.estimates])
    return est[capture_index(rule_list, dataset)]


def predict(rule_list: RuleList, dataset: BinaryDataset, tau) -> np.ndarray:
    """+1 where the capturing rule's estimate is strictly above ``tau``, else -1."""
    positive = np.array([e > tau for e in rule_list.estimates])
    return np.where(positive[capture_index(rule_list, dataset)], 1, -1)


def predict_row(rule_list: RuleList, satisfied: set[str], tau) -> int:
    for r in rule_list.rules:
        if all(p in satisfied for p in r.antecedent):
            return 1 if r.estimate > tau else -1
    return 1 if rule_list.else_estimate > tau else -1
