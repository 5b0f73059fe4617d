"""Exhaustive enumeration of small instances, used as ground truth.

The oracle evaluates lists with a per-row scan over a boolean matrix, and
never consults the prefix bounds, so it stays independent of the code it
checks. It does use the monotonicity constraint (a non-falling prefix has
no falling extension) and, for the hard problem, optionally the remaining
proportion test to skip infeasible subtrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import _bits
from .bounds import BoundInputs, prefix_bound_frl, prefix_bound_soft
from .data import BinaryDataset
from .exceptions import OracleGuardError
from .mining import Antecedent
from .rulelist import COMPATIBLE, Rule, RuleList, as_fraction, empty_prefix, extend

MAX_ANTECEDENTS = 14
MAX_LEN = 6


@dataclass
class OracleResult:
    best_objective: Fraction | None
    best_list: RuleList | None
    best_ids: tuple[int, ...] | None
    explored: int
    truncated: bool = False  # some list of the maximum length could have been extended
    max_len: int = MAX_LEN
    C: Fraction = Fraction(0)

    @property
    def certified(self) -> bool:
        """Whether the optimum holds over lists of every length.

        Either no list was cut off by ``max_len``, or the optimum is already
        below ``C * (max_len + 1)``, the least cost of any longer list.
        """
        if not self.truncated:
            return True
        return self.best_objective is not None and self.best_objective <= self.C * (self.max_len + 1)


@dataclass
class BoundReport:
    prefix: tuple[int, ...]
    bound: Fraction
    enumerated_min: Fraction | None
    closed_objective: Fraction
    extensions: int
    truncated: bool = False

    @property
    def gap(self) -> Fraction | None:
        if self.enumerated_min is None:
            return None
        return self.enumerated_min - self.bound

    @property
    def ok(self) -> bool:
        return self.enumerated_min is None or self.bound <= self.enumerated_min


class _Table:
    """Dense view: ``sat[i, l]`` is whether row i satisfies antecedent l.

    A row's capturing rule is the first True column among the chosen ones.
    """

    def __init__(self, dataset: BinaryDataset, antecedents: Sequence[Antecedent]):
        self.n = dataset.n
        self.y = _bits.to_bool(dataset.labels, dataset.n)
        cols = [_bits.to_bool(a.bits, dataset.n) for a in antecedents]
        self.sat = np.column_stack(cols) if cols else np.zeros((dataset.n, 0), dtype=bool)

    def counts(self, seq: Sequence[int]) -> list[tuple[int, int]]:
        """(positives, negatives) captured by each rule of ``seq`` and by the else clause."""
        k = len(seq)
        if k == 0:
            pos = int(self.y.sum())
            return [(pos, self.n - pos)]
        sub = self.sat[:, list(seq)]
        first = np.where(sub.any(axis=1), sub.argmax(axis=1), k)
        pos = np.bincount(first[self.y], minlength=k + 1)
        neg = np.bincount(first[~self.y], minlength=k + 1)
        return list(zip(pos.tolist(), neg.tolist()))


def _alphas(counts):
    return [Fraction(p, p + q) if p + q else None for p, q in counts]


def _risk(counts, estimates, tau, w) -> Fraction:
    missed = fp = 0
    for (p, q), est in zip(counts, estimates):
        if est <= tau:
            missed += p
        else:
            fp += q
    return w * missed + fp


def _evaluate(table: _Table, seq, w, C, C1, hard) -> tuple[Fraction, list] | None:
    """Objective of the compatible list with antecedents ``seq``; None if not admissible."""
    counts = table.counts(seq)
    if any(p + q == 0 for p, q in counts[:-1]):
        return None
    alphas = _alphas(counts)
    present = [a for a in alphas if a is not None]
    if hard and any(a < b for a, b in zip(present, present[1:])):
        return None
    running = Fraction(1)
    estimates = []
    penalty = Fraction(0)
    for a in alphas:
        if a is None:
            estimates.append(running)
            continue
        if a > running:
            penalty += a - running
        running = min(running, a)
        estimates.append(a)
    tau = 1 / (1 + w)
    value = _risk(counts, estimates, tau, w) / table.n + C * len(seq)
    if not hard:
        value += C1 * penalty
    return value, counts


def _guard(antecedents, max_len):
    if len(antecedents) > MAX_ANTECEDENTS or max_len > MAX_LEN:
        raise OracleGuardError(
            f"oracle limited to {MAX_ANTECEDENTS} antecedents and length {MAX_LEN}"
        )


def _dfs(table: _Table, m: int, start: tuple[int, ...], max_len: int, hard: bool, prune_infeasible: bool, capped: list | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every admissible antecedent sequence that begins with ``start``.

    Sequences cut off by ``max_len`` that still had room to grow are
    appended to ``capped`` when it is given.
    """
    stack = [start]
    while stack:
        seq = stack.pop()
        counts = table.counts(seq)
        if any(p + q == 0 for p, q in counts[:-1]):
            continue
        alphas = _alphas(counts)
        rule_alphas = alphas[:-1]
        if hard and any(a < b for a, b in zip(rule_alphas, rule_alphas[1:])):
            continue
        yield seq
        infeasible = hard and seq and alphas[-1] is not None and alphas[-1] > rule_alphas[-1]
        if len(seq) >= max_len:
            if capped is not None and counts[-1] != (0, 0) and not infeasible and len(seq) < m:
                capped.append(seq)
            continue
        if prune_infeasible and infeasible:
            continue
        used = set(seq)
        for l in range(m - 1, -1, -1):
            if l not in used:
                stack.append(seq + (l,))


def _to_rule_list(antecedents, seq, counts) -> RuleList:
    alphas = _alphas(counts)
    running = Fraction(1)
    rules = []
    for l, (p, q), a in zip(seq, counts, alphas):
        rules.append(Rule(antecedents[l].names, a, p, q))
        running = min(running, a)
    p, q = counts[-1]
    return RuleList(tuple(rules), Rule((), alphas[-1] if alphas[-1] is not None else running, p, q), COMPATIBLE)


def _search(dataset, antecedents, w, C, C1, max_len, hard, start=(), prune_infeasible=True) -> OracleResult:
    _guard(antecedents, max_len)
    w, C = as_fraction(w), as_fraction(C)
    C1 = as_fraction(C1) if C1 is not None else Fraction(0)
    table = _Table(dataset, antecedents)
    best = best_seq = best_counts = None
    explored = 0
    capped: list = []
    for seq in _dfs(table, len(antecedents), tuple(start), max_len, hard, prune_infeasible, capped):
        explored += 1
        res = _evaluate(table, seq, w, C, C1, hard)
        if res is None:
            continue
        value, counts = res
        if best is None or value < best:
            best, best_seq, best_counts = value, seq, counts
    best_list = _to_rule_list(antecedents, best_seq, best_counts) if best_seq is not None else None
    return OracleResult(best, best_list, best_seq, explored, truncated=bool(capped), max_len=max_len, C=C)


def enumerate_optimal_frl(dataset: BinaryDataset, antecedents: Sequence[Antecedent], w, C, max_len: int = 4) -> OracleResult:
    """Minimum of L over all compatible falling lists of at most ``max_len`` rules."""
    return _search(dataset, antecedents, w, C, None, max_len, hard=True)


def enumerate_optimal_soft(dataset: BinaryDataset, antecedents: Sequence[Antecedent], w, C, C1, max_len: int = 4) -> OracleResult:
    """Minimum of the softly falling objective over all compatible lists of at most ``max_len`` rules."""
    return _search(dataset, antecedents, w, C, C1, max_len, hard=False)


def best_extension(dataset, antecedents, prefix: Sequence[int], w, C, C1=None, max_len: int = 4, hard: bool = True, prune_infeasible: bool = True) -> OracleResult:
    """Best admissible list that begins with the antecedent ids ``prefix``."""
    return _search(dataset, antecedents, w, C, C1, max_len, hard, start=tuple(prefix), prune_infeasible=prune_infeasible)


def has_falling_extension(dataset, antecedents, prefix: Sequence[int], max_len: int = MAX_LEN) -> bool:
    """Whether any compatible falling list begins with ``prefix`` (search without feasibility pruning)."""
    _guard(antecedents, max_len)
    table = _Table(dataset, antecedents)
    for seq in _dfs(table, len(antecedents), tuple(prefix), max_len, True, prune_infeasible=False):
        counts = table.counts(seq)
        alphas = [a for a in _alphas(counts) if a is not None]
        if all(a >= b for a, b in zip(alphas, alphas[1:])):
            return True
    return False


def count_sequences(m: int, max_len: int) -> int:
    """Ordered selections without repetition of at most ``max_len`` of ``m`` items."""
    total, term = 0, 1
    for k in range(max_len + 1):
        total += term
        term *= m - k
    return total


def build_prefix(dataset, antecedents, ids: Sequence[int], w):
    state = empty_prefix(dataset, w)
    for l in ids:
        state = extend(state, antecedents[l], l)
    return state


def verify_prefix_bound(prefix: Sequence[int], dataset, antecedents, w, C, C1=None, max_len: int = 4) -> BoundReport:
    """Compare the prefix bound with the best enumerated list beginning with the prefix.

    Without ``C1`` the falling-list bound is checked against compatible
    falling extensions; with it, the soft bound against all compatible ones.
    """
    state = build_prefix(dataset, antecedents, prefix, w)
    if C1 is None:
        inputs = BoundInputs.from_prefix(state, C)
        bound = prefix_bound_frl(inputs, w, C)
        res = best_extension(dataset, antecedents, prefix, w, C, None, max_len, hard=True)
    else:
        inputs = BoundInputs.from_prefix(state, C, C1)
        bound = prefix_bound_soft(inputs, w, C, C1)
        res = best_extension(dataset, antecedents, prefix, w, C, C1, max_len, hard=False)
    table = _Table(dataset, antecedents)
    closed = _evaluate(table, tuple(prefix), as_fraction(w), as_fraction(C), as_fraction(C1 or 0), C1 is None)
    return BoundReport(
        prefix=tuple(prefix),
        bound=bound,
        enumerated_min=res.best_objective,
        closed_objective=closed[0] if closed else None,
        extensions=res.explored,
        truncated=res.truncated,
    )


def random_instance(rng: np.random.Generator, n: int, m: int) -> tuple[BinaryDataset, list[Antecedent]]:
    """Random labels plus ``m`` antecedents whose rows lean toward one class.

    Antecedent ``l`` is the single predicate ``a{l}`` of the returned
    dataset, so lists built from them can be re-evaluated from the data.
    """
    y = rng.random(n) < rng.uniform(0.2, 0.8)
    if y.all() or not y.any():
        y[0] = not y[0]
    sign = np.where(y, 1.0, -1.0)
    masks = []
    for _ in range(m):
        rate = np.clip(rng.uniform(0.05, 0.6) + rng.uniform(-0.3, 0.3) * sign, 0.01, 0.99)
        mask = rng.random(n) < rate
        if not mask.any():
            mask[rng.integers(n)] = True
        masks.append(mask)
    X = np.column_stack(masks) if masks else np.zeros((n, 0), dtype=bool)
    dataset = BinaryDataset.from_matrix(X, y, [f"a{l}" for l in range(m)])
    return dataset, [Antecedent.from_predicates(dataset, [l]) for l in range(m)]


@dataclass
class Violation:
    kind: str
    detail: str
    reproducer: dict = field(default_factory=dict)


def instance_dict(dataset: BinaryDataset, antecedents: Sequence[Antecedent]) -> dict:
    """JSON-ready description that rebuilds the instance exactly."""
    return {
        "labels": _bits.to_bool(dataset.labels, dataset.n).astype(int).tolist(),
        "antecedents": [np.flatnonzero(_bits.to_bool(a.bits, dataset.n)).tolist() for a in antecedents],
    }


def check_prefix(dataset, antecedents, prefix: Sequence[int], w, C, C1, max_len: int) -> list[Violation]:
    """Check both prefix bounds and the feasibility test on one prefix."""
    from .bounds import is_feasible, should_terminate

    out = []
    state = build_prefix(dataset, antecedents, prefix, w)
    repro = {**instance_dict(dataset, antecedents), "prefix": list(prefix), "w": str(w), "C": str(C), "C1": str(C1), "max_len": max_len}

    soft = verify_prefix_bound(prefix, dataset, antecedents, w, C, C1, max_len)
    if not soft.ok:
        out.append(Violation("soft-bound", f"bound {soft.bound} > enumerated {soft.enumerated_min}", repro))
    if soft.closed_objective is not None and soft.bound > soft.closed_objective:
        out.append(Violation("soft-bound", f"bound {soft.bound} > closed prefix {soft.closed_objective}", repro))

    if not state.is_falling():
        return out
    inputs = BoundInputs.from_prefix(state, C)
    feasible = is_feasible(inputs)
    exists = has_falling_extension(dataset, antecedents, prefix, max_len=min(MAX_LEN, len(prefix) + 2))
    tilde_ok = state.tilde_n == 0 or state.tilde_alpha <= state.last_alpha
    if not feasible == exists == tilde_ok:
        out.append(Violation("feasibility", f"integer={feasible} enumerated={exists} proportion={tilde_ok}", repro))
    if feasible:
        hard = verify_prefix_bound(prefix, dataset, antecedents, w, C, None, max_len)
        if not hard.ok:
            out.append(Violation("hard-bound", f"bound {hard.bound} > enumerated {hard.enumerated_min}", repro))
        if should_terminate(inputs, w, C) and hard.closed_objective != hard.bound:
            out.append(Violation("hard-bound", f"terminating prefix: closed {hard.closed_objective} != bound {hard.bound}", repro))
    return out
