"""Monte-Carlo search for falling and softly falling rule lists.

Each iteration grows one list from the empty prefix, choosing the next rule
at random among candidates that survive the pruning tests, and keeps the
best closed list found so far. Per-prefix candidate statistics do not
depend on the incumbent, so they are computed once and cached; only the
comparison with the incumbent objective is redone at every visit.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bounds import (
    BoundInputs,
    is_feasible,
    passes_necessary_condition,
    prefix_bound_frl,
    prefix_bound_soft,
    should_terminate,
)
from .data import BinaryDataset
from .exceptions import DegenerateLabels
from .mining import Antecedent
from .rulelist import (
    COMPATIBLE,
    PrefixState,
    RuleList,
    as_fraction,
    close,
    closed_objective,
    empty_prefix,
    extend,
    is_compatible,
    objective_L,
    positive_part,
    soft_objective,
    softify,
    threshold,
)

logger = logging.getLogger(__name__)

_SLACK = Fraction(101)  # 1.01 / 0.01
_STEEP = Fraction(100)  # 1 / 0.01


@dataclass
class SearchConfig:
    w: float = 1.0
    C: float = 1e-6
    C1: float = 0.5
    T: int = 3000
    seed: int = 0
    lam: float = 0.5
    p_terminate: float = 0.05
    prune: bool = True
    debug: bool = False
    cache_size: int = 200_000

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be at least 1")
        if not as_fraction(self.w) > 0:
            raise ValueError("w must be positive")
        if as_fraction(self.C) < 0 or as_fraction(self.C1) < 0:
            raise ValueError("C and C1 must be non-negative")
        if not 0 <= self.lam <= 1:
            raise ValueError("lam must lie in [0, 1]")
        if not 0 <= self.p_terminate < 1:
            raise ValueError("p_terminate must lie in [0, 1)")


@dataclass(frozen=True)
class Improvement:
    iteration: int
    elapsed_ms: float
    objective: Fraction
    size: int


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    elapsed_ms: float
    objective: Fraction  # best so far, after this iteration
    size: int
    candidates: tuple[int, ...]  # |S| at each depth of this iteration


@dataclass
class SearchTrace:
    improvements: list[Improvement] = field(default_factory=list)
    iterations: list[IterationRecord] = field(default_factory=list)

    @property
    def best_objective(self) -> Fraction | None:
        return self.improvements[-1].objective if self.improvements else None

    def candidate_counts(self) -> list[tuple[int, int, int]]:
        """(iteration, depth, |S|) for every level of every iteration."""
        return [(r.iteration, d, c) for r in self.iterations for d, c in enumerate(r.candidates)]

    def rows(self, with_time: bool = True) -> list[list]:
        out = []
        for r in self.iterations:
            out.append(
                [
                    r.iteration,
                    f"{r.elapsed_ms:.3f}" if with_time else "",
                    repr(float(r.objective)),
                    r.size,
                    ";".join(map(str, r.candidates)),
                ]
            )
        return out

    def to_csv(self, path, with_time: bool = True) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "elapsed_ms", "objective", "size", "candidates_considered"])
            writer.writerows(self.rows(with_time))


@dataclass(frozen=True)
class SearchResult:
    rule_list: RuleList
    objective: Fraction
    trace: SearchTrace
    compatible_list: RuleList

    def __iter__(self):
        # unpacks as (best, trace)
        return iter((self.rule_list, self.trace))


def curiosity_frl(pos: int, neg: int, prefix: PrefixState, lam) -> Fraction:
    """lam * alpha + (1 - lam) * (share of the remaining positives captured)."""
    if prefix.tilde_pos == 0:
        raise ValueError("no positives left to capture")
    lam = as_fraction(lam)
    return lam * Fraction(pos, pos + neg) + (1 - lam) * Fraction(pos, prefix.tilde_pos)


def curiosity_soft(pos: int, neg: int, prefix: PrefixState, lam) -> Fraction:
    """Like ``curiosity_frl`` but the proportion term fades to zero once the
    candidate exceeds the prefix minimum by 1%."""
    if prefix.tilde_pos == 0:
        raise ValueError("no positives left to capture")
    lam = as_fraction(lam)
    alpha = Fraction(pos, pos + neg)
    head = positive_part(min(alpha, _SLACK * prefix.min_alpha - _STEEP * alpha))
    return lam * head + (1 - lam) * Fraction(pos, prefix.tilde_pos)


def sample_candidate(scores: Sequence[float], rng: np.random.Generator) -> int:
    """Index drawn with probability proportional to ``scores``; uniform if all are zero."""
    if not scores:
        raise ValueError("no candidates")
    if len(scores) == 1:
        return 0
    weights = np.asarray(scores, dtype=float)
    total = weights.sum()
    if total <= 0:
        return int(rng.integers(len(scores)))
    u = rng.random() * total
    idx = int(np.searchsorted(np.cumsum(weights), u, side="right"))
    return min(idx, len(scores) - 1)


@dataclass(frozen=True)
class _Entry:
    antecedent_id: int
    pos: int
    neg: int
    bound: Fraction
    score: float


class _Expander:
    """Candidate statistics per prefix, independent of the incumbent."""

    def __init__(self, antecedents: Sequence[Antecedent], w, C, C1, soft: bool, lam, cache_size: int):
        self.antecedents = antecedents
        self.w, self.C = as_fraction(w), as_fraction(C)
        self.C1 = as_fraction(C1) if soft else None
        self.soft = soft
        self.lam = as_fraction(lam)
        self.cache: dict[tuple[int, ...], tuple[bool, list[_Entry]]] = {}
        self.cache_size = cache_size

    def stop(self, state: PrefixState) -> bool:
        if state.tilde_pos == 0 or state.tilde_n == 0:
            return True
        if self.soft:
            inputs = BoundInputs.from_prefix(state, self.C, self.C1)
            return not prefix_bound_soft(inputs, self.w, self.C, self.C1) < closed_objective(state, self.C, self.C1)
        return should_terminate(BoundInputs.from_prefix(state, self.C), self.w, self.C)

    def entries(self, state: PrefixState) -> list[_Entry]:
        out = []
        last = state.last_alpha
        used = set(state.antecedent_ids)
        for l, ant in enumerate(self.antecedents):
            if l in used:
                continue
            hit = ant.bits & state.alive
            total = hit.bit_count()
            if total == 0:
                continue
            pos = (hit & state.positives).bit_count()
            neg = total - pos
            if not self.soft:
                # alpha <= last alpha, by cross-multiplication
                if pos * last.denominator > last.numerator * total:
                    continue
                if not passes_necessary_condition(Fraction(pos, total), self.w):
                    continue
            nxt = extend(state, ant, l)
            if self.soft:
                bound = prefix_bound_soft(BoundInputs.from_prefix(nxt, self.C, self.C1), self.w, self.C, self.C1)
                score = curiosity_soft(pos, neg, state, self.lam)
            else:
                inputs = BoundInputs.from_prefix(nxt, self.C)
                if not is_feasible(inputs):
                    continue
                bound = prefix_bound_frl(inputs, self.w, self.C)
                score = curiosity_frl(pos, neg, state, self.lam)
            out.append(_Entry(l, pos, neg, bound, float(score)))
        return out

    def expand(self, state: PrefixState) -> tuple[bool, list[_Entry]]:
        key = state.antecedent_ids
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        stop = self.stop(state)
        value = (stop, [] if stop else self.entries(state))
        if len(self.cache) >= self.cache_size:
            self.cache.clear()
        self.cache[key] = value
        return value


def _check_inputs(dataset: BinaryDataset, antecedents: Sequence[Antecedent]) -> None:
    if dataset.n_pos == 0 or dataset.n_neg == 0:
        raise DegenerateLabels("search needs both positive and negative rows")
    if len(antecedents) == 0:
        raise ValueError("antecedent set is empty")


def candidate_set(
    state: PrefixState,
    antecedents: Sequence[Antecedent],
    config: SearchConfig,
    best: Fraction | None,
    soft: bool = False,
) -> list[int]:
    """Antecedent ids admitted as the next rule after ``state`` given incumbent ``best``."""
    ex = _Expander(antecedents, config.w, config.C, config.C1, soft, config.lam, 0)
    return [e.antecedent_id for e in ex.entries(state) if best is None or e.bound < best]


def _debug_check_candidate(state: PrefixState, entry: _Entry, ant: Antecedent, ex: _Expander, best) -> None:
    nxt = extend(state, ant, entry.antecedent_id)
    alpha = nxt.alphas[-1]
    if ex.soft:
        bound = prefix_bound_soft(BoundInputs.from_prefix(nxt, ex.C, ex.C1), ex.w, ex.C, ex.C1)
    else:
        inputs = BoundInputs.from_prefix(nxt, ex.C)
        assert alpha <= state.last_alpha, "candidate breaks monotonicity"
        assert passes_necessary_condition(alpha, ex.w), "candidate fails the necessary condition"
        assert is_feasible(inputs), "candidate prefix is infeasible"
        bound = prefix_bound_frl(inputs, ex.w, ex.C)
    assert bound == entry.bound
    assert best is None or bound < best, "candidate bound does not beat the incumbent"


def _debug_check_list(state: PrefixState, dataset: BinaryDataset, ex: _Expander, value: Fraction) -> None:
    rl = close(state)
    assert is_compatible(rl, dataset)
    tau = threshold(ex.w)
    if ex.soft:
        assert soft_objective(rl, dataset, tau, ex.w, ex.C, ex.C1) == value
    else:
        assert rl.is_falling(), "constructed list is not falling"
        assert objective_L(rl, dataset, tau, ex.w, ex.C) == value


def _run(dataset: BinaryDataset, antecedents: Sequence[Antecedent], config: SearchConfig, soft: bool) -> SearchResult:
    _check_inputs(dataset, antecedents)
    rng = np.random.default_rng(config.seed)
    ex = _Expander(antecedents, config.w, config.C, config.C1, soft, config.lam, config.cache_size)
    C1 = ex.C1
    root = empty_prefix(dataset, ex.w)
    trace = SearchTrace()
    best_value: Fraction | None = None
    best_state = root
    start = time.perf_counter()

    for t in range(1, config.T + 1):
        state = root
        counts = []
        while True:
            stop, entries = ex.expand(state)
            if stop and config.prune:
                break
            if rng.random() < config.p_terminate:
                break
            if stop:
                entries = ex.entries(state) if state.tilde_pos and state.tilde_n else []
            if config.prune and best_value is not None:
                admitted = [e for e in entries if e.bound < best_value]
            else:
                admitted = entries
            counts.append(len(admitted))
            if not admitted:
                break
            chosen = admitted[sample_candidate([e.score for e in admitted], rng)]
            if config.debug:
                _debug_check_candidate(state, chosen, antecedents[chosen.antecedent_id], ex, best_value if config.prune else None)
            state = extend(state, antecedents[chosen.antecedent_id], chosen.antecedent_id)

        value = closed_objective(state, ex.C, C1)
        if config.debug:
            _debug_check_list(state, dataset, ex, value)
        elapsed = (time.perf_counter() - start) * 1000.0
        if best_value is None or value < best_value:
            best_value, best_state = value, state
            trace.improvements.append(Improvement(t, elapsed, value, state.size))
            logger.debug("iteration %d: objective %.6g with %d rules", t, float(value), state.size)
        trace.iterations.append(IterationRecord(t, elapsed, best_value, best_state.size, tuple(counts)))

    compatible = close(best_state, COMPATIBLE)
    final = softify(compatible) if soft else compatible
    return SearchResult(final, best_value, trace, compatible)


def run_frl(dataset: BinaryDataset, antecedents: Sequence[Antecedent], config: SearchConfig) -> SearchResult:
    """Best compatible falling rule list over ``config.T`` randomized constructions."""
    return _run(dataset, antecedents, config, soft=False)


def run_soft_frl(dataset: BinaryDataset, antecedents: Sequence[Antecedent], config: SearchConfig) -> SearchResult:
    """Best compatible rule list under the softly falling objective, returned softened.

    ``result.objective`` is the softly falling objective of the compatible
    list, which is kept as ``result.compatible_list``.
    """
    return _run(dataset, antecedents, config, soft=True)
