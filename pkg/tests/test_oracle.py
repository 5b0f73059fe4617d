from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fallrule import oracle
from fallrule.bounds import BoundInputs, passes_necessary_condition, should_terminate
from fallrule.exceptions import OracleGuardError
from fallrule.rulelist import objective_L, soft_objective, threshold
from fallrule.search import SearchConfig, run_frl

from .helpers import make_antecedent, make_dataset, random_matrix_dataset, single_antecedents

seeds = st.integers(0, 2**32 - 1)


def named_instance(seed, n_max=40, k_max=6):
    rng = np.random.default_rng(seed)
    ds = random_matrix_dataset(rng, int(rng.integers(6, n_max + 1)), int(rng.integers(1, k_max + 1)))
    return ds, single_antecedents(ds)


def test_separator_reaches_zero(separable):
    ds, ants = separable
    res = oracle.enumerate_optimal_frl(ds, ants, 1, 0)
    assert res.best_objective == 0
    assert res.best_ids == (1,)


def test_toy_optimum_is_trivial(toy):
    ds, ants = toy
    for w in (1, 3, 7):
        res = oracle.enumerate_optimal_frl(ds, ants, w, Fraction(1, 100))
        assert res.best_ids == ()
        assert res.best_list.else_estimate == Fraction(14, 19)


def test_guard():
    ds = make_dataset([True, False] * 10)
    ants = [make_antecedent(ds, [i], f"a{i}") for i in range(15)]
    with pytest.raises(OracleGuardError):
        oracle.enumerate_optimal_frl(ds, ants, 1, 0)
    with pytest.raises(OracleGuardError):
        oracle.enumerate_optimal_frl(ds, ants[:3], 1, 0, max_len=7)


@pytest.mark.parametrize("m,max_len", [(1, 1), (3, 2), (4, 4), (5, 3)])
def test_dfs_visits_every_sequence_once(m, max_len):
    # each antecedent owns a private row, so no sequence has an empty rule
    ds = make_dataset([True, False] * m + [True])
    ants = [make_antecedent(ds, [2 * i, 2 * i + 1, 2 * m], f"a{i}") for i in range(m)]
    res = oracle.enumerate_optimal_soft(ds, ants, 1, 0, 1, max_len=max_len)
    assert res.explored == oracle.count_sequences(m, max_len)
    assert oracle.count_sequences(4, 2) == 1 + 4 + 12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_order_independent(seed):
    ds, ants = named_instance(seed)
    perm = np.random.default_rng(seed).permutation(len(ants))
    shuffled = [ants[i] for i in perm]
    for f in (lambda a: oracle.enumerate_optimal_frl(ds, a, 3, Fraction(1, 100)),
              lambda a: oracle.enumerate_optimal_soft(ds, a, 3, Fraction(1, 100), Fraction(1, 2))):
        assert f(ants).best_objective == f(shuffled).best_objective


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([1, 3, 7]))
def test_optimal_rules_clear_the_threshold(seed, w):
    ds, ants = named_instance(seed)
    res = oracle.enumerate_optimal_frl(ds, ants, w, Fraction(1, 1000))
    for rule in res.best_list.rules:
        assert passes_necessary_condition(rule.alpha, w)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_relaxation_ordering(seed):
    ds, ants = named_instance(seed)
    hard = oracle.enumerate_optimal_frl(ds, ants, 1, 0).best_objective
    assert oracle.enumerate_optimal_soft(ds, ants, 1, 0, 0).best_objective <= hard
    for C1 in (10**3, 10**6):
        assert oracle.enumerate_optimal_soft(ds, ants, 1, 0, C1).best_objective == hard


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([1, 3]), st.sampled_from([0, Fraction(1, 50)]), st.sampled_from([0, Fraction(1, 2), 5]))
def test_best_lists_rescore_exactly(seed, w, C, C1):
    ds, ants = named_instance(seed)
    tau = threshold(w)
    hard = oracle.enumerate_optimal_frl(ds, ants, w, C)
    assert hard.best_list.is_falling()
    assert objective_L(hard.best_list, ds, tau, w, C) == hard.best_objective
    soft = oracle.enumerate_optimal_soft(ds, ants, w, C, C1)
    assert soft_objective(soft.best_list, ds, tau, w, C, C1) == soft.best_objective


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_search_never_beats_oracle(seed):
    rng = np.random.default_rng(seed)
    ds, ants = oracle.random_instance(rng, 60, 10)
    res = oracle.enumerate_optimal_frl(ds, ants, 1, Fraction(1, 100), max_len=6)
    found = run_frl(ds, ants, SearchConfig(w=1, C=0.01, T=100, seed=0)).objective
    if res.certified:
        assert found >= res.best_objective


def test_depth_cap_is_reported():
    ds, ants = oracle.random_instance(np.random.default_rng(9470532), 60, 10)
    short = oracle.enumerate_optimal_frl(ds, ants, 1, Fraction(1, 100), max_len=4)
    longer = oracle.enumerate_optimal_frl(ds, ants, 1, Fraction(1, 100), max_len=5)
    assert short.truncated and not short.certified
    assert longer.best_objective < short.best_objective


def test_certificate_from_rule_cost(separable):
    ds, ants = separable
    res = oracle.enumerate_optimal_frl(ds, ants, 1, Fraction(1, 10), max_len=1)
    assert res.best_objective == Fraction(1, 10)
    assert res.certified


def test_bound_report_on_trivial_instance():
    ds = make_dataset([True, False, False])
    report = oracle.verify_prefix_bound([], ds, [], 1, 0)
    assert report.gap >= 0
    assert report.ok


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_terminating_prefixes_have_zero_gap(seed):
    rng = np.random.default_rng(seed)
    ds, ants = oracle.random_instance(rng, int(rng.integers(6, 40)), int(rng.integers(2, 6)))
    w, C = 1, Fraction(int(rng.integers(0, 30)), 100)
    ids = [int(l) for l in rng.permutation(len(ants))[: int(rng.integers(0, 2))]]
    try:
        state = oracle.build_prefix(ds, ants, ids, w)
    except Exception:
        return
    inputs = BoundInputs.from_prefix(state, C)
    if not should_terminate(inputs, w, C) or not oracle.check_prefix(ds, ants, ids, w, C, 1, 4) == []:
        return
    report = oracle.verify_prefix_bound(ids, ds, ants, w, C, max_len=len(ids) + 3)
    if report.enumerated_min is not None and state.is_falling():
        assert report.gap == 0


def test_check_prefix_reports_nothing_on_toy(toy):
    ds, ants = toy
    assert oracle.check_prefix(ds, ants, [0], 1, 0, Fraction(1, 2), 3) == []
