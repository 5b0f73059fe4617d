from fractions import Fraction

import numpy as np
import pytest

from fallrule.rulelist import COMPATIBLE, Rule, RuleList

from .helpers import make_antecedent, make_dataset

# rule supports of the published bank-full list, top to bottom, then the else clause
BANK_RULES = [
    (("poutcome=success", "default=no"), 978, 531),
    (("60 <= age < 100", "default=no"), 434, 1113),
    (("17 <= age < 30", "housing=no"), 504, 1539),
    (("previous >= 2", "housing=no"), 242, 794),
    (("campaign=1", "housing=no"), 658, 4092),
    (("previous >= 2", "education=tertiary"), 108, 707),
]
BANK_ELSE = (2365, 31146)


@pytest.fixture
def toy():
    """19 rows, 14 positive; A1 captures 8 positives and 3 negatives, leaving 6+/2-."""
    ds = make_dataset([True] * 14 + [False] * 5)
    a1 = make_antecedent(ds, list(range(8)) + [14, 15, 16], "A1")
    a2 = make_antecedent(ds, list(range(8, 14)) + [0, 1] + [14, 15, 16], "A2")
    return ds, [a1, a2]


@pytest.fixture
def shadowed():
    """Every antecedent is infeasible as a first rule, yet a softly falling list pays off.

    20 rows, 10 positive. A (4+/6-, alpha 2/5) leaves 6+/4- behind; B (6+/7-)
    leaves 4+/3- behind. After A, B captures 6+/1-.
    """
    ds = make_dataset([True] * 10 + [False] * 10)
    a = make_antecedent(ds, [0, 1, 2, 3] + list(range(10, 16)), "A")
    b = make_antecedent(ds, list(range(4, 10)) + [16] + list(range(10, 16)), "B")
    return ds, [a, b]


@pytest.fixture
def separable():
    ds = make_dataset([True] * 12 + [False] * 18)
    good = make_antecedent(ds, range(12), "good")
    noise = make_antecedent(ds, [0, 1, 12, 13, 14, 20], "noise")
    return ds, [noise, good]


@pytest.fixture
def bank_list() -> RuleList:
    rules = tuple(Rule(ant, Fraction(p, p + q), p, q) for ant, p, q in BANK_RULES)
    p, q = BANK_ELSE
    return RuleList(rules, Rule((), Fraction(p, p + q), p, q), COMPATIBLE)


@pytest.fixture
def bank_blocks():
    """45211 rows grouped into the published capture blocks, one antecedent per block."""
    sizes = [(p, q) for _, p, q in BANK_RULES] + [BANK_ELSE]
    labels = np.concatenate([np.r_[np.ones(p, bool), np.zeros(q, bool)] for p, q in sizes])
    ds = make_dataset(labels)
    ants, start = [], 0
    for (names, p, q) in BANK_RULES:
        ants.append(make_antecedent(ds, range(start, start + p + q), " AND ".join(names)))
        start += p + q
    return ds, ants


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
