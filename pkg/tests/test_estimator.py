from fractions import Fraction

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from fallrule import FallingRuleListClassifier, QuantileBinarizer, SoftFallingRuleListClassifier
from fallrule.exceptions import DataError


def binary_problem(seed=0, n=120):
    rng = np.random.default_rng(seed)
    X = (rng.random((n, 6)) < 0.4).astype(int)
    p = 0.1 + 0.6 * X[:, 0] + 0.2 * X[:, 1] * (1 - X[:, 0])
    y = np.where(rng.random(n) < p, "yes", "no")
    return X, y


def raw_problem(seed=0, n=150):
    rng = np.random.default_rng(seed)
    age = rng.integers(18, 90, n).astype(float)
    job = rng.choice(["admin", "retired", "student"], n)
    y = (rng.random(n) < np.where(job == "retired", 0.7, 0.15) + 0.1 * (age > 60)).astype(int)
    X = np.empty((n, 2), dtype=object)
    X[:, 0], X[:, 1] = age, job
    return X, y


def test_params_round_trip():
    clf = SoftFallingRuleListClassifier(w=3, C1=0.2, n_iter=10)
    params = clf.get_params()
    assert params["C1"] == 0.2 and params["w"] == 3
    assert clone(clf).get_params() == params
    assert set(FallingRuleListClassifier().get_params()) == {
        "w", "C", "n_iter", "lam", "p_terminate", "max_predicates", "min_support", "random_state",
    }


def test_fit_predict_binary_matrix():
    X, y = binary_problem()
    clf = FallingRuleListClassifier(w=2, n_iter=300).fit(X, y)
    assert list(clf.classes_) == ["no", "yes"]
    proba = clf.predict_proba(X)
    assert proba.shape == (len(X), 2)
    assert np.allclose(proba.sum(axis=1), 1)
    pred = clf.predict(X)
    assert set(pred) <= {"no", "yes"}
    assert np.array_equal(pred == "yes", proba[:, 1] > 1 / 3)
    assert clf.rule_list_.is_falling()
    assert clf.threshold_ == Fraction(1, 3)
    assert clf.rules_text().splitlines()[-1].startswith("ELSE")
    assert 0 <= clf.score(X, y) <= 1


def test_soft_classifier_outputs_falling_estimates():
    X, y = binary_problem(1)
    clf = SoftFallingRuleListClassifier(C1=0.1, n_iter=300).fit(X, y)
    assert clf.rule_list_.is_falling()
    assert clf.rule_list_.mode == "softly-falling"


def test_same_seed_same_model():
    X, y = binary_problem(2)
    a = FallingRuleListClassifier(n_iter=200, random_state=4).fit(X, y)
    b = FallingRuleListClassifier(n_iter=200, random_state=4).fit(X, y)
    assert a.rule_list_.to_json() == b.rule_list_.to_json()


def test_input_validation():
    X, y = binary_problem()
    with pytest.raises(NotFittedError):
        FallingRuleListClassifier().predict(X)
    with pytest.raises(DataError, match="binary feature matrix"):
        FallingRuleListClassifier(n_iter=5).fit(X * 2.5, y)
    with pytest.raises(DataError, match="two classes"):
        FallingRuleListClassifier(n_iter=5).fit(X, np.arange(len(y)) % 3)
    clf = FallingRuleListClassifier(n_iter=5).fit(X, y)
    with pytest.raises(ValueError):
        clf.predict(X[:, :3])


def test_binarizer_on_mixed_columns():
    X, _ = raw_problem()
    b = QuantileBinarizer(bins=3).fit(X)
    Z = b.transform(X)
    names = list(b.get_feature_names_out())
    assert Z.shape == (len(X), len(names))
    assert "x1=retired" in names
    assert any(" <= x0 < " in name for name in names)
    # each source column is one-hot
    for j in range(2):
        cols = [k for k, p in enumerate(b.predicates_) if p.source_column == j]
        assert (Z[:, cols].sum(axis=1) == 1).all()


def test_binarizer_missing_values():
    X = np.array([[1.0, "a"], [np.nan, None], [3.0, "b"], [4.0, "a"], [5.0, "b"], [6.0, "a"]], dtype=object)
    b = QuantileBinarizer(bins=2).fit(X)
    Z = b.transform(X)
    assert Z[1, [k for k, p in enumerate(b.predicates_) if p.source_column == 0]].sum() == 0
    assert "x1=?" in b.get_feature_names_out()


def test_binarizer_feature_count_checked():
    X, _ = raw_problem()
    b = QuantileBinarizer().fit(X)
    with pytest.raises(DataError):
        b.transform(X[:, :1])
    with pytest.raises(ValueError):
        QuantileBinarizer(bins=1).fit(X)


def test_pipeline_with_named_columns():
    pd = pytest.importorskip("pandas")
    X, y = raw_problem(3)
    frame = pd.DataFrame({"age": X[:, 0].astype(float), "job": X[:, 1]})
    pipe = make_pipeline(QuantileBinarizer().set_output(transform="pandas"), FallingRuleListClassifier(w=1, n_iter=300))
    pipe.fit(frame, y)
    clf = pipe[-1]
    assert "job=retired" in clf.rule_list_.antecedent_names()
    assert pipe.predict(frame).shape == (len(y),)
