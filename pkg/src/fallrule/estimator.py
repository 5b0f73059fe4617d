"""scikit-learn style front end: a binarizer and the two rule-list classifiers."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_is_fitted, validate_data

from ._validation import as_columns, check_zero_one, feature_names, missing_to_marker
from .data import MISSING, BinaryDataset, Predicate, column_predicates, infer_kind, to_numeric
from .evaluation import render_rulelist
from .exceptions import DataError
from .mining import mine
from .rulelist import predict as predict_labels
from .rulelist import predict_proba as predict_scores
from .rulelist import threshold
from .search import SearchConfig, run_frl, run_soft_frl


class QuantileBinarizer(TransformerMixin, BaseEstimator):
    """One-hot predicates: quantile bins for numeric columns, equality for the rest.

    Numeric columns with at most ``bins`` distinct values get one predicate
    per value instead of bins.
    """

    def __init__(self, bins=4):
        self.bins = bins

    def fit(self, X, y=None):
        if self.bins < 2:
            raise ValueError("bins must be at least 2")
        names, columns = as_columns(X)
        if names is not None:
            self.feature_names_in_ = np.array(names, dtype=object)
        self.n_features_in_ = len(columns)
        names = names or [f"x{j}" for j in range(len(columns))]
        self.kinds_ = [infer_kind(col) for col in columns]
        predicates = []
        for j, (name, col, kind) in enumerate(zip(names, columns, self.kinds_)):
            predicates.extend(column_predicates(name, j, self._prepare(col, kind), kind, self.bins))
        self.predicates_: list[Predicate] = predicates
        return self

    @staticmethod
    def _prepare(col, kind):
        if kind == "numeric":
            return to_numeric(col)
        return [str(v) for v in missing_to_marker(col, MISSING)]

    def transform(self, X):
        check_is_fitted(self, "predicates_")
        _, columns = as_columns(X)
        if len(columns) != self.n_features_in_:
            raise DataError(f"X has {len(columns)} features, expected {self.n_features_in_}")
        prepared = [self._prepare(col, kind) for col, kind in zip(columns, self.kinds_)]
        n = len(prepared[0]) if prepared else 0
        out = np.zeros((n, len(self.predicates_)), dtype=np.uint8)
        for k, p in enumerate(self.predicates_):
            out[:, k] = p.evaluate(prepared[p.source_column])
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "predicates_")
        return np.array([p.name for p in self.predicates_], dtype=object)


class FallingRuleListClassifier(ClassifierMixin, BaseEstimator):
    """Falling rule list learned by randomized search with prefix-bound pruning.

    ``X`` must be a 0/1 matrix of predicates; use ``QuantileBinarizer`` (for
    example in a pipeline) for raw features. The larger of the two classes
    in ``classes_`` is the positive class. Antecedents are mined from ``X``
    as conjunctions of up to ``max_predicates`` columns.
    """

    def __init__(
        self,
        w=1.0,
        C=1e-6,
        n_iter=3000,
        lam=0.5,
        p_terminate=0.05,
        max_predicates=2,
        min_support=0.1,
        random_state=0,
    ):
        self.w = w
        self.C = C
        self.n_iter = n_iter
        self.lam = lam
        self.p_terminate = p_terminate
        self.max_predicates = max_predicates
        self.min_support = min_support
        self.random_state = random_state

    def _config(self) -> SearchConfig:
        return SearchConfig(
            w=self.w,
            C=self.C,
            T=self.n_iter,
            seed=self.random_state,
            lam=self.lam,
            p_terminate=self.p_terminate,
        )

    def _search(self, dataset, antecedents):
        return run_frl(dataset, antecedents, self._config())

    def _binary_dataset(self, X, y=None) -> BinaryDataset:
        X = check_zero_one(X)
        labels = np.zeros(X.shape[0], dtype=bool) if y is None else y
        return BinaryDataset.from_matrix(X, labels, feature_names(self, X.shape[1]))

    def fit(self, X, y):
        X, y = validate_data(self, X, y)
        check_classification_targets(y)
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise DataError(f"need exactly two classes, got {len(self.classes_)}")
        dataset = self._binary_dataset(X, y == self.classes_[1])
        self.antecedents_ = mine(dataset, self.max_predicates, self.min_support)
        result = self._search(dataset, self.antecedents_)
        self.rule_list_ = result.rule_list
        self.objective_ = result.objective
        self.trace_ = result.trace
        self.threshold_ = threshold(self._config().w)
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "rule_list_")
        X = validate_data(self, X, reset=False)
        p = predict_scores(self.rule_list_, self._binary_dataset(X))
        return np.column_stack([1 - p, p])

    def predict(self, X):
        """Positive class where the capturing rule's estimate exceeds 1/(1+w)."""
        check_is_fitted(self, "rule_list_")
        X = validate_data(self, X, reset=False)
        labels = predict_labels(self.rule_list_, self._binary_dataset(X), self.threshold_)
        return self.classes_[(labels == 1).astype(int)]

    def rules_text(self) -> str:
        check_is_fitted(self, "rule_list_")
        return render_rulelist(self.rule_list_)


class SoftFallingRuleListClassifier(FallingRuleListClassifier):
    """Rule list learned under a monotonicity penalty ``C1`` instead of a hard
    constraint; estimates are running minima of the rule proportions."""

    def __init__(
        self,
        w=1.0,
        C=1e-6,
        C1=0.5,
        n_iter=3000,
        lam=0.5,
        p_terminate=0.05,
        max_predicates=2,
        min_support=0.1,
        random_state=0,
    ):
        super().__init__(
            w=w,
            C=C,
            n_iter=n_iter,
            lam=lam,
            p_terminate=p_terminate,
            max_predicates=max_predicates,
            min_support=min_support,
            random_state=random_state,
        )
        self.C1 = C1

    def _config(self) -> SearchConfig:
        return replace(super()._config(), C1=self.C1)

    def _search(self, dataset, antecedents):
        return run_soft_frl(dataset, antecedents, self._config())
