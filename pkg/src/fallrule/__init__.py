"""Falling and softly falling rule lists learned by pruned Monte-Carlo search."""

from .bounds import (
    BoundInputs,
    g_infimum,
    is_feasible,
    passes_necessary_condition,
    prefix_bound_frl,
    prefix_bound_soft,
    should_terminate,
)
from .data import BinaryDataset, Predicate, RawDataset, apply_predicates, binarize, fit_predicates, load_csv, split
from .estimator import FallingRuleListClassifier, QuantileBinarizer, SoftFallingRuleListClassifier
from .evaluation import EvalReport, evaluate, render_rulelist, roc_sweep
from .exceptions import DataError, DegenerateLabels, OracleGuardError, OracleViolation, SchemaMismatch, ZeroCapture
from .mining import Antecedent, AntecedentSet, mine
from .model import Model
from .rulelist import PrefixState, Rule, RuleList, empty_prefix, extend, objective_L, soft_objective
from .search import SearchConfig, SearchResult, SearchTrace, run_frl, run_soft_frl

__version__ = "0.1.0"

__all__ = [
    "Antecedent",
    "AntecedentSet",
    "BinaryDataset",
    "BoundInputs",
    "DataError",
    "DegenerateLabels",
    "EvalReport",
    "FallingRuleListClassifier",
    "Model",
    "OracleGuardError",
    "OracleViolation",
    "Predicate",
    "PrefixState",
    "QuantileBinarizer",
    "RawDataset",
    "Rule",
    "RuleList",
    "SchemaMismatch",
    "SearchConfig",
    "SearchResult",
    "SearchTrace",
    "SoftFallingRuleListClassifier",
    "ZeroCapture",
    "apply_predicates",
    "binarize",
    "empty_prefix",
    "evaluate",
    "extend",
    "fit_predicates",
    "g_infimum",
    "is_feasible",
    "load_csv",
    "mine",
    "objective_L",
    "passes_necessary_condition",
    "prefix_bound_frl",
    "prefix_bound_soft",
    "render_rulelist",
    "roc_sweep",
    "run_frl",
    "run_soft_frl",
    "should_terminate",
    "soft_objective",
    "split",
]
