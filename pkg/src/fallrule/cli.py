"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 oracle violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import oracle
from .data import Predicate, apply_predicates, fit_predicates, load_csv, split_raw
from .evaluation import evaluate, render_rulelist, roc_sweep, write_csv
from .exceptions import DataError, OracleGuardError, ZeroCapture
from .mining import AntecedentSet, mine
from .model import Model, used_predicates
from .rulelist import dumps
from .search import SearchConfig, run_frl, run_soft_frl

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ORACLE = 0, 1, 2, 3
ANTECEDENTS_FORMAT = "fallrule-antecedents/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _data_args(p: argparse.ArgumentParser, split_default=None) -> None:
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--label-col", required=True)
    p.add_argument("--positive-value", required=True, help="label value of the positive class")
    p.add_argument("--sep", default=",", help="field delimiter (default: ,)")
    p.add_argument("--bins", type=int, default=4, help="quantile bins per numeric column")
    p.add_argument("--split", type=float, default=split_default, help="train fraction; omit to use every row")
    p.add_argument("--seed", type=int, default=0, help="seed for the split and the search")


def _mining_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-preds", type=int, default=2, choices=(1, 2))
    p.add_argument("--min-support", type=float, default=0.1, help="minimum support within either class")


def _search_args(p: argparse.ArgumentParser, soft: bool) -> None:
    p.add_argument("--w", type=float, default=1.0, help="false-negative weight")
    p.add_argument("--c", type=float, default=1e-6, help="cost per rule")
    if soft:
        p.add_argument("--c1", type=float, default=0.5, help="monotonicity penalty")
    p.add_argument("--iters", type=int, default=3000)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5, help="curiosity mixing weight")
    p.add_argument("--p-term", type=float, default=0.05, help="early termination probability")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fallrule", description="Learn and evaluate falling rule lists.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mine", help="mine candidate antecedents")
    _data_args(p)
    _mining_args(p)
    p.add_argument("--out", help="antecedent JSON (default: stdout)")

    for name, soft in (("train-frl", False), ("train-softfrl", True)):
        p = sub.add_parser(name, help=f"train a {'softly ' if soft else ''}falling rule list")
        _data_args(p)
        _mining_args(p)
        _search_args(p, soft)
        p.add_argument("--antecedents", help="antecedent JSON from `mine` (default: mine now)")
        p.add_argument("--out", help="model JSON")
        p.add_argument("--trace", help="per-iteration loss trace CSV")
        p.add_argument("--debug-checks", action="store_true", help="verify bounds and compatibility while searching")

    p = sub.add_parser("eval", help="evaluate a model on labelled data")
    p.add_argument("--model", required=True)
    _data_args(p)
    p.add_argument("--part", choices=("train", "test", "all"), default="all", help="which side of --split to use")
    p.add_argument("--w", type=float, help="weight for the threshold (default: the model's)")
    p.add_argument("--out", help="metrics CSV")

    p = sub.add_parser("roc-sweep", help="train both algorithms over a grid of w")
    _data_args(p, split_default=0.8)
    _mining_args(p)
    _search_args(p, soft=True)
    p.add_argument("--w-values", default="1,3,5,7,9,11,13,15,17,19")
    p.add_argument("--out", help="ROC CSV (default: stdout)")

    p = sub.add_parser("oracle-check", help="compare pruning bounds with exhaustive enumeration")
    p.add_argument("--max-antecedents", type=int, default=8)
    p.add_argument("--max-rows", type=int, default=60)
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("render", help="print a model as an IF / ELSE IF table")
    p.add_argument("--model", required=True)
    return parser


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_split(args):
    raw = load_csv(args.data, args.label_col, args.positive_value, args.sep)
    if args.split is None:
        return raw, None
    return split_raw(raw, args.split, args.seed)


def _prepare_training(args):
    train_raw, test_raw = _load_split(args)
    source = getattr(args, "antecedents", None)
    if source:
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
        if doc.get("format") != ANTECEDENTS_FORMAT:
            raise DataError(f"{source} is not an antecedent file")
        predicates = [Predicate.from_dict(p) for p in doc["predicates"]]
        train = apply_predicates(train_raw, predicates)
        antecedents = AntecedentSet.from_json(json.dumps(doc["antecedents"]), train)
    else:
        predicates = fit_predicates(train_raw, args.bins)
        train = apply_predicates(train_raw, predicates)
        antecedents = mine(train, args.max_preds, Fraction(str(args.min_support)))
    return train, test_raw, predicates, antecedents


def _config(args, soft: bool) -> SearchConfig:
    return SearchConfig(
        w=args.w,
        C=args.c,
        C1=args.c1 if soft else 0.5,
        T=args.iters,
        seed=args.seed,
        lam=args.lam,
        p_terminate=args.p_term,
        debug=getattr(args, "debug_checks", False),
    )


def cmd_mine(args) -> int:
    train_raw, _ = _load_split(args)
    predicates = fit_predicates(train_raw, args.bins)
    train = apply_predicates(train_raw, predicates)
    antecedents = mine(train, args.max_preds, Fraction(str(args.min_support)))
    doc = {
        "format": ANTECEDENTS_FORMAT,
        "predicates": [p.to_dict() for p in predicates],
        "antecedents": json.loads(antecedents.to_json()),
    }
    _emit(dumps(doc), args.out)
    print(f"{len(predicates)} predicates, {len(antecedents)} antecedents", file=sys.stderr)
    return EXIT_OK


def cmd_train(args, soft: bool) -> int:
    train, _, predicates, antecedents = _prepare_training(args)
    config = _config(args, soft)
    result = (run_soft_frl if soft else run_frl)(train, antecedents, config)
    params = {
        "algorithm": "softfrl" if soft else "frl",
        "w": args.w,
        "C": args.c,
        "iters": args.iters,
        "seed": args.seed,
        "lambda": args.lam,
        "p_terminate": args.p_term,
        "bins": args.bins,
        "split": args.split,
        "n_antecedents": len(antecedents),
    }
    if soft:
        params["C1"] = args.c1
    model = Model(result.rule_list, used_predicates(result.rule_list, predicates), params, result.objective)
    if args.out:
        model.save(args.out)
    if args.trace:
        result.trace.to_csv(args.trace)
    sys.stdout.write(render_rulelist(result.rule_list))
    print(f"objective {float(result.objective):.10g}")
    return EXIT_OK


def cmd_eval(args) -> int:
    model = Model.load(args.model)
    raw = load_csv(args.data, args.label_col, args.positive_value, args.sep)
    if args.part != "all":
        if args.split is None:
            raise UsageError("--part train/test needs --split")
        train_raw, test_raw = split_raw(raw, args.split, args.seed)
        raw = train_raw if args.part == "train" else test_raw
    w = args.w if args.w is not None else model.params.get("w", 1.0)
    report = evaluate(model.rule_list, model.binarize(raw), w)
    row = report.to_dict()
    for key in ("tp", "fp", "tn", "fn", "tpr", "fpr", "weighted_loss", "w", "tau"):
        print(f"{key} {row[key]}")
    if args.out:
        write_csv([row], args.out, fields=list(row))
    return EXIT_OK


def cmd_roc(args) -> int:
    train, test_raw, predicates, antecedents = _prepare_training(args)
    if test_raw is None:
        raise UsageError("roc-sweep needs --split")
    test = apply_predicates(test_raw, predicates)
    try:
        w_values = [float(v) for v in args.w_values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad --w-values {args.w_values!r}") from None
    rows = roc_sweep(train, test, w_values, _config(args, soft=True), antecedents)
    write_csv(rows, args.out or sys.stdout)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.max_antecedents > oracle.MAX_ANTECEDENTS or args.max_len > oracle.MAX_LEN:
        raise OracleGuardError(f"oracle limited to {oracle.MAX_ANTECEDENTS} antecedents and length {oracle.MAX_LEN}")
    if args.max_antecedents < 1 or args.max_rows < 4 or args.trials < 1:
        raise UsageError("need at least one antecedent, four rows and one trial")
    rng = np.random.default_rng(args.seed)
    checked = 0
    for trial in range(args.trials):
        n = int(rng.integers(4, args.max_rows + 1))
        m = int(rng.integers(1, args.max_antecedents + 1))
        dataset, antecedents = oracle.random_instance(rng, n, m)
        w = Fraction(int(rng.choice([1, 3, 5, 7])))
        C = Fraction(int(rng.integers(0, 21)), 1000)
        C1 = Fraction(int(rng.choice([1, 10, 50, 100, 1000])), 100)
        depth = int(rng.integers(0, min(3, m, args.max_len) + 1))
        prefix = [int(l) for l in rng.permutation(m)[:depth]]
        try:
            oracle.build_prefix(dataset, antecedents, prefix, w)
        except ZeroCapture:
            continue
        violations = oracle.check_prefix(dataset, antecedents, prefix, w, C, C1, args.max_len)
        checked += 1
        if violations:
            for v in violations:
                print(f"VIOLATION {v.kind}: {v.detail}", file=sys.stderr)
            print(json.dumps({"trial": trial, "seed": args.seed, **violations[0].reproducer}, sort_keys=True))
            return EXIT_ORACLE
    print(f"ok: {checked} prefixes checked, no violations")
    return EXIT_OK


def cmd_render(args) -> int:
    sys.stdout.write(render_rulelist(Model.load(args.model).rule_list))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handlers = {
        "mine": cmd_mine,
        "train-frl": lambda a: cmd_train(a, soft=False),
        "train-softfrl": lambda a: cmd_train(a, soft=True),
        "eval": cmd_eval,
        "roc-sweep": cmd_roc,
        "oracle-check": cmd_oracle,
        "render": cmd_render,
    }
    try:
        return handlers[args.command](args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, OracleGuardError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # bad parameter values (w <= 0, fractions out of range, ...)
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
