#!/usr/bin/env python3
"""
agu: algebraic anti-unification over finite algebras

Loads algebra files, dispatches one query per invocation, prints the report
to stdout and keeps a JSONL provenance log of what was computed.

Exit codes: 0 success, 1 input or validation error, 2 budget exceeded.
"""

import argparse
import json
import sys
import threading
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from algebra import (
    AlgebraPair, AlgebraValidationError, BudgetExceededError, FiniteAlgebra, load_algebra,
)
from clone_engine import characteristic_gens, generate_clone, is_characteristic_set, k_generalizations
from fragments import fragment_gens, monolinear_antiunify
from query_config import (
    QueryConfigBuilder, QueryConfigError, compute_changes_from_default, parse_fragment, split_list,
)
from report import (
    render_charset, render_check, render_generalizations, render_selftest, render_type,
    render_up_set, report_dot,
)
from selftest import run_selftest
from setwise import setwise_antiunify
from terms import parse_term
from unary_engine import Semiautomaton, classify_k_type, classify_type, minimal_report, up_set_dfa


EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2


class UsageError(Exception):
    """Raised instead of argparse's own exit on bad command lines."""
    pass


class ProvenanceLogger:
    """Appends one JSON object per event to a JSONL file, if one is set."""

    def __init__(self, log_file: Optional[str] = None, verbose: bool = False):
        self.log_file = log_file
        self.verbose = verbose
        self.lock = threading.Lock()

    def set_log_file(self, log_file: Optional[str]):
        with self.lock:
            self.log_file = log_file

    def log_event(self, actor: str, action: str, details: Dict[str, Any] = None, message: str = None):
        """Log a single event with timestamp and full context."""
        entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "actor": actor,
            "action": action
        }

        if details:
            entry["details"] = details
        if message:
            entry["message"] = message

        with self.lock:
            if self.log_file:
                with open(self.log_file, "a") as f:
                    f.write(json.dumps(entry, ensure_ascii=False) + "\n")

        # stdout carries the report only
        if self.verbose:
            print(f"[{actor}] {message or action}", file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=QueryConfigBuilder.VALID_FORMATS,
                        default=argparse.SUPPRESS, help="Output format (default: text)")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                        help="Cap on clone functions, monoid elements and homomorphism candidates")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Seed for selftest")
    common.add_argument("--log", default=argparse.SUPPRESS, help="Append provenance events to this JSONL file")
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="Echo progress to stderr")

    parser = _Parser(
        prog="agu",
        description="Algebraic anti-unification over finite algebras",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        parents=[common],
        epilog="""
Examples:
  agu check fixtures/bool.json
  agu antiunify fixtures/loop.json --left a --right a
  agu antiunify fixtures/bool.json --left 0 --right 1 -k 2
  agu characteristic fixtures/bool.json --element 1 -k 2
  agu check-charset fixtures/powerset2.json --element "{1,2}" --terms "cup(x1,comp(x1))" -k 1
  agu type fixtures/chain.json
        """
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    check = sub.add_parser("check", parents=[common], help="Validate an algebra file")
    check.add_argument("file")

    gens = sub.add_parser("gens", parents=[common], help="DFA for the generalizations of an element")
    gens.add_argument("file")
    gens.add_argument("--element", required=True)
    gens.add_argument("--dot", help="Also write the DFA as DOT to this file")
    gens.add_argument("--witnesses", type=int)

    anti = sub.add_parser("antiunify", parents=[common], help="Minimal generalizations of two elements")
    anti.add_argument("files", nargs="+", metavar="file")
    anti.add_argument("--left", required=True)
    anti.add_argument("--right", required=True)
    anti.add_argument("-k", type=int, help="Variables x1..xk (clone engine)")
    anti.add_argument("--monolinear", action="store_true", help="One occurrence of a single variable")
    anti.add_argument("--fragment", help="K,L: k variables, each at most L times (L may be inf)")
    anti.add_argument("--max-size", type=int, dest="max_size", help="Term size bound for fragment search")
    anti.add_argument("--dot", help="Also write the accepting automaton as DOT to this file")
    anti.add_argument("--witnesses", type=int)

    anti_set = sub.add_parser("antiunify-set", parents=[common], help="Minimal generalizations of two element sets")
    anti_set.add_argument("files", nargs="+", metavar="file")
    anti_set.add_argument("--left", required=True, help="Comma-separated elements")
    anti_set.add_argument("--right", required=True, help="Comma-separated elements")
    anti_set.add_argument("-k", type=int)
    anti_set.add_argument("--dot")
    anti_set.add_argument("--witnesses", type=int)

    type_cmd = sub.add_parser("type", parents=[common], help="Generalization type of an algebra pair")
    type_cmd.add_argument("files", nargs="+", metavar="file")
    type_cmd.add_argument("-k", type=int, help="Classify terms over x1..xk (clone engine)")

    char = sub.add_parser("characteristic", parents=[common], help="Characteristic generalizations")
    char.add_argument("file")
    char.add_argument("--element", required=True)
    char.add_argument("-k", type=int)
    char.add_argument("--dot")
    char.add_argument("--witnesses", type=int)

    charset = sub.add_parser("check-charset", parents=[common], help="Decide a characteristic set")
    charset.add_argument("file")
    charset.add_argument("--element", required=True)
    charset.add_argument("--terms", required=True, help="Comma-separated terms")
    charset.add_argument("-k", type=int)

    self_test = sub.add_parser("selftest", parents=[common], help="Randomized engine cross-checks")
    self_test.add_argument("--cases", type=int)
    return parser


def build_config(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Turn parsed arguments into a validated query config.

    Raises:
        QueryConfigError: On invalid settings
    """
    builder = QueryConfigBuilder.load_default()
    builder.with_query(args.command)
    files = getattr(args, "files", None) or ([args.file] if getattr(args, "file", None) else [])
    if files:
        builder.with_inputs(files)
    if getattr(args, "element", None) is not None:
        builder.with_elements([args.element])
    if getattr(args, "left", None) is not None:
        builder.with_elements(split_list(args.left), split_list(args.right))
    if getattr(args, "terms", None) is not None:
        builder.with_terms(split_list(args.terms))
    if getattr(args, "k", None) is not None:
        builder.with_k(args.k)
    if getattr(args, "fragment", None):
        builder.with_fragment(*parse_fragment(args.fragment))
    if getattr(args, "monolinear", False):
        builder.with_monolinear()
    if getattr(args, "max_size", None) is not None:
        builder.with_max_size(args.max_size)
    if getattr(args, "witnesses", None) is not None:
        builder.with_witnesses(args.witnesses)
    if getattr(args, "cases", None) is not None:
        if args.cases < 1:
            raise QueryConfigError(f"selftest_cases must be a positive integer (got {args.cases})")
        builder.config["selftest_cases"] = args.cases
    if hasattr(args, "format"):
        builder.with_format(args.format)
    if hasattr(args, "budget"):
        builder.with_budget(args.budget)
    if hasattr(args, "seed"):
        builder.with_seed(args.seed)
    return builder.validate()


class QueryRunner:
    """Runs one validated query and returns (output, exit code)."""

    def __init__(self, config: Dict[str, Any], logger: ProvenanceLogger, k_given: bool,
                 started: Optional[float] = None):
        self.config = config
        self.logger = logger
        self.k_given = k_given
        self.started = started if started is not None else time.time()
        self.budget = config["clone_budget"]

    def load(self, path: str) -> FiniteAlgebra:
        alg = load_algebra(path)
        self.logger.log_event(
            "loader", "algebra_loaded",
            details={"path": path, "name": alg.name, "size": alg.size,
                     "signature": alg.signature.as_dict()},
            message=f"Loaded {alg.name} ({alg.size} elements)"
        )
        return alg

    def load_pair(self) -> AlgebraPair:
        inputs = self.config["inputs"]
        first = self.load(inputs[0])
        second = self.load(inputs[1]) if len(inputs) > 1 else None
        return AlgebraPair.of(first, second)

    def use_unary(self, pair: AlgebraPair) -> bool:
        return not self.k_given and pair.signature.max_arity <= 1

    def clone(self, pair: AlgebraPair, k: int):
        clone = generate_clone(pair, k, self.budget)
        self.logger.log_event(
            "clone_engine", "clone_generated",
            details={"k": k, "functions": len(clone), "rules": len(clone.rules)},
            message=f"Generated {len(clone)} term functions for k = {k}"
        )
        return clone

    def semiautomaton(self, pair: AlgebraPair) -> Semiautomaton:
        sa = Semiautomaton.from_pair(pair, self.budget)
        self.logger.log_event(
            "unary_engine", "monoid_built",
            details={"elements": len(sa.monoid()), "letters": list(sa.alphabet)},
            message=f"Transition monoid has {len(sa.monoid())} elements"
        )
        return sa

    def write_dot(self, path: Optional[str], text: str) -> None:
        if path:
            Path(path).write_text(text)

    def run(self, args: argparse.Namespace) -> Tuple[str, int]:
        handler = getattr(self, "run_" + self.config["query"].replace("-", "_"))
        return handler(args)

    def run_check(self, args) -> Tuple[str, int]:
        path = self.config["inputs"][0]
        fmt = self.config["format"]
        try:
            alg = self.load(path)
        except (AlgebraValidationError, json.JSONDecodeError) as e:
            return render_check(Path(path).name, str(e), self.config, fmt), EXIT_INPUT
        return render_check(alg.name, None, self.config, fmt), EXIT_OK

    def run_gens(self, args) -> Tuple[str, int]:
        alg = self.load(self.config["inputs"][0])
        element = self.config["left"][0]
        dfa = up_set_dfa(element, alg)
        self.write_dot(args.dot, dfa.to_dot(f"up_{element}"))
        return render_up_set(dfa, element, self.config, self.config["format"],
                             self.config["witnesses"]), EXIT_OK

    def run_antiunify(self, args) -> Tuple[str, int]:
        config = self.config
        pair = self.load_pair()
        a, b = config["left"][0], config["right"][0]
        k_note = None
        if config["monolinear"]:
            report = monolinear_antiunify(a, b, pair, self.budget)
        elif config["fragment"] is not None:
            k, ell = config["fragment"]
            report = fragment_gens(a, b, pair, k, None if ell == "inf" else ell,
                                   config["max_term_size"], self.budget)
            k_note = k
        elif self.use_unary(pair):
            sa = self.semiautomaton(pair)
            report = minimal_report(sa, 1 << pair.first.index(a), 1 << pair.second.index(b))
        else:
            k_note = config["k"]
            report = k_generalizations(a, b, pair, k_note, clone=self.clone(pair, k_note))
        return self.finish(args, report, k_note)

    def run_antiunify_set(self, args) -> Tuple[str, int]:
        pair = self.load_pair()
        k_note = None if self.use_unary(pair) else self.config["k"]
        engine = "unary" if k_note is None else k_note
        report = setwise_antiunify(self.config["left"], self.config["right"], pair, engine, self.budget)
        return self.finish(args, report, k_note)

    def run_characteristic(self, args) -> Tuple[str, int]:
        alg = self.load(self.config["inputs"][0])
        k = self.config["k"]
        clone = self.clone(AlgebraPair.of(alg), k)
        report = characteristic_gens(self.config["left"][0], alg, k, clone=clone)
        return self.finish(args, report, k)

    def run_check_charset(self, args) -> Tuple[str, int]:
        alg = self.load(self.config["inputs"][0])
        k = self.config["k"]
        terms = [parse_term(text, alg.signature) for text in self.config["terms"]]
        verdict = is_characteristic_set(terms, self.config["left"][0], alg, k, self.budget)
        return render_charset(verdict, self.config["terms"], self.config["left"][0], k,
                              self.config, self.config["format"]), EXIT_OK

    def run_type(self, args) -> Tuple[str, int]:
        pair = self.load_pair()
        if self.use_unary(pair):
            result, k_note = classify_type(pair, self.budget), None
        else:
            k_note = self.config["k"]
            result = classify_k_type(pair, k_note, self.budget)
        return render_type(result, self.config, self.config["format"], k_note), EXIT_OK

    def run_selftest(self, args) -> Tuple[str, int]:
        results = run_selftest(self.config["seed"], self.config["selftest_cases"],
                               self.config["homomorphism_budget"])
        mismatches = sum(r["mismatches"] for r in results)
        output = render_selftest(results, self.config, self.config["format"])
        return output, EXIT_OK if mismatches == 0 else EXIT_INPUT

    def finish(self, args, report, k_note: Optional[int]) -> Tuple[str, int]:
        if getattr(args, "dot", None):
            self.write_dot(args.dot, report_dot(report))
        self.logger.log_event(
            "agu", "report_ready",
            details={"classes": report.classes, "cardinality": report.cardinality.label,
                     "trivial": report.trivial, "approximate": report.approximate},
            message=f"{report.classes} minimal pair(s), {report.cardinality.label}"
        )
        return render_generalizations(
            report, self.config, self.config["format"], self.config["witnesses"], k_note,
            round(time.time() - self.started, 6),
        ), EXIT_OK


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse argv, run the query, print the report.

    Returns:
        Exit code: 0 success, 1 input error, 2 budget exceeded
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as e:
        return int(e.code or 0)

    logger = ProvenanceLogger(getattr(args, "log", None), getattr(args, "verbose", False))
    start = time.time()
    try:
        config = build_config(args)
        default_config = QueryConfigBuilder.load_default().config
        changed, changes = compute_changes_from_default(default_config, config)
        logger.log_event(
            "agu", "query_start",
            details={"query": config, "changed_from_default": changed, "changes": changes},
            message=f"Starting {config['query']}"
        )
        runner = QueryRunner(config, logger, getattr(args, "k", None) is not None, start)
        output, code = runner.run(args)
        sys.stdout.write(output)
        logger.log_event(
            "agu", "query_complete",
            details={"exit_code": code, "duration_s": round(time.time() - start, 3)},
            message=f"Finished {config['query']} with exit code {code}"
        )
        return code
    except BudgetExceededError as e:
        logger.log_event(
            "agu", "budget_exceeded",
            details={"what": e.what, "limit": e.limit, "reached": e.reached},
            message=str(e)
        )
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (QueryConfigError, ValueError, OSError, KeyError) as e:
        logger.log_event("agu", "input_error", details={"error": str(e)}, message=f"Input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
