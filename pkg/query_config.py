#!/usr/bin/env python3
"""
Query configuration

Validated settings for one anti-unification query, built fluently and
backed by the defaults in config.default.json.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union


DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent / "config.default.json"


class QueryConfigError(Exception):
    """Raised when query config validation fails."""
    pass


class QueryConfigBuilder:
    """Builder for creating and validating query configurations."""

    VALID_QUERIES = [
        "check", "gens", "antiunify", "antiunify-set", "type",
        "characteristic", "check-charset", "selftest",
    ]
    VALID_FORMATS = ["text", "machine", "dot"]
    # queries that read one or two algebra files
    TWO_INPUT_QUERIES = ["antiunify", "antiunify-set", "type"]

    def __init__(self):
        self.config: Dict[str, Any] = {
            "query": None,
            "inputs": [],
            "left": [],
            "right": [],
            "terms": [],
            "k": 2,
            "fragment": None,
            "monolinear": False,
            "max_term_size": 8,
            "clone_budget": 1000000,
            "homomorphism_budget": 1000000,
            "witnesses": 5,
            "format": "text",
            "seed": 0,
            "selftest_cases": 25,
        }

    def with_query(self, query: str) -> "QueryConfigBuilder":
        """
        Set the query kind.

        Raises:
            QueryConfigError: If query is not a known subcommand
        """
        if query not in self.VALID_QUERIES:
            raise QueryConfigError(
                f"Invalid query: {query}. Must be one of: {', '.join(self.VALID_QUERIES)}"
            )
        self.config["query"] = query
        return self

    def with_inputs(self, paths: Sequence[str]) -> "QueryConfigBuilder":
        """
        Set the algebra file paths (one, or two for a pair).

        Raises:
            QueryConfigError: If the list is empty, too long or has blanks
        """
        paths = list(paths)
        if not paths or len(paths) > 2:
            raise QueryConfigError(f"Expected one or two algebra files (got {len(paths)})")
        if any(not str(p).strip() for p in paths):
            raise QueryConfigError("Input paths contain empty values")
        self.config["inputs"] = [str(p) for p in paths]
        return self

    def with_elements(self, left: Sequence[str], right: Optional[Sequence[str]] = None) -> "QueryConfigBuilder":
        """
        Set the element arguments: the left (or only) elements and the right ones.

        Raises:
            QueryConfigError: On empty, blank or duplicate element ids
        """
        for side, values in (("left", left), ("right", right)):
            if values is None:
                continue
            values = [str(v).strip() for v in values]
            if any(not v for v in values):
                raise QueryConfigError(f"{side.title()} elements contain empty values")
            if len(values) != len(set(values)):
                raise QueryConfigError(f"{side.title()} elements contain duplicates")
            self.config[side] = values
        return self

    def with_terms(self, terms: Sequence[str]) -> "QueryConfigBuilder":
        terms = [t.strip() for t in terms]
        if not terms or any(not t for t in terms):
            raise QueryConfigError("Term list must be non-empty without blank terms")
        self.config["terms"] = terms
        return self

    def with_k(self, k: int) -> "QueryConfigBuilder":
        """
        Set the number of variables for clone queries.

        Raises:
            QueryConfigError: If k is not a positive integer
        """
        if not _is_int(k) or k < 1:
            raise QueryConfigError(f"k must be a positive integer (got {k!r})")
        self.config["k"] = k
        return self

    def with_fragment(self, k: int, ell: Union[int, str]) -> "QueryConfigBuilder":
        """
        Restrict to terms over k variables, each occurring at most ell times.

        Args:
            k: Number of variables
            ell: Occurrence bound, or "inf"

        Raises:
            QueryConfigError: If k < 1 or ell is neither "inf" nor positive
        """
        self.with_k(k)
        if ell != "inf" and (not _is_int(ell) or ell < 1):
            raise QueryConfigError(f"Occurrence bound must be a positive integer or 'inf' (got {ell!r})")
        self.config["fragment"] = [k, ell]
        return self

    def with_monolinear(self, enabled: bool = True) -> "QueryConfigBuilder":
        self.config["monolinear"] = enabled
        return self

    def with_max_size(self, size: int) -> "QueryConfigBuilder":
        if not _is_int(size) or size < 1:
            raise QueryConfigError(f"max_term_size must be a positive integer (got {size!r})")
        self.config["max_term_size"] = size
        return self

    def with_budget(self, budget: int) -> "QueryConfigBuilder":
        """
        Set the clone and homomorphism caps together.

        Raises:
            QueryConfigError: If budget is not a positive integer
        """
        if not _is_int(budget) or budget < 1:
            raise QueryConfigError(f"Budget must be a positive integer (got {budget!r})")
        self.config["clone_budget"] = budget
        self.config["homomorphism_budget"] = budget
        return self

    def with_format(self, fmt: str) -> "QueryConfigBuilder":
        if fmt not in self.VALID_FORMATS:
            raise QueryConfigError(
                f"Invalid format: {fmt}. Must be one of: {', '.join(self.VALID_FORMATS)}"
            )
        self.config["format"] = fmt
        return self

    def with_witnesses(self, count: int) -> "QueryConfigBuilder":
        if not _is_int(count) or count < 0:
            raise QueryConfigError(f"Witness count must be a non-negative integer (got {count!r})")
        self.config["witnesses"] = count
        return self

    def with_seed(self, seed: int) -> "QueryConfigBuilder":
        if not _is_int(seed):
            raise QueryConfigError(f"Seed must be an integer (got {seed!r})")
        self.config["seed"] = seed
        return self

    def validate(self) -> Dict[str, Any]:
        """
        Validate the configuration.

        Returns:
            The validated config dictionary

        Raises:
            QueryConfigError: If validation fails
        """
        config = self.config
        query = config.get("query")
        if query is None:
            raise QueryConfigError("Query kind is required")
        if query not in self.VALID_QUERIES:
            raise QueryConfigError(f"Invalid query: {query}")
        if query != "selftest" and not config["inputs"]:
            raise QueryConfigError(f"Query {query} needs an algebra file")
        if len(config["inputs"]) == 2 and query not in self.TWO_INPUT_QUERIES:
            raise QueryConfigError(f"Query {query} takes a single algebra file")

        for key in ("clone_budget", "homomorphism_budget", "max_term_size", "k", "selftest_cases"):
            if not _is_int(config[key]) or config[key] < 1:
                raise QueryConfigError(f"{key} must be a positive integer (got {config[key]!r})")
        if config["format"] not in self.VALID_FORMATS:
            raise QueryConfigError(f"Invalid format: {config['format']}")

        if query in ("gens", "characteristic", "check-charset") and len(config["left"]) != 1:
            raise QueryConfigError(f"Query {query} needs exactly one --element")
        if query == "antiunify" and (len(config["left"]) != 1 or len(config["right"]) != 1):
            raise QueryConfigError("antiunify needs exactly one --left and one --right element")
        if query == "antiunify-set" and (not config["left"] or not config["right"]):
            raise QueryConfigError("antiunify-set needs non-empty --left and --right sets")
        if query == "check-charset" and not config["terms"]:
            raise QueryConfigError("check-charset needs --terms")
        if config["monolinear"] and config["fragment"] is not None:
            raise QueryConfigError("--monolinear and --fragment are mutually exclusive")
        return config

    def save(self, path: str = "query.json") -> Path:
        config = self.validate()
        config_file_path = Path(path)
        with open(config_file_path, "w") as f:
            json.dump(config, f, indent=2)
        return config_file_path

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "QueryConfigBuilder":
        """
        Create a builder from an existing config dictionary; missing keys
        keep their defaults.
        """
        builder = QueryConfigBuilder()
        builder.config.update(data)
        return builder

    @staticmethod
    def load(path: str = "query.json") -> "QueryConfigBuilder":
        with open(path, "r") as f:
            data = json.load(f)
        return QueryConfigBuilder.from_dict(data)

    @staticmethod
    def load_default(path: Union[str, Path] = DEFAULT_CONFIG_PATH) -> "QueryConfigBuilder":
        """
        Load the default configuration template.

        Raises:
            FileNotFoundError: If config.default.json doesn't exist
        """
        if not Path(path).exists():
            raise FileNotFoundError(
                f"Default config not found: {path}\n"
                f"Repository may be corrupted. This file must exist."
            )
        return QueryConfigBuilder.load(str(path))


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def parse_fragment(text: str):
    """
    Parse "K,L" (L may be "inf") into (k, ell).

    Raises:
        QueryConfigError: On malformed text
    """
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise QueryConfigError(f"Fragment must look like K,L (got {text!r})")
    try:
        k = int(parts[0])
        ell: Union[int, str] = "inf" if parts[1] in ("inf", "∞") else int(parts[1])
    except ValueError:
        raise QueryConfigError(f"Fragment must look like K,L (got {text!r})")
    return k, ell


def split_list(text: str) -> List[str]:
    """Split a comma list, respecting parentheses and braces so terms and set names stay whole."""
    items, depth, current = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            items.append("".join(current).strip())
            current = []
            continue
        depth += {"(": 1, ")": -1, "{": 1, "}": -1}.get(ch, 0)
        current.append(ch)
    items.append("".join(current).strip())
    return [item for item in items if item]


def compute_changes_from_default(default_config: Dict[str, Any],
                                 new_config: Dict[str, Any]) -> tuple:
    """
    Compare a query config against the default template.

    Returns:
        tuple: (changed_field_names, detailed_changes_dict)
            - changed_field_names: List of field names that changed
            - detailed_changes_dict: Dict mapping field names to {old, new} values
    """
    changed_fields = []
    changes = {}

    for key in new_config:
        default_value = default_config.get(key)
        new_value = new_config[key]

        if default_value != new_value:
            changed_fields.append(key)
            changes[key] = {
                "old": default_value,
                "new": new_value
            }

    return changed_fields, changes
