"""Shared pytest fixtures for all tests."""

import json
import random
import sys
from pathlib import Path
from typing import Dict

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from algebra import AlgebraPair, FiniteAlgebra, load_algebra
from selftest import random_algebra, random_unary_algebra


FIXTURES = Path(__file__).parent.parent / "fixtures"
FIXTURE_NAMES = ["bool", "loop", "swap", "chain", "powerset2", "z3", "empty2"]


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


@pytest.fixture
def bool_alg() -> FiniteAlgebra:
    """The two-element boolean algebra with or, not and both truth values."""
    return load_algebra(str(fixture_path("bool")))


@pytest.fixture
def loop_alg() -> FiniteAlgebra:
    return load_algebra(str(fixture_path("loop")))


@pytest.fixture
def swap_alg() -> FiniteAlgebra:
    return load_algebra(str(fixture_path("swap")))


@pytest.fixture
def chain_alg() -> FiniteAlgebra:
    """({a,b}, S) with S(a) = b and S(b) = b."""
    return load_algebra(str(fixture_path("chain")))


@pytest.fixture
def powerset2_alg() -> FiniteAlgebra:
    """Subsets of {1,2} under cup and comp, no constants."""
    return load_algebra(str(fixture_path("powerset2")))


@pytest.fixture
def z3_alg() -> FiniteAlgebra:
    return load_algebra(str(fixture_path("z3")))


@pytest.fixture
def empty2_alg() -> FiniteAlgebra:
    return load_algebra(str(fixture_path("empty2")))


@pytest.fixture
def rng() -> random.Random:
    """Seeded generator so counted suites are reproducible."""
    return random.Random(20240601)


@pytest.fixture
def broken_file(tmp_path) -> Path:
    """An algebra file whose S table misses a row entry."""
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({
        "name": "broken",
        "universe": ["a", "b"],
        "operations": [{"name": "S", "arity": 1, "table": ["a"]}],
    }))
    return path


def write_algebra(tmp_path: Path, alg: FiniteAlgebra, name: str = None) -> Path:
    """Write an algebra into tmp_path and return its path."""
    path = tmp_path / f"{name or alg.name}.json"
    path.write_text(json.dumps(alg.to_dict()))
    return path


def make_unary_pair(rng: random.Random, max_size: int = 3, symbols=("f", "g"),
                    constant: bool = False) -> AlgebraPair:
    """Random pair of unary algebras over a shared random symbol subset."""
    chosen = symbols[:rng.randint(1, len(symbols))]
    first = random_unary_algebra(rng, rng.randint(1, max_size), chosen, constant, "A")
    second = random_unary_algebra(rng, rng.randint(1, max_size), chosen, constant, "B")
    return AlgebraPair(first, second)


def make_algebra(rng: random.Random, size: int, signature: Dict[str, int], name: str = "A") -> FiniteAlgebra:
    return random_algebra(rng, size, signature, name)
