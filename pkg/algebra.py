"""
Finite algebras

A finite algebra is a universe of opaque element ids plus one dense
operation table per symbol. This module loads and validates algebra files,
evaluates terms, computes image sets (the elements a term generalizes), the
semantic generalization ordering, and homomorphisms between algebras.
"""

import json
from dataclasses import dataclass
from itertools import permutations, product
from math import factorial
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from terms import Signature, Term, TermError, Var, variables


ElementSet = Tuple[str, ...]
ElementMap = Dict[str, str]

DEFAULT_HOMOMORPHISM_BUDGET = 10 ** 6


class AlgebraValidationError(ValueError):
    """Raised when an algebra document or table breaks an algebra invariant."""
    pass


class UnknownElementError(ValueError):
    """Raised when an element id is not in the universe."""
    pass


class UnassignedVariableError(ValueError):
    """Raised when evaluation meets a variable without a value."""
    pass


class BudgetExceededError(RuntimeError):
    """Raised when an exhaustive construction would exceed its configured cap."""

    def __init__(self, what: str, limit: int, reached: int):
        super().__init__(f"{what} exceeds budget: {reached} > {limit}")
        self.what = what
        self.limit = limit
        self.reached = reached


@dataclass(frozen=True, eq=False)
class Operation:
    """Table of one symbol: shape (n,) * arity, entries are universe positions."""

    name: str
    arity: int
    table: np.ndarray

    def constant(self) -> int:
        return int(self.table)


class FiniteAlgebra:
    """A finite universe with total operation tables, immutable once built."""

    def __init__(self, name: str, universe: Sequence[str], operations: Iterable[Operation]):
        self.name = name
        self.universe: Tuple[str, ...] = tuple(universe)
        self.operations: Dict[str, Operation] = {}
        for op in sorted(operations, key=lambda o: o.name):
            op.table.flags.writeable = False
            self.operations[op.name] = op
        self._positions = {element: i for i, element in enumerate(self.universe)}
        self.signature = Signature(tuple((op.name, op.arity) for op in self.operations.values()))

    def __repr__(self) -> str:
        return f"FiniteAlgebra({self.name!r}, |A|={self.size}, ops={self.signature.names()})"

    @property
    def size(self) -> int:
        return len(self.universe)

    def index(self, element: str) -> int:
        try:
            return self._positions[element]
        except KeyError:
            raise UnknownElementError(f"Unknown element {element!r} in algebra {self.name}")

    def element(self, position: int) -> str:
        return self.universe[position]

    def elements(self, positions: Iterable[int]) -> ElementSet:
        """Element ids for a set of positions, in universe order."""
        return tuple(self.universe[i] for i in sorted(set(positions)))

    def mask(self, elements: Iterable[str]) -> int:
        bits = 0
        for element in elements:
            bits |= 1 << self.index(element)
        return bits

    def from_mask(self, bits: int) -> ElementSet:
        return tuple(e for i, e in enumerate(self.universe) if bits >> i & 1)

    def unary_map(self, name: str) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.operations[name].table)

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "FiniteAlgebra":
        """
        Build an algebra from the JSON algebra format.

        Raises:
            AlgebraValidationError: On the first malformed field, missing
                table row or out-of-universe entry
        """
        validate_document(data)
        universe = list(data["universe"])
        positions = {e: i for i, e in enumerate(universe)}
        operations = []
        for spec in data["operations"]:
            table = np.vectorize(positions.__getitem__, otypes=[np.int64])(
                np.array(spec["table"], dtype=object)
            ) if spec["arity"] else np.array(positions[spec["table"]], dtype=np.int64)
            operations.append(Operation(spec["name"], spec["arity"], table))
        return FiniteAlgebra(data["name"], universe, operations)

    def to_dict(self) -> Dict[str, Any]:
        def rows(table):
            if table.ndim == 0:
                return self.universe[int(table)]
            return [rows(sub) for sub in table]

        return {
            "name": self.name,
            "universe": list(self.universe),
            "operations": [
                {"name": op.name, "arity": op.arity, "table": rows(op.table)}
                for op in self.operations.values()
            ],
        }


@dataclass(frozen=True)
class AlgebraPair:
    """Two algebras over the same signature; (A, A) is allowed."""

    first: FiniteAlgebra
    second: FiniteAlgebra

    def __post_init__(self):
        if self.first.signature != self.second.signature:
            raise AlgebraValidationError(
                f"Signatures differ: {self.first.signature.as_dict()} vs "
                f"{self.second.signature.as_dict()}"
            )

    @staticmethod
    def of(first: FiniteAlgebra, second: Optional[FiniteAlgebra] = None) -> "AlgebraPair":
        return AlgebraPair(first, second if second is not None else first)

    @property
    def signature(self) -> Signature:
        return self.first.signature

    @property
    def is_diagonal(self) -> bool:
        return self.first is self.second


# Loading and validation -------------------------------------------------

def load_algebra(path: str) -> FiniteAlgebra:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return FiniteAlgebra.from_dict(data)


def save_algebra(alg: FiniteAlgebra, path: str) -> Path:
    target = Path(path)
    with open(target, "w", encoding="utf-8") as f:
        json.dump(alg.to_dict(), f, indent=2)
        f.write("\n")
    return target


def validate_document(data: Any) -> None:
    """Check a decoded algebra file; raise on the first violation."""
    if not isinstance(data, dict):
        raise AlgebraValidationError("Algebra document must be an object")
    if not isinstance(data.get("name"), str):
        raise AlgebraValidationError("Field 'name' must be a string")
    universe = data.get("universe")
    if not isinstance(universe, list) or not universe:
        raise AlgebraValidationError("Field 'universe' must be a non-empty array")
    if not all(isinstance(e, str) for e in universe):
        raise AlgebraValidationError("Universe elements must be strings")
    if len(set(universe)) != len(universe):
        raise AlgebraValidationError("Universe elements must be distinct")
    operations = data.get("operations")
    if not isinstance(operations, list):
        raise AlgebraValidationError("Field 'operations' must be an array")

    members = set(universe)
    names = []
    for spec in operations:
        if not isinstance(spec, dict) or not isinstance(spec.get("name"), str):
            raise AlgebraValidationError("Every operation needs a string 'name'")
        name = spec["name"]
        arity = spec.get("arity")
        if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
            raise AlgebraValidationError(f"Operation {name!r}: arity must be a non-negative integer")
        if "table" not in spec:
            raise AlgebraValidationError(f"Operation {name!r}: missing table")
        _check_rows(name, spec["table"], arity, len(universe), members, [])
        names.append((name, arity))
    try:
        Signature(tuple(names))
    except TermError as e:
        raise AlgebraValidationError(str(e))


def _check_rows(name, rows, depth, n, members, path):
    where = "".join(f"[{i}]" for i in path)
    if depth == 0:
        if not isinstance(rows, str):
            raise AlgebraValidationError(
                f"Operation {name!r}: entry {where or '(constant)'} must be an element string"
            )
        if rows not in members:
            raise AlgebraValidationError(
                f"Operation {name!r}: entry {where or '(constant)'} is {rows!r}, not in the universe"
            )
        return
    if not isinstance(rows, list):
        raise AlgebraValidationError(f"Operation {name!r}: row {where or '(top)'} must be an array")
    if len(rows) != n:
        raise AlgebraValidationError(
            f"Operation {name!r}: row {where or '(top)'} has {len(rows)} entries, expected {n}"
        )
    for i, sub in enumerate(rows):
        _check_rows(name, sub, depth - 1, n, members, path + [i])


def validate(alg: FiniteAlgebra, sig: Signature) -> None:
    """
    Check that alg interprets exactly the symbols of sig with total, closed tables.

    Raises:
        AlgebraValidationError: On the first missing table, arity mismatch
            or out-of-universe entry
    """
    n = alg.size
    for name, arity in sig.symbols:
        op = alg.operations.get(name)
        if op is None:
            raise AlgebraValidationError(f"Missing table for symbol {name!r}")
        if op.arity != arity:
            raise AlgebraValidationError(
                f"Symbol {name!r} has arity {arity} but its table has arity {op.arity}"
            )
        if op.table.shape != (n,) * arity:
            raise AlgebraValidationError(
                f"Table of {name!r} has shape {op.table.shape}, expected {(n,) * arity}"
            )
        if op.table.size and (op.table.min() < 0 or op.table.max() >= n):
            raise AlgebraValidationError(f"Table of {name!r} has entries outside the universe")
    extra = set(alg.operations) - set(sig.names())
    if extra:
        raise AlgebraValidationError(f"Tables for symbols not in the signature: {sorted(extra)}")


# Evaluation -------------------------------------------------------------

def term_function(t: Term, alg: FiniteAlgebra, order: Sequence[int]) -> np.ndarray:
    """
    Dense table of the term function of t.

    Args:
        t: Term whose variables all occur in order
        alg: Algebra to evaluate in
        order: Variable indices; assignments run row-major over them

    Returns:
        Array of universe positions, one per assignment (length n ** len(order))
    """
    n = alg.size
    k = len(order)
    count = n ** k
    if k:
        grid = np.indices((n,) * k).reshape(k, count)
    else:
        grid = np.zeros((0, 1), dtype=np.int64)
    column = {index: i for i, index in enumerate(order)}

    def evaluate(node: Term) -> np.ndarray:
        if isinstance(node, Var):
            if node.index not in column:
                raise UnassignedVariableError(f"Variable {node} has no value")
            return grid[column[node.index]]
        op = alg.operations[node.symbol]
        if not node.args:
            return np.full(count, op.constant(), dtype=np.int64)
        return op.table[tuple(evaluate(arg) for arg in node.args)]

    return evaluate(t)


def eval_term(t: Term, alg: FiniteAlgebra, assignment: Mapping[int, str]) -> str:
    """Value of t under an assignment of variable indices to elements."""
    if isinstance(t, Var):
        if t.index not in assignment:
            raise UnassignedVariableError(f"Variable {t} has no value")
        alg.index(assignment[t.index])
        return assignment[t.index]
    op = alg.operations[t.symbol]
    if not t.args:
        return alg.element(op.constant())
    values = tuple(alg.index(eval_term(arg, alg, assignment)) for arg in t.args)
    return alg.element(int(op.table[values]))


def image(t: Term, alg: FiniteAlgebra) -> ElementSet:
    """All values of t over every assignment to its variables (never empty)."""
    return alg.elements(np.unique(term_function(t, alg, variables(t))).tolist())


def image_mask(t: Term, alg: FiniteAlgebra) -> int:
    return alg.mask(image(t, alg))


def is_generalization(t: Term, a: str, alg: FiniteAlgebra) -> bool:
    alg.index(a)
    return a in image(t, alg)


def semantic_leq(s: Term, t: Term, pair: AlgebraPair) -> bool:
    """s ⊑ t: both image sets of s are contained in those of t."""
    return (set(image(s, pair.first)) <= set(image(t, pair.first))
            and set(image(s, pair.second)) <= set(image(t, pair.second)))


def semantic_equiv(s: Term, t: Term, pair: AlgebraPair) -> bool:
    return semantic_leq(s, t, pair) and semantic_leq(t, s, pair)


def is_injective_algebra(alg: FiniteAlgebra) -> bool:
    """Every table of arity >= 1 is injective on full argument tuples."""
    for op in alg.operations.values():
        if op.arity == 0:
            continue
        if np.unique(op.table).size != op.table.size:
            return False
    return True


# Homomorphisms ----------------------------------------------------------

def check_homomorphism(h: Mapping[str, str], pair: AlgebraPair) -> bool:
    """True iff h: first -> second commutes with every table, constants included."""
    source, target = pair.first, pair.second
    if set(h) != set(source.universe):
        return False
    try:
        hmap = np.array([target.index(h[e]) for e in source.universe], dtype=np.int64)
    except UnknownElementError:
        return False
    return _commutes(hmap, pair)


def _commutes(hmap: np.ndarray, pair: AlgebraPair) -> bool:
    for name, op in pair.first.operations.items():
        other = pair.second.operations[name]
        if op.arity == 0:
            if hmap[op.constant()] != other.constant():
                return False
            continue
        if not np.array_equal(hmap[op.table], other.table[np.ix_(*([hmap] * op.arity))]):
            return False
    return True


def enumerate_homomorphisms(pair: AlgebraPair, iso_only: bool = False,
                            budget: int = DEFAULT_HOMOMORPHISM_BUDGET) -> List[ElementMap]:
    """
    Every homomorphism (or isomorphism) from pair.first to pair.second.

    Candidates are visited in lexicographic order of target positions.

    Raises:
        BudgetExceededError: If the number of candidate maps exceeds budget
    """
    source, target = pair.first, pair.second
    n, m = source.size, target.size
    if iso_only:
        if n != m:
            return []
        candidates = factorial(n)
        maps = permutations(range(m))
    else:
        candidates = m ** n
        maps = product(range(m), repeat=n)
    if candidates > budget:
        raise BudgetExceededError("homomorphism candidates", budget, candidates)
    found = []
    for assignment in maps:
        hmap = np.array(assignment, dtype=np.int64)
        if _commutes(hmap, pair):
            found.append({source.element(i): target.element(j) for i, j in enumerate(assignment)})
    return found


def apply_map(h: Mapping[str, str], elements: Iterable[str], target: FiniteAlgebra) -> ElementSet:
    """Pointwise image of a set of elements, in target order."""
    return target.elements(target.index(h[e]) for e in elements)


def isomorphic_copy(alg: FiniteAlgebra, renaming: Mapping[str, str],
                    name: Optional[str] = None) -> FiniteAlgebra:
    """
    The algebra obtained by renaming elements; renaming is then an isomorphism.

    The copy lists its universe in sorted order of the new names, so its
    tables are genuinely permuted.
    """
    new_universe = sorted(renaming[e] for e in alg.universe)
    position = {e: i for i, e in enumerate(new_universe)}
    # old position -> new position
    perm = np.array([position[renaming[e]] for e in alg.universe], dtype=np.int64)
    inverse = np.argsort(perm)
    operations = []
    for op in alg.operations.values():
        if op.arity == 0:
            table = np.array(perm[op.constant()], dtype=np.int64)
        else:
            table = perm[op.table[np.ix_(*([inverse] * op.arity))]]
        operations.append(Operation(op.name, op.arity, table))
    return FiniteAlgebra(name or f"{alg.name}'", new_universe, operations)


def popcount(bits: int) -> int:
    return bin(bits).count("1")


def minimal_image_pairs(pairs: Iterable[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """
    The ⊆×⊆-minimal members of a family of image pairs.

    Image sets are bit masks over universe positions. Pairs are scanned by
    total size, so every non-minimal pair meets a minimal one below it
    before it is considered.
    """
    distinct = sorted(set(pairs), key=lambda p: (popcount(p[0]) + popcount(p[1]), p))
    minimal: List[Tuple[int, int]] = []
    for a, b in distinct:
        if not any(m & ~a == 0 and n & ~b == 0 for m, n in minimal):
            minimal.append((a, b))
    return minimal
