"""
Fragments

Generalizations restricted to terms in which each of the k variables occurs
at most ℓ times. The unrestricted case is the clone engine; the monolinear
fragment (one variable, one occurrence) reduces exactly to the unary engine
over translation letters; any other bound is searched up to a term size and
reported as approximate.

Also builds powerset algebras, the usual test bed for these fragments.
"""

from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from algebra import (
    AlgebraPair, BudgetExceededError, FiniteAlgebra, Operation, minimal_image_pairs,
)
from automata import Cardinality
from clone_engine import (
    DEFAULT_CLONE_BUDGET, TreeReport, generate_clone, k_generalizations, values_mask,
)
from terms import App, Term, Var, compositions
from unary_engine import GeneralizationReport, Letter, Semiautomaton, minimal_report


DEFAULT_MAX_TERM_SIZE = 8
MAX_POWERSET_BASE = 4
POWERSET_OPERATIONS = ("cup", "cap", "comp")


class PowersetSizeError(ValueError):
    """Raised when a powerset algebra would have more than 2^4 elements."""
    pass


# Monolinear fragment ---------------------------------------------------

def translation_letters(pair: AlgebraPair, budget: int = DEFAULT_CLONE_BUDGET):
    """
    Every elementary translation f(g1,…,x1,…,gm) with ground fillers.

    Fillers range over ground term values; each is printed by its shortest
    ground witness and the letter's weight is the number of filler term
    tuples with those values.

    Returns:
        (letters, ground clone)
    """
    ground = generate_clone(pair, 0, budget)
    counts, infinite = ground.term_counts()
    fillers = list(range(len(ground.functions)))
    letters: List[Letter] = []
    for name, arity in pair.signature.symbols:
        if arity == 0:
            continue
        table_a = pair.first.operations[name].table
        table_b = pair.second.operations[name].table
        for position in range(arity):
            for chosen in product(fillers, repeat=arity - 1):
                args: List[Term] = [ground.functions[s].witness for s in chosen]
                args.insert(position, Var(1))
                index_a = [np.array([ground.functions[s].first[0]]) for s in chosen]
                index_b = [np.array([ground.functions[s].second[0]]) for s in chosen]
                index_a.insert(position, np.arange(pair.first.size))
                index_b.insert(position, np.arange(pair.second.size))
                weight = 1
                for s in chosen:
                    weight = None if weight is None or s in infinite else weight * counts[s]
                context = App(name, tuple(args))
                letters.append(Letter(
                    name=str(context),
                    first=tuple(int(v) for v in table_a[tuple(index_a)].reshape(-1)),
                    second=tuple(int(v) for v in table_b[tuple(index_b)].reshape(-1)),
                    context=context,
                    weight=Cardinality(weight),
                ))
                if len(letters) > budget:
                    raise BudgetExceededError("translation letters", budget, len(letters))
    return letters, ground


def monolinear_antiunify(a: str, b: str, pair: AlgebraPair,
                         budget: int = DEFAULT_CLONE_BUDGET) -> GeneralizationReport:
    """
    Minimal generalizations with at most one occurrence of the single variable x1.

    A monolinear term is a path of translations ending in x1, or a ground
    term, so the query is a unary one over the translation letters.
    Without fillers or unary symbols the letter set is empty and only x1 and
    the ground terms remain.

    Raises:
        UnknownElementError: If a or b is not in its universe
        BudgetExceededError: When letters, monoid or ground terms exceed budget
    """
    letters, ground = translation_letters(pair, budget)
    sa = Semiautomaton(pair, letters, ground, budget)
    return minimal_report(sa, 1 << pair.first.index(a), 1 << pair.second.index(b))


# Bounded fragments -------------------------------------------------------

@dataclass
class _Entry:
    first: np.ndarray
    second: np.ndarray
    occurrences: Tuple[int, ...]
    witness: Term
    size: int
    count: int


def fragment_gens(a: str, b: str, pair: AlgebraPair, k: int, ell: Optional[int],
                  max_size: int = DEFAULT_MAX_TERM_SIZE,
                  budget: int = DEFAULT_CLONE_BUDGET):
    """
    Minimal generalizations of a and b within the (k, ℓ) fragment.

    Args:
        a: Element of pair.first
        b: Element of pair.second
        pair: Algebras to generalize in
        k: Number of variables
        ell: Occurrence bound per variable, None for unbounded
        max_size: Term size bound of the approximate search
        budget: Cap on functions (exact paths) or distinct entries (search)

    Returns:
        A TreeReport, or the monolinear GeneralizationReport for (1, 1)

    Raises:
        ValueError: If k < 1 or ell < 1
        BudgetExceededError: When the search exceeds budget
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if ell is not None and ell < 1:
        raise ValueError(f"Occurrence bound must be at least 1, got {ell}")
    if ell is None:
        return k_generalizations(a, b, pair, k, budget)
    if (k, ell) == (1, 1):
        return monolinear_antiunify(a, b, pair, budget)
    return bounded_fragment_gens(a, b, pair, k, ell, max_size, budget)


def bounded_fragment_gens(a: str, b: str, pair: AlgebraPair, k: int, ell: int,
                          max_size: int, budget: int = DEFAULT_CLONE_BUDGET) -> TreeReport:
    """
    Size-bounded search of the (k, ℓ) fragment.

    Terms are built by size and merged when they agree on both term
    functions and on the occurrence count of every variable; each entry
    keeps its first witness and the number of terms it merges. The result
    only reflects terms up to max_size.
    """
    left = 1 << pair.first.index(a)
    right = 1 << pair.second.index(b)
    entries = _enumerate_fragment(pair, k, ell, max_size, budget)

    def covers(entry: _Entry) -> bool:
        return (values_mask(entry.first.tolist()) & left == left
                and values_mask(entry.second.tolist()) & right == right)

    candidates = [e for e in entries if covers(e)]
    masks = {id(e): (values_mask(e.first.tolist()), values_mask(e.second.tolist())) for e in candidates}
    minimal = minimal_image_pairs(masks.values())
    minimal_set = set(minimal)
    accepted = [e for e in candidates if masks[id(e)] in minimal_set]
    witnesses = []
    for pair_masks in minimal:
        best = min((e for e in accepted if masks[id(e)] == pair_masks),
                   key=lambda e: (e.size, str(e.witness)))
        witnesses.append(best.witness)
    first, second = pair.first, pair.second
    accepted.sort(key=lambda e: (e.size, str(e.witness)))
    return TreeReport(
        k=k,
        left=first.from_mask(left),
        right=second.from_mask(right),
        minimal_pairs=tuple((first.from_mask(x), second.from_mask(y)) for x, y in minimal),
        witnesses=tuple(witnesses),
        finals=frozenset(),
        cardinality=Cardinality(sum(e.count for e in accepted)),
        trivial=bool(entries) and len(accepted) == len(entries),
        pair=pair,
        image_masks=tuple(minimal),
        accepted_witnesses=tuple(e.witness for e in accepted),
        approximate=True,
        search_bound=max_size,
        occurrence_bound=ell,
    )


def _enumerate_fragment(pair: AlgebraPair, k: int, ell: int, max_size: int,
                        budget: int) -> List[_Entry]:
    """
    Distinct (term functions, occurrence vector) keys up to max_size, with
    the total number of terms behind each.

    Levels keep one record per key and size so every term of the bounded
    search is counted exactly once.
    """
    first, second = pair.first, pair.second
    grid_a = np.indices((first.size,) * k).reshape(k, -1)
    grid_b = np.indices((second.size,) * k).reshape(k, -1)
    by_size: Dict[int, Dict[bytes, _Entry]] = {}
    totals: Dict[bytes, _Entry] = {}
    stored = 0

    def admit(level, row_a, row_b, occ, witness, size, count) -> None:
        nonlocal stored
        key = row_a.tobytes() + row_b.tobytes() + repr(occ).encode()
        if key in level:
            level[key].count += count
        else:
            stored += 1
            if stored > budget:
                raise BudgetExceededError("fragment entries", budget, stored)
            level[key] = _Entry(row_a, row_b, occ, witness, size, count)
        if key in totals:
            totals[key].count += count
        else:
            totals[key] = _Entry(row_a, row_b, occ, witness, size, count)

    symbols = sorted(pair.signature.symbols)
    for n in range(1, max_size + 1):
        level: Dict[bytes, _Entry] = {}
        if n == 1:
            for i in range(k):
                occ = tuple(1 if j == i else 0 for j in range(k))
                admit(level, grid_a[i], grid_b[i], occ, Var(i + 1), 1, 1)
            for name, arity in symbols:
                if arity == 0:
                    admit(
                        level,
                        np.full(grid_a.shape[1], first.operations[name].constant()),
                        np.full(grid_b.shape[1], second.operations[name].constant()),
                        (0,) * k, App(name), 1, 1,
                    )
        for name, arity in symbols:
            if arity == 0:
                continue
            table_a = first.operations[name].table
            table_b = second.operations[name].table
            for sizes in compositions(n - 1, arity):
                pools = [list(by_size.get(part, {}).values()) for part in sizes]
                for args in product(*pools):
                    occ = tuple(sum(arg.occurrences[j] for arg in args) for j in range(k))
                    if any(c > ell for c in occ):
                        continue
                    count = 1
                    for arg in args:
                        count *= arg.count
                    admit(
                        level,
                        table_a[tuple(arg.first for arg in args)],
                        table_b[tuple(arg.second for arg in args)],
                        occ, App(name, tuple(arg.witness for arg in args)), n, count,
                    )
        by_size[n] = level
    return list(totals.values())


# Powerset algebras ------------------------------------------------------

def subset_name(members: Sequence[str]) -> str:
    return "{" + ",".join(members) + "}"


def subset_constant(members: Sequence[str]) -> str:
    return "c_" + "_".join(members)


def powerset_algebra(base: Iterable, operations: Iterable[str] = ("cup",),
                     all_distinguished: bool = False) -> FiniteAlgebra:
    """
    The algebra of all subsets of a small base set.

    Elements are printed as "{}", "{1}", "{1,2}", ... in bitmask order of the
    base (as given). cup, cap and comp are union, intersection and
    complement; with all_distinguished every subset S is also the constant
    c_<members joined by _> (c_ for the empty set).

    Raises:
        PowersetSizeError: If the base has more than 4 members
        ValueError: On unknown or duplicate base members or operations
    """
    members = [str(m) for m in base]
    if len(set(members)) != len(members):
        raise ValueError(f"Duplicate base members: {members}")
    if len(members) > MAX_POWERSET_BASE:
        raise PowersetSizeError(
            f"Base has {len(members)} members, at most {MAX_POWERSET_BASE} are supported"
        )
    ops = list(operations)
    unknown = [op for op in ops if op not in POWERSET_OPERATIONS]
    if unknown:
        raise ValueError(f"Unknown powerset operations: {', '.join(unknown)}")
    n = 1 << len(members)
    subsets = [[m for i, m in enumerate(members) if bits >> i & 1] for bits in range(n)]
    universe = [subset_name(s) for s in subsets]
    masks = np.arange(n)
    tables = {
        "cup": (2, masks[:, None] | masks[None, :]),
        "cap": (2, masks[:, None] & masks[None, :]),
        "comp": (1, (n - 1) ^ masks),
    }
    result = [Operation(name, tables[name][0], tables[name][1].astype(np.int64)) for name in dict.fromkeys(ops)]
    if all_distinguished:
        result.extend(
            Operation(subset_constant(s), 0, np.array(bits, dtype=np.int64))
            for bits, s in enumerate(subsets)
        )
    return FiniteAlgebra(f"2^{subset_name(members)}", universe, result)
