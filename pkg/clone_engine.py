"""
Clone engine

Anti-unification in arbitrary finite algebras. For a fixed number k of
variables, every term over x1..xk induces a pair of term functions (one per
algebra). The finitely many reachable pairs, together with the symbol
applications between them, form a deterministic bottom-up tree automaton:
its states are term functions, and a term is accepted when its term
function is final. Minimal k-generalizations, characteristic
generalizations and term counts all read off this automaton.

k = 0 gives the ground terms: states are pairs of element values.
"""

import heapq
from collections import deque
from dataclasses import dataclass, field
from itertools import count as counter, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from algebra import (
    AlgebraPair, BudgetExceededError, ElementSet, FiniteAlgebra,
    image_mask, minimal_image_pairs, term_function,
)
from automata import EMPTY, INFINITE, Cardinality
from terms import App, Term, Var, occurrences, variables


DEFAULT_CLONE_BUDGET = 10 ** 6
# stored symbol applications allowed per admitted function
RULES_PER_FUNCTION = 16


class VariableRangeError(ValueError):
    """Raised when a term uses variables beyond x1..xk."""
    pass


@dataclass(frozen=True)
class TermFunction:
    """A pair of term-function tables realized by one witness term."""

    arity: int
    first: Tuple[int, ...]
    second: Tuple[int, ...]
    witness: Term
    size: int
    first_image: int
    second_image: int

    @property
    def image_pair(self) -> Tuple[int, int]:
        return (self.first_image, self.second_image)


Rule = Tuple[str, Tuple[int, ...], int]


@dataclass
class CloneGraph:
    """
    Reachable term functions for fixed k and the applications between them.

    functions are ordered by witness (size, then printed form); rules lists
    every symbol application (symbol, argument states, result state); leaves
    maps the size-1 terms (variables and constants) to their states.
    """

    pair: AlgebraPair
    k: int
    functions: List[TermFunction]
    rules: List[Rule]
    leaves: List[Tuple[Term, int]]
    index: Dict[bytes, int] = field(repr=False)
    _counts: Optional[Tuple[Dict[int, int], frozenset]] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.functions)

    @property
    def roots(self) -> List[int]:
        """States of the projections x1..xk."""
        return [state for term, state in self.leaves if isinstance(term, Var)]

    def lookup(self, t: Term) -> int:
        """State reached by a term over x1..xk."""
        if any(i > self.k for i in variables(t)):
            raise VariableRangeError(f"Term {t} uses variables beyond x{self.k}")
        order = list(range(1, self.k + 1))
        first = term_function(t, self.pair.first, order)
        second = first if self.pair.is_diagonal else term_function(t, self.pair.second, order)
        return self.index[_key(first, second, self.pair.is_diagonal)]

    def term_counts(self) -> Tuple[Dict[int, int], frozenset]:
        """
        Number of terms evaluating to each state.

        Returns:
            (counts for states with finitely many terms, states with infinitely many)
        """
        if self._counts is None:
            self._counts = _count_terms(len(self.functions), self.rules, self.leaves)
        return self._counts

    def cardinality(self, states: Iterable[int]) -> Cardinality:
        counts, infinite = self.term_counts()
        total = EMPTY
        for state in states:
            if state in infinite:
                return INFINITE
            total = total + Cardinality(counts[state])
        return total

    def to_dot(self, finals: Iterable[int] = (), name: str = "clone") -> str:
        """One node per term function; edges follow each witness's top symbol."""
        finals = set(finals)
        lines = [f'digraph "{name}" {{', "  rankdir=BT;"]
        for state, fn in enumerate(self.functions):
            shape = "doublecircle" if state in finals else "circle"
            label = (f"{fn.witness}\\n{set_text(self.pair.first, fn.first_image)}"
                     f" / {set_text(self.pair.second, fn.second_image)}")
            lines.append(f'  f{state} [shape={shape}, label="{label}"];')
        for symbol, args, result in self._witness_rules():
            for arg in args:
                lines.append(f'  f{arg} -> f{result} [label="{symbol}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def _witness_rules(self) -> List[Rule]:
        chosen = []
        for state, fn in enumerate(self.functions):
            if isinstance(fn.witness, App) and fn.witness.args:
                args = tuple(self.lookup(arg) for arg in fn.witness.args)
                chosen.append((fn.witness.symbol, args, state))
        return chosen


@dataclass(frozen=True)
class TreeReport:
    """
    Minimal k-generalizations as a regular tree language.

    finals are the accepting clone states; bounded fragment searches leave
    it empty, set approximate and record the term-size bound they used.
    """

    k: int
    left: ElementSet
    right: ElementSet
    minimal_pairs: Tuple[Tuple[ElementSet, ElementSet], ...]
    witnesses: Tuple[Term, ...]
    finals: frozenset
    cardinality: Cardinality
    trivial: bool
    pair: AlgebraPair = field(repr=False, compare=False)
    image_masks: Tuple[Tuple[int, int], ...] = field(repr=False, default=())
    accepted_witnesses: Tuple[Term, ...] = field(repr=False, default=())
    clone: Optional[CloneGraph] = field(default=None, repr=False, compare=False)
    approximate: bool = False
    search_bound: Optional[int] = None
    occurrence_bound: Optional[int] = None

    @property
    def classes(self) -> int:
        """Number of ≡-classes, i.e. distinct minimal image pairs."""
        return len(self.minimal_pairs)

    @property
    def is_empty(self) -> bool:
        return not self.minimal_pairs

    def accepts(self, t: Term) -> bool:
        """Membership of a term over x1..xk in the minimal-generalization language."""
        if any(i > self.k for i in variables(t)):
            raise VariableRangeError(f"Term {t} uses variables beyond x{self.k}")
        if self.occurrence_bound is not None:
            if any(n > self.occurrence_bound for n in occurrences(t).values()):
                return False
        masks = (image_mask(t, self.pair.first), image_mask(t, self.pair.second))
        return masks in self.image_masks

    def members(self, limit: int) -> List[Term]:
        """One witness per accepting term function, smallest first."""
        return list(self.accepted_witnesses[:limit])


def _key(first: np.ndarray, second: np.ndarray, diagonal: bool) -> bytes:
    if diagonal:
        return first.tobytes()
    return first.tobytes() + second.tobytes()


def values_mask(values: Iterable[int]) -> int:
    bits = 0
    for v in set(values):
        bits |= 1 << v
    return bits


def set_text(alg: FiniteAlgebra, bits: int) -> str:
    return "{" + ",".join(alg.from_mask(bits)) + "}"


def _apply(table: np.ndarray, stacks: Sequence[np.ndarray], width: int) -> np.ndarray:
    """Apply an operation table to every combination of argument rows."""
    m = len(stacks)
    parts = []
    for j, stack in enumerate(stacks):
        shape = [1] * m + [width]
        shape[j] = stack.shape[0]
        parts.append(stack.reshape(shape))
    return table[tuple(parts)].reshape(-1, width)


def generate_clone(pair: AlgebraPair, k: int, budget: int = DEFAULT_CLONE_BUDGET) -> CloneGraph:
    """
    Close the k projections (and the constants) under every symbol.

    Applications are enumerated semi-naively: each round only visits
    argument tuples containing a function found in the previous round, so
    every application is evaluated and recorded exactly once.

    Args:
        pair: Algebras to evaluate in
        k: Number of variables (0 for ground terms)
        budget: Maximum number of term functions

    Returns:
        The saturated CloneGraph with shortest witnesses

    Raises:
        BudgetExceededError: When more than budget functions (or
            RULES_PER_FUNCTION * budget applications) are reached
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    first, second = pair.first, pair.second
    diagonal = pair.is_diagonal
    width_a = first.size ** k
    width_b = second.size ** k

    def grid(alg: FiniteAlgebra, width: int) -> np.ndarray:
        if k == 0:
            return np.zeros((0, 1), dtype=np.int64)
        return np.indices((alg.size,) * k).reshape(k, width).astype(np.int64)

    grid_a, grid_b = grid(first, width_a), grid(second, width_b)
    tables_a: List[np.ndarray] = []
    tables_b: List[np.ndarray] = []
    index: Dict[bytes, int] = {}
    rules: List[Rule] = []
    rule_cap = RULES_PER_FUNCTION * budget

    def admit(row_a: np.ndarray, row_b: np.ndarray) -> int:
        key = _key(row_a, row_b, diagonal)
        state = index.get(key)
        if state is None:
            state = len(tables_a)
            if state >= budget:
                raise BudgetExceededError("clone functions", budget, state + 1)
            index[key] = state
            tables_a.append(row_a.copy())
            tables_b.append(row_a.copy() if diagonal else row_b.copy())
        return state

    leaves: List[Tuple[Term, int]] = []
    for i in range(k):
        leaves.append((Var(i + 1), admit(grid_a[i], grid_b[i])))
    for name in pair.signature.constants():
        const_a = np.full(width_a, first.operations[name].constant(), dtype=np.int64)
        const_b = np.full(width_b, second.operations[name].constant(), dtype=np.int64)
        leaves.append((App(name), admit(const_a, const_b)))

    symbols = [(name, arity) for name, arity in sorted(pair.signature.symbols) if arity > 0]
    done = 0
    while done < len(tables_a):
        known = len(tables_a)
        stack_a = np.stack(tables_a[:known])
        stack_b = stack_a if diagonal else np.stack(tables_b[:known])
        for name, arity in symbols:
            table_a = first.operations[name].table
            table_b = second.operations[name].table
            for p in range(arity):
                ranges = [range(0, done)] * p + [range(done, known)] + [range(0, known)] * (arity - p - 1)
                if any(len(r) == 0 for r in ranges):
                    continue
                rest = ranges[1:]
                for lead in ranges[0]:
                    args_a = [stack_a[lead:lead + 1]] + [stack_a[r.start:r.stop] for r in rest]
                    out_a = _apply(table_a, args_a, width_a)
                    if diagonal:
                        out_b = out_a
                    else:
                        args_b = [stack_b[lead:lead + 1]] + [stack_b[r.start:r.stop] for r in rest]
                        out_b = _apply(table_b, args_b, width_b)
                    for row, tail in enumerate(product(*rest)):
                        result = admit(out_a[row], out_b[row])
                        rules.append((name, (lead,) + tail, result))
                    if len(rules) > rule_cap:
                        raise BudgetExceededError("clone applications", rule_cap, len(rules))
        done = known

    return _finish(pair, k, tables_a, tables_b, rules, leaves)


def _finish(pair, k, tables_a, tables_b, rules, leaves) -> CloneGraph:
    """Pick shortest witnesses and renumber states in witness order."""
    witnesses = _shortest_witnesses(len(tables_a), rules, leaves)
    order = sorted(range(len(tables_a)), key=lambda s: (witnesses[s][0], witnesses[s][1]))
    renumber = {old: new for new, old in enumerate(order)}
    diagonal = pair.is_diagonal
    functions = []
    index = {}
    for old in order:
        size, _, term = witnesses[old]
        row_a, row_b = tables_a[old], tables_b[old]
        index[_key(row_a, row_b, diagonal)] = len(functions)
        functions.append(TermFunction(
            arity=k,
            first=tuple(row_a.tolist()),
            second=tuple(row_b.tolist()),
            witness=term,
            size=size,
            first_image=values_mask(row_a.tolist()),
            second_image=values_mask(row_b.tolist()),
        ))
    rules = [(name, tuple(renumber[a] for a in args), renumber[res]) for name, args, res in rules]
    leaves = [(term, renumber[state]) for term, state in leaves]
    return CloneGraph(pair, k, functions, rules, leaves, index)


def _shortest_witnesses(n: int, rules: List[Rule], leaves) -> Dict[int, Tuple[int, str, Term]]:
    """
    Smallest witness per state, ties broken on the printed form.

    A generalized Dijkstra over the hypergraph of rules: a rule fires once
    all of its arguments are settled.
    """
    by_argument: Dict[int, List[int]] = {}
    pending = []
    for rid, (_, args, _) in enumerate(rules):
        pending.append(len(args))
        for arg in args:
            by_argument.setdefault(arg, []).append(rid)
    best: Dict[int, Tuple[int, str, Term]] = {}
    tick = counter()
    heap = [(1, str(term), next(tick), state, term) for term, state in leaves]
    heapq.heapify(heap)
    while heap and len(best) < n:
        size, text, _, state, term = heapq.heappop(heap)
        if state in best:
            continue
        best[state] = (size, text, term)
        for rid in by_argument.get(state, ()):
            pending[rid] -= 1
            if pending[rid]:
                continue
            name, args, result = rules[rid]
            if result in best:
                continue
            parts = [best[a] for a in args]
            text = f"{name}({','.join(p[1] for p in parts)})"
            heapq.heappush(heap, (
                1 + sum(p[0] for p in parts), text, next(tick), result,
                App(name, tuple(p[2] for p in parts)),
            ))
    return best


def _count_terms(n: int, rules: List[Rule], leaves) -> Tuple[Dict[int, int], frozenset]:
    """
    Count terms per state by peeling states whose arguments are all settled.

    States never peeled depend on a cycle of applications and are reached
    by infinitely many terms.
    """
    children: Dict[int, set] = {s: set() for s in range(n)}
    parents: Dict[int, set] = {s: set() for s in range(n)}
    by_result: Dict[int, List[Rule]] = {s: [] for s in range(n)}
    for rule in rules:
        _, args, result = rule
        by_result[result].append(rule)
        for arg in args:
            children[result].add(arg)
            parents[arg].add(result)
    leaf_count = {s: 0 for s in range(n)}
    for _, state in leaves:
        leaf_count[state] += 1
    outdegree = {s: len(children[s]) for s in range(n)}
    queue = deque(s for s in range(n) if outdegree[s] == 0)
    counts: Dict[int, int] = {}
    while queue:
        state = queue.popleft()
        total = leaf_count[state]
        for _, args, _ in by_result[state]:
            term_product = 1
            for arg in args:
                term_product *= counts[arg]
            total += term_product
        counts[state] = total
        for parent in parents[state]:
            outdegree[parent] -= 1
            if outdegree[parent] == 0:
                queue.append(parent)
    infinite = frozenset(s for s in range(n) if s not in counts)
    return counts, infinite


# Queries ----------------------------------------------------------------

def tree_report(clone: CloneGraph, left: int, right: int) -> TreeReport:
    """
    Minimal generalizations of element sets given as masks.

    Candidates are the states whose first image contains left and whose
    second image contains right.
    """
    candidates = [
        s for s, fn in enumerate(clone.functions)
        if fn.first_image & left == left and fn.second_image & right == right
    ]
    minimal = minimal_image_pairs(clone.functions[s].image_pair for s in candidates)
    minimal_set = set(minimal)
    finals = frozenset(s for s in candidates if clone.functions[s].image_pair in minimal_set)
    witnesses = []
    for pair_masks in minimal:
        state = min(s for s in finals if clone.functions[s].image_pair == pair_masks)
        witnesses.append(clone.functions[state].witness)
    first, second = clone.pair.first, clone.pair.second
    return TreeReport(
        k=clone.k,
        left=first.from_mask(left),
        right=second.from_mask(right),
        minimal_pairs=tuple((first.from_mask(a), second.from_mask(b)) for a, b in minimal),
        witnesses=tuple(witnesses),
        finals=finals,
        cardinality=clone.cardinality(finals),
        trivial=bool(clone.functions) and len(finals) == len(clone.functions),
        pair=clone.pair,
        image_masks=tuple(minimal),
        accepted_witnesses=tuple(clone.functions[s].witness for s in sorted(finals)),
        clone=clone,
    )


def k_generalizations(a: str, b: str, pair: AlgebraPair, k: int,
                      budget: int = DEFAULT_CLONE_BUDGET,
                      clone: Optional[CloneGraph] = None) -> TreeReport:
    """
    Minimally general k-generalizations of a (in pair.first) and b (in pair.second).

    Raises:
        BudgetExceededError: Propagated from clone generation
    """
    left = 1 << pair.first.index(a)
    right = 1 << pair.second.index(b)
    if clone is None:
        clone = generate_clone(pair, k, budget)
    return tree_report(clone, left, right)


def characteristic_gens(a: str, alg: FiniteAlgebra, k: int,
                        budget: int = DEFAULT_CLONE_BUDGET,
                        clone: Optional[CloneGraph] = None) -> TreeReport:
    """Characteristic generalizations of a: the minimal generalizations of a with itself."""
    return k_generalizations(a, a, AlgebraPair.of(alg), k, budget, clone)


def is_characteristic_set(terms: Sequence[Term], a: str, alg: FiniteAlgebra, k: int,
                          budget: int = DEFAULT_CLONE_BUDGET) -> bool:
    """
    Decide whether terms is a characteristic set of generalizations of a.

    Every term must be a characteristic generalization of a, and for every
    other element b some term must fail to be one of b.

    Raises:
        VariableRangeError: If a term uses variables beyond x1..xk
    """
    for t in terms:
        if any(i > k for i in variables(t)):
            raise VariableRangeError(f"Term {t} uses variables beyond x{k}")
    if not terms:
        return False
    clone = generate_clone(AlgebraPair.of(alg), k, budget)
    states = [clone.lookup(t) for t in terms]
    own = characteristic_gens(a, alg, k, clone=clone)
    if not all(s in own.finals for s in states):
        return False
    for b in alg.universe:
        if b == a:
            continue
        other = characteristic_gens(b, alg, k, clone=clone)
        if all(s in other.finals for s in states):
            return False
    return True
