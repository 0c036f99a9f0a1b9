"""
Randomized cross-checks

Random small algebras and direct-evaluation oracles used by `agu selftest`:
the unary engine against word-by-word evaluation, the clone engine against
term enumeration, and minimal pairs of both engines against an isomorphic
copy.
"""

import random
from itertools import product
from typing import Any, Dict, List, Sequence, Set, Tuple

import numpy as np

from algebra import (
    AlgebraPair, FiniteAlgebra, Operation, enumerate_homomorphisms, image_mask,
    isomorphic_copy, minimal_image_pairs, term_function,
)
from clone_engine import generate_clone, tree_report
from terms import App, Term, Var, enumerate_terms
from unary_engine import Semiautomaton, minimal_report


UNARY_SYMBOLS = ("f", "g")
WORD_BOUND = 5
TERM_BOUND = 4


def random_unary_algebra(rng: random.Random, size: int, symbols: Sequence[str] = UNARY_SYMBOLS,
                         constant: bool = False, name: str = "random",
                         permutations_only: bool = False) -> FiniteAlgebra:
    """A random algebra over the given unary symbols, optionally with a constant c."""
    universe = [f"e{i}" for i in range(size)]
    operations = []
    for symbol in symbols:
        if permutations_only:
            row = list(range(size))
            rng.shuffle(row)
        else:
            row = [rng.randrange(size) for _ in range(size)]
        operations.append(Operation(symbol, 1, np.array(row, dtype=np.int64)))
    if constant:
        operations.append(Operation("c", 0, np.array(rng.randrange(size), dtype=np.int64)))
    return FiniteAlgebra(name, universe, operations)


def random_algebra(rng: random.Random, size: int, signature: Dict[str, int],
                   name: str = "random") -> FiniteAlgebra:
    """A random algebra with arbitrary arities."""
    universe = [f"e{i}" for i in range(size)]
    operations = []
    for symbol, arity in sorted(signature.items()):
        table = np.array([rng.randrange(size) for _ in range(size ** arity)], dtype=np.int64)
        operations.append(Operation(symbol, arity, table.reshape((size,) * arity)))
    return FiniteAlgebra(name, universe, operations)


def random_unary_pair(rng: random.Random, max_size: int = 3) -> AlgebraPair:
    symbols = UNARY_SYMBOLS[:rng.randint(1, len(UNARY_SYMBOLS))]
    constant = rng.random() < 0.5
    first = random_unary_algebra(rng, rng.randint(1, max_size), symbols, constant, "A")
    second = random_unary_algebra(rng, rng.randint(1, max_size), symbols, constant, "B")
    return AlgebraPair(first, second)


def random_permutation_renaming(rng: random.Random, alg: FiniteAlgebra) -> Dict[str, str]:
    targets = [f"p{i}" for i in range(alg.size)]
    rng.shuffle(targets)
    return dict(zip(alg.universe, targets))


# Oracles ----------------------------------------------------------------

def word_term(word: Sequence[str]) -> Term:
    t: Term = Var(1)
    for letter in word:
        t = App(letter, (t,))
    return t


def reachable_word_pairs(pair: AlgebraPair) -> Set[Tuple[int, int]]:
    """
    Image pairs of all unary terms, found by evaluating words level by level
    until a level brings no new pair of term functions.
    """
    letters = [name for name, arity in pair.signature.symbols if arity == 1]
    seen_functions = set()
    images = set()
    frontier = [()]
    while frontier:
        nxt = []
        for word in frontier:
            t = word_term(word)
            key = (_table(t, pair.first), _table(t, pair.second))
            if key in seen_functions:
                continue
            seen_functions.add(key)
            images.add((image_mask(t, pair.first), image_mask(t, pair.second)))
            nxt.extend(word + (letter,) for letter in letters)
        frontier = nxt
    return images


def ground_value_pairs(pair: AlgebraPair) -> Set[Tuple[int, int]]:
    """Value pairs of ground terms: words applied to every constant."""
    letters = [name for name, arity in pair.signature.symbols if arity == 1]
    values = set()
    queue = [(pair.first.operations[c].constant(), pair.second.operations[c].constant())
             for c in pair.signature.constants()]
    while queue:
        a, b = queue.pop()
        if (a, b) in values:
            continue
        values.add((a, b))
        for letter in letters:
            queue.append((int(pair.first.operations[letter].table[a]),
                          int(pair.second.operations[letter].table[b])))
    return {(1 << a, 1 << b) for a, b in values}


def _table(t: Term, alg: FiniteAlgebra) -> Tuple[int, ...]:
    return tuple(int(v) for v in term_function(t, alg, [1]))


def check_unary_case(pair: AlgebraPair, max_length: int = WORD_BOUND) -> int:
    """Mismatched (pair of elements, word) verdicts between engine and oracle."""
    sa = Semiautomaton.from_pair(pair)
    achievable = reachable_word_pairs(pair) | ground_value_pairs(pair)
    letters = sa.alphabet
    mismatches = 0
    for i, j in product(range(pair.first.size), range(pair.second.size)):
        left, right = 1 << i, 1 << j
        report = minimal_report(sa, left, right)
        covering = [p for p in achievable if p[0] & left and p[1] & right]
        expected = set(minimal_image_pairs(covering))
        if set(report.image_masks) != expected:
            mismatches += 1
            continue
        for length in range(max_length + 1):
            for word in product(letters, repeat=length):
                t = word_term(word)
                masks = (image_mask(t, pair.first), image_mask(t, pair.second))
                if report.accepts_word(word) != (masks in expected):
                    mismatches += 1
    return mismatches


def check_clone_case(pair: AlgebraPair, k: int, max_size: int = TERM_BOUND) -> int:
    """
    Compare minimal pairs from term enumeration with those of the clone
    restricted to functions whose witnesses fit the same size bound.
    """
    clone = generate_clone(pair, k)
    mismatches = 0
    found: Dict[Tuple[bytes, bytes], Tuple[int, int]] = {}
    for t in enumerate_terms(pair.signature, k, max_size):
        order = list(range(1, k + 1))
        key = (term_function(t, pair.first, order).tobytes(),
               term_function(t, pair.second, order).tobytes())
        found.setdefault(key, (image_mask(t, pair.first), image_mask(t, pair.second)))
    small = [fn for fn in clone.functions if fn.size <= max_size]
    if len(small) != len(found):
        mismatches += 1
    for i, j in product(range(pair.first.size), range(pair.second.size)):
        left, right = 1 << i, 1 << j
        brute = set(minimal_image_pairs(p for p in found.values() if p[0] & left and p[1] & right))
        engine = set(minimal_image_pairs(fn.image_pair for fn in small
                                         if fn.first_image & left and fn.second_image & right))
        if brute != engine:
            mismatches += 1
        if len(small) == len(clone.functions):
            if set(tree_report(clone, left, right).image_masks) != brute:
                mismatches += 1
    return mismatches


def check_isomorphism_case(alg: FiniteAlgebra, renaming: Dict[str, str],
                           homomorphism_budget: int) -> int:
    """Minimal pairs of (a, b) and of their images under every isomorphism onto a copy."""
    copy = isomorphic_copy(alg, renaming, f"{alg.name}'")
    pair = AlgebraPair.of(alg)
    image_pair = AlgebraPair.of(copy)
    sa, sb = Semiautomaton.from_pair(pair), Semiautomaton.from_pair(image_pair)
    mismatches = 0
    for h in enumerate_homomorphisms(AlgebraPair(alg, copy), iso_only=True,
                                     budget=homomorphism_budget):
        for a, b in product(alg.universe, repeat=2):
            ours = minimal_report(sa, alg.mask([a]), alg.mask([b]))
            theirs = minimal_report(sb, copy.mask([h[a]]), copy.mask([h[b]]))
            mapped = {(tuple(sorted(h[x] for x in first)), tuple(sorted(h[y] for y in second)))
                      for first, second in ours.minimal_pairs}
            expected = {(tuple(sorted(first)), tuple(sorted(second)))
                        for first, second in theirs.minimal_pairs}
            if mapped != expected or not ours.language.equivalent(theirs.language):
                mismatches += 1
    return mismatches


def check_tree_isomorphism_case(alg: FiniteAlgebra, renaming: Dict[str, str], k: int,
                                homomorphism_budget: int) -> int:
    """Tree-language version of check_isomorphism_case over the clone in x1..xk."""
    copy = isomorphic_copy(alg, renaming, f"{alg.name}'")
    ours_clone = generate_clone(AlgebraPair.of(alg), k)
    theirs_clone = generate_clone(AlgebraPair.of(copy), k)
    mismatches = 0
    for h in enumerate_homomorphisms(AlgebraPair(alg, copy), iso_only=True,
                                     budget=homomorphism_budget):
        for a, b in product(alg.universe, repeat=2):
            ours = tree_report(ours_clone, alg.mask([a]), alg.mask([b]))
            theirs = tree_report(theirs_clone, copy.mask([h[a]]), copy.mask([h[b]]))
            mapped = {(tuple(sorted(h[x] for x in first)), tuple(sorted(h[y] for y in second)))
                      for first, second in ours.minimal_pairs}
            expected = {(tuple(sorted(first)), tuple(sorted(second)))
                        for first, second in theirs.minimal_pairs}
            if mapped != expected or ours.cardinality != theirs.cardinality:
                mismatches += 1
    return mismatches


def run_selftest(seed: int, cases: int, homomorphism_budget: int = 10 ** 6) -> List[Dict[str, Any]]:
    """
    Run every cross-check on `cases` random inputs.

    Returns:
        One summary dict per check: check name, cases, mismatches
    """
    rng = random.Random(seed)
    unary = sum(check_unary_case(random_unary_pair(rng)) for _ in range(cases))
    clone = 0
    for _ in range(cases):
        signature = {"f": rng.randint(1, 2)}
        if rng.random() < 0.5:
            signature["c"] = 0
        first = random_algebra(rng, rng.randint(1, 2), signature, "A")
        second = random_algebra(rng, rng.randint(1, 2), signature, "B")
        clone += check_clone_case(AlgebraPair(first, second), rng.randint(1, 2))
    iso = 0
    for _ in range(cases):
        alg = random_unary_algebra(rng, rng.randint(1, 3), name="A")
        iso += check_isomorphism_case(alg, random_permutation_renaming(rng, alg), homomorphism_budget)
    tree_iso = 0
    for _ in range(cases):
        arity = rng.randint(1, 2)
        alg = random_algebra(rng, rng.randint(1, 3 if arity == 1 else 2), {"f": arity}, "A")
        tree_iso += check_tree_isomorphism_case(alg, random_permutation_renaming(rng, alg),
                                                rng.randint(1, 2), homomorphism_budget)
    return [
        {"check": "unary engine vs word evaluation", "cases": cases, "mismatches": unary},
        {"check": "clone engine vs term enumeration", "cases": cases, "mismatches": clone},
        {"check": "minimal pairs under isomorphism", "cases": cases, "mismatches": iso},
        {"check": "tree languages under isomorphism", "cases": cases, "mismatches": tree_iso},
    ]
