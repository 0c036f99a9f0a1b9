"""
Set-wise anti-unification

Generalizations of element sets: a term generalizes C when C lies inside its
image. ↑C is the intersection of the ↑a for a in C, and C⇑D keeps the
⊑-minimal common generalizations of C and D. Both engines are supported:
"unary" for signatures of arity at most one, or an integer k for the clone
engine over x1..xk.
"""

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Union

from algebra import AlgebraPair, FiniteAlgebra
from automata import Cardinality, Dfa
from clone_engine import (
    DEFAULT_CLONE_BUDGET, CloneGraph, TreeReport, generate_clone, tree_report, values_mask,
)
from terms import Term
from unary_engine import (
    GeneralizationReport, Semiautomaton, minimal_report, require_unary, up_set_dfa,
)


Engine = Union[str, int]
UNARY = "unary"


class EmptySubsetError(ValueError):
    """Raised when a set-wise query gets an empty element set."""
    pass


@dataclass(frozen=True)
class TreeLanguage:
    """Terms over x1..xk whose term function is one of finals."""

    clone: CloneGraph
    finals: frozenset

    def accepts(self, t: Term) -> bool:
        return self.clone.lookup(t) in self.finals

    @property
    def cardinality(self) -> Cardinality:
        return self.clone.cardinality(self.finals)

    def is_empty(self) -> bool:
        return not self.finals

    def __and__(self, other: "TreeLanguage") -> "TreeLanguage":
        return TreeLanguage(self.clone, self.finals & other.finals)

    def __le__(self, other: "TreeLanguage") -> bool:
        return self.finals <= other.finals


Recognizer = Union[Dfa, TreeLanguage]


def _check_subset(name: str, elements: Iterable[str], alg: FiniteAlgebra) -> int:
    elements = list(elements)
    if not elements:
        raise EmptySubsetError(f"{name} must contain at least one element")
    return alg.mask(elements)


def _check_engine(engine: Engine) -> None:
    if engine != UNARY and (not isinstance(engine, int) or isinstance(engine, bool) or engine < 1):
        raise ValueError(f"Engine must be 'unary' or a positive k, got {engine!r}")


def up_set_of_set(elements: Iterable[str], alg: FiniteAlgebra, engine: Engine = UNARY,
                  budget: int = DEFAULT_CLONE_BUDGET) -> Recognizer:
    """
    Recognizer for ↑C, the terms whose image contains every element of C.

    Raises:
        EmptySubsetError: If elements is empty
        NotUnaryError: For the unary engine on a wider signature
    """
    elements = list(elements)
    _check_subset("C", elements, alg)
    _check_engine(engine)
    if engine == UNARY:
        return reduce(lambda d, e: d & e, (up_set_dfa(a, alg) for a in elements))
    clone = generate_clone(AlgebraPair.of(alg), engine, budget)
    bits = alg.mask(elements)
    return TreeLanguage(clone, frozenset(
        s for s, fn in enumerate(clone.functions) if fn.first_image & bits == bits
    ))


def common_gens_of_sets(left: Iterable[str], right: Iterable[str], pair: AlgebraPair,
                        budget: int = DEFAULT_CLONE_BUDGET) -> Dfa:
    """DFA for C↑D in a unary pair, read directly off the transition monoid."""
    left_bits = _check_subset("C", left, pair.first)
    right_bits = _check_subset("D", right, pair.second)
    require_unary(pair)
    sa = Semiautomaton.from_pair(pair, budget)
    return sa.dfa(
        lambda s: values_mask(s[0]) & left_bits == left_bits
        and values_mask(s[1]) & right_bits == right_bits,
        sa.state_label,
    )


def setwise_antiunify(left: Iterable[str], right: Iterable[str], pair: AlgebraPair,
                      engine: Engine = UNARY,
                      budget: int = DEFAULT_CLONE_BUDGET) -> Union[GeneralizationReport, TreeReport]:
    """
    C⇑D: minimal generalizations of two element sets.

    Singletons give exactly the element-wise reports; C⇑C in (A, A) is the
    characteristic query for a set.

    Raises:
        EmptySubsetError: If either set is empty
        NotUnaryError: For the unary engine on a wider signature
        BudgetExceededError: Propagated from the engine
    """
    left_bits = _check_subset("C", left, pair.first)
    right_bits = _check_subset("D", right, pair.second)
    _check_engine(engine)
    if engine == UNARY:
        return minimal_report(Semiautomaton.from_pair(pair, budget), left_bits, right_bits)
    return tree_report(generate_clone(pair, engine, budget), left_bits, right_bits)
