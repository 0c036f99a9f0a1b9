"""
Unary engine

Exact anti-unification when every symbol has arity at most one. Such an
algebra pair is a semiautomaton: a word σ1…σn over the unary symbols stands
for the term σn(…σ1(x)…), and its pair of induced self-maps is an element of
the transition monoid. Image sets, and therefore every generalization
question, depend only on the monoid element, so the languages involved are
regular and recognized by DFAs whose states are monoid elements.

Ground terms (built from constants) are handled through the k = 0 clone and
merged into the minimality computation.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from algebra import (
    AlgebraPair, BudgetExceededError, ElementSet, FiniteAlgebra, image_mask, minimal_image_pairs,
)
from automata import EMPTY, INFINITE, Cardinality, Dfa
from clone_engine import (
    DEFAULT_CLONE_BUDGET, CloneGraph, generate_clone, set_text, tree_report, values_mask,
)
from terms import App, Term, Var, apply_substitution, occurrences, size as term_size


Word = Tuple[str, ...]
Map = Tuple[int, ...]

NAT_SUCCESSOR = "S"


class NotUnaryError(ValueError):
    """Raised when the signature has a symbol of arity two or more."""
    pass


class NotMonounaryError(ValueError):
    """Raised when the signature is not a single unary symbol."""
    pass


@dataclass(frozen=True)
class Letter:
    """
    One input letter of a semiautomaton.

    context is the term the letter wraps around x1: S(x1) for a unary
    symbol, or a translation such as cup(x1,c_) in the monolinear reduction.
    weight counts the distinct terms the letter stands for.
    """

    name: str
    first: Map
    second: Map
    context: Term
    weight: Cardinality = Cardinality(1)


@dataclass(frozen=True)
class TransitionElement:
    """A pair of self-maps realized by a word, with its shortlex-least witness."""

    first: Map
    second: Map
    witness: Word

    @property
    def first_image(self) -> int:
        return values_mask(self.first)

    @property
    def second_image(self) -> int:
        return values_mask(self.second)

    @property
    def image_pair(self) -> Tuple[int, int]:
        return (self.first_image, self.second_image)


class Semiautomaton:
    """
    Letters acting on a pair of universes, plus the ground terms of the pair.

    Built from a unary signature with `from_pair`, or from translation
    letters by the monolinear reduction.
    """

    def __init__(self, pair: AlgebraPair, letters: Iterable[Letter], ground: CloneGraph,
                 budget: int = DEFAULT_CLONE_BUDGET):
        self.pair = pair
        self.letters: Tuple[Letter, ...] = tuple(sorted(letters, key=lambda letter: letter.name))
        self.ground = ground
        self.budget = budget
        self._by_name = {letter.name: letter for letter in self.letters}
        self._monoid: Optional[List[TransitionElement]] = None

    @staticmethod
    def from_pair(pair: AlgebraPair, budget: int = DEFAULT_CLONE_BUDGET) -> "Semiautomaton":
        """
        Raises:
            NotUnaryError: If some symbol has arity two or more
        """
        require_unary(pair)
        letters = [
            Letter(name, pair.first.unary_map(name), pair.second.unary_map(name), App(name, (Var(1),)))
            for name, arity in pair.signature.symbols if arity == 1
        ]
        return Semiautomaton(pair, letters, generate_clone(pair, 0, budget), budget)

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return tuple(letter.name for letter in self.letters)

    @property
    def identity(self) -> Tuple[Map, Map]:
        return (tuple(range(self.pair.first.size)), tuple(range(self.pair.second.size)))

    def letter(self, name: str) -> Letter:
        return self._by_name[name]

    def follow(self, state: Tuple[Map, Map], name: str) -> Tuple[Map, Map]:
        """Extend a word by one letter: the letter acts after the word."""
        sigma = self._by_name[name]
        first, second = state
        return (tuple(sigma.first[i] for i in first), tuple(sigma.second[i] for i in second))

    def run(self, word: Sequence[str]) -> Tuple[Map, Map]:
        state = self.identity
        for name in word:
            state = self.follow(state, name)
        return state

    def render(self, word: Sequence[str]) -> Term:
        """The term a word stands for, innermost letter first."""
        t: Term = Var(1)
        for name in word:
            t = apply_substitution(self._by_name[name].context, {1: t})
        return t

    def monoid(self) -> List[TransitionElement]:
        if self._monoid is None:
            self._monoid = transition_monoid_of(self)
        return self._monoid

    def dfa(self, final, label=None) -> Dfa:
        """Crawl the monoid as a DFA; final and label see (first, second) map pairs."""
        return Dfa.crawl(self.alphabet, self.identity, self.follow, final, label)

    def state_label(self, state: Tuple[Map, Map]) -> str:
        first, second = state
        return f"{set_text(self.pair.first, values_mask(first))} / {set_text(self.pair.second, values_mask(second))}"


@dataclass(frozen=True)
class GeneralizationReport:
    """
    Minimal generalizations of a unary (or monolinear) query.

    language recognizes the words of minimal generalizations; ground_finals
    are the states of the ground-term automaton whose value pair is minimal.
    cardinality counts terms of both kinds; classes counts ≡-classes.
    """

    left: ElementSet
    right: ElementSet
    minimal_pairs: Tuple[Tuple[ElementSet, ElementSet], ...]
    witnesses: Tuple[Term, ...]
    witness_words: Tuple[Optional[Word], ...]
    language: Dfa
    ground_finals: frozenset
    cardinality: Cardinality
    word_cardinality: Cardinality
    trivial: bool
    semiautomaton: Semiautomaton = field(repr=False, compare=False)
    image_masks: Tuple[Tuple[int, int], ...] = field(repr=False, default=())
    approximate: bool = False

    @property
    def classes(self) -> int:
        return len(self.minimal_pairs)

    @property
    def is_empty(self) -> bool:
        return not self.minimal_pairs

    def accepts_word(self, word: Sequence[str]) -> bool:
        return self.language.accepts(tuple(word))

    def accepts(self, t: Term) -> bool:
        """Membership of a term with at most one occurrence of x1 and no other variable."""
        counts = occurrences(t)
        if set(counts) - {1} or counts.get(1, 0) > 1:
            return False
        pair = self.semiautomaton.pair
        return (image_mask(t, pair.first), image_mask(t, pair.second)) in self.image_masks

    def words_up_to(self, max_length: int, limit: Optional[int] = None) -> List[Word]:
        return list(self.language.words(limit=limit, max_length=max_length))

    def members(self, limit: int) -> List[Term]:
        """At most limit members: words over x1 in shortlex order, then ground witnesses by state."""
        found = [self.semiautomaton.render(w) for w in self.language.words(limit=limit)]
        ground = self.semiautomaton.ground
        for state in sorted(self.ground_finals):
            if len(found) >= limit:
                break
            found.append(ground.functions[state].witness)
        return found


def require_unary(pair: AlgebraPair) -> None:
    wide = [name for name, arity in pair.signature.symbols if arity > 1]
    if wide:
        raise NotUnaryError(f"Symbols of arity > 1 need the clone engine: {', '.join(wide)}")


def term_word(t: Term) -> Word:
    """The word of a unary term over x1; the inverse of rendering."""
    letters = []
    while isinstance(t, App):
        if len(t.args) != 1:
            raise NotUnaryError(f"Not a unary term: {t}")
        letters.append(t.symbol)
        t = t.args[0]
    if t != Var(1):
        raise NotUnaryError(f"Unary terms are built over x1, got {t}")
    return tuple(reversed(letters))


def word_text(word: Sequence[str]) -> str:
    return "ε" if not word else " ".join(word)


# Monoid and DFAs ---------------------------------------------------------

def transition_monoid_of(sa: Semiautomaton) -> List[TransitionElement]:
    """
    Breadth-first closure of the identity under the letters.

    Letters are tried in sorted order, so each element's witness is the
    shortlex-least word realizing it.

    Raises:
        BudgetExceededError: When more than sa.budget elements are reached
    """
    start = sa.identity
    elements = [TransitionElement(start[0], start[1], ())]
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        state, word = queue.popleft()
        for name in sa.alphabet:
            nxt = sa.follow(state, name)
            if nxt in seen:
                continue
            if len(seen) >= sa.budget:
                raise BudgetExceededError("monoid elements", sa.budget, len(seen) + 1)
            seen.add(nxt)
            elements.append(TransitionElement(nxt[0], nxt[1], word + (name,)))
            queue.append((nxt, word + (name,)))
    return elements


def transition_monoid(pair: AlgebraPair, budget: int = DEFAULT_CLONE_BUDGET) -> List[TransitionElement]:
    """
    The transition monoid of a unary algebra pair.

    Raises:
        NotUnaryError: If some symbol has arity two or more
    """
    return Semiautomaton.from_pair(pair, budget).monoid()


def up_set_dfa(a: str, alg: FiniteAlgebra) -> Dfa:
    """DFA for ↑a: the words w with a in the image of w."""
    sa = Semiautomaton.from_pair(AlgebraPair.of(alg))
    bit = 1 << alg.index(a)
    return sa.dfa(lambda s: bool(values_mask(s[0]) & bit), sa.state_label)


def common_gens_dfa(a: str, b: str, pair: AlgebraPair) -> Dfa:
    """DFA for a↑b, the product of ↑a in the first algebra and ↑b in the second."""
    require_unary(pair)
    return up_set_dfa(a, pair.first) & up_set_dfa(b, pair.second)


def minimal_gens(a: str, b: str, pair: AlgebraPair,
                 budget: int = DEFAULT_CLONE_BUDGET) -> GeneralizationReport:
    """
    Minimally general generalizations of a and b in a unary algebra pair.

    Args:
        a: Element of pair.first
        b: Element of pair.second
        pair: Algebras with symbols of arity at most one
        budget: Cap on monoid elements and ground term functions

    Returns:
        GeneralizationReport with the regular language of minimal words

    Raises:
        NotUnaryError: If some symbol has arity two or more
        UnknownElementError: If a or b is not in its universe
    """
    sa = Semiautomaton.from_pair(pair, budget)
    return minimal_report(sa, 1 << pair.first.index(a), 1 << pair.second.index(b))


def minimal_report(sa: Semiautomaton, left: int, right: int) -> GeneralizationReport:
    """
    Minimal generalizations of two element sets given as masks.

    Candidates are monoid elements and ground value pairs whose first image
    contains left and whose second image contains right; the word language
    accepts exactly the words landing on a minimal candidate.
    """
    pair = sa.pair

    def covers(masks: Tuple[int, int]) -> bool:
        return masks[0] & left == left and masks[1] & right == right

    monoid = sa.monoid()
    ground = sa.ground
    word_candidates = [m for m in monoid if covers(m.image_pair)]
    ground_candidates = [s for s, fn in enumerate(ground.functions) if covers(fn.image_pair)]
    minimal = minimal_image_pairs(
        [m.image_pair for m in word_candidates]
        + [ground.functions[s].image_pair for s in ground_candidates]
    )
    minimal_set = set(minimal)

    language = sa.dfa(
        lambda s: (values_mask(s[0]), values_mask(s[1])) in minimal_set,
        sa.state_label,
    )
    ground_finals = frozenset(s for s in ground_candidates if ground.functions[s].image_pair in minimal_set)

    witnesses: List[Term] = []
    witness_words: List[Optional[Word]] = []
    for masks in minimal:
        words = [m.witness for m in word_candidates if m.image_pair == masks]
        states = [s for s in ground_finals if ground.functions[s].image_pair == masks]
        options = []
        if words:
            options.append((sa.render(words[0]), words[0]))
        if states:
            options.append((ground.functions[min(states)].witness, None))
        term, word = min(options, key=lambda o: (term_size(o[0]), str(o[0])))
        witnesses.append(term)
        witness_words.append(word)

    word_cardinality = weighted_cardinality(language, {l.name: l.weight for l in sa.letters})
    cardinality = word_cardinality + ground.cardinality(ground_finals)
    trivial = language.is_universal() and len(ground_finals) == len(ground.functions)
    return GeneralizationReport(
        left=pair.first.from_mask(left),
        right=pair.second.from_mask(right),
        minimal_pairs=tuple((pair.first.from_mask(x), pair.second.from_mask(y)) for x, y in minimal),
        witnesses=tuple(witnesses),
        witness_words=tuple(witness_words),
        language=language,
        ground_finals=ground_finals,
        cardinality=cardinality,
        word_cardinality=word_cardinality,
        trivial=trivial,
        semiautomaton=sa,
        image_masks=tuple(minimal),
    )


def weighted_cardinality(dfa: Dfa, weights: Dict[str, Cardinality]) -> Cardinality:
    """
    Number of terms behind the accepted words when each letter stands for
    weight-many terms. With unit weights this is dfa.cardinality().
    """
    if all(w.count == 1 for w in weights.values()):
        return dfa.cardinality()
    alive = dfa.live()
    if not alive:
        return EMPTY
    edges = {
        q: [(letter, nxt) for letter, nxt in zip(dfa.alphabet, dfa.transitions[q])
            if nxt in alive and weights[letter].count != 0]
        for q in alive
    }
    if any(weights[letter].is_infinite for q in alive for letter, _ in edges[q]):
        return INFINITE
    indegree = {q: 0 for q in alive}
    for q in alive:
        for _, nxt in edges[q]:
            indegree[nxt] += 1
    order = []
    queue = deque(q for q in sorted(alive) if indegree[q] == 0)
    while queue:
        q = queue.popleft()
        order.append(q)
        for _, nxt in edges[q]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                queue.append(nxt)
    if len(order) != len(alive):
        return INFINITE
    count: Dict[int, int] = {}
    for q in reversed(order):
        count[q] = (1 if q in dfa.finals else 0) + sum(
            weights[letter].count * count[nxt] for letter, nxt in edges[q]
        )
    return Cardinality(count[dfa.start])


# Generalization type ----------------------------------------------------

TYPE_LABELS = ("nullary", "unitary", "finitary", "infinitary")


@dataclass(frozen=True)
class TypeReport:
    """Per element pair labels and the aggregate generalization type."""

    pairs: Tuple[Tuple[str, str, str, bool], ...]
    labels: Tuple[str, ...]

    @property
    def label(self) -> str:
        return " and ".join(self.labels) if self.labels else "unclassified"


def pair_label(cardinality: Cardinality) -> str:
    if cardinality.is_infinite:
        return "infinitary"
    if cardinality.count == 0:
        return "nullary"
    if cardinality.count == 1:
        return "unitary"
    return "finitary"


def aggregate_labels(cardinalities: Sequence[Cardinality], trivial: Sequence[bool]) -> Tuple[str, ...]:
    """
    Apply the type quantifiers: nullary, unitary and trivial hold for all
    pairs; finitary needs all finite and some above one; infinitary needs
    some infinite.
    """
    labels = []
    if all(c.count == 0 for c in cardinalities):
        labels.append("nullary")
    if all(c.count == 1 for c in cardinalities):
        labels.append("unitary")
    if all(not c.is_infinite for c in cardinalities) and any(
            not c.is_infinite and c.count > 1 for c in cardinalities):
        labels.append("finitary")
    if any(c.is_infinite for c in cardinalities):
        labels.append("infinitary")
    if all(trivial):
        labels.append("trivial")
    return tuple(labels)


def classify_type(pair: AlgebraPair, budget: int = DEFAULT_CLONE_BUDGET) -> TypeReport:
    """
    Generalization type of a unary algebra pair, counting terms.

    Raises:
        NotUnaryError: If some symbol has arity two or more
    """
    sa = Semiautomaton.from_pair(pair, budget)
    rows = []
    cardinalities = []
    trivial = []
    for i, a in enumerate(pair.first.universe):
        for j, b in enumerate(pair.second.universe):
            report = minimal_report(sa, 1 << i, 1 << j)
            rows.append((a, b, pair_label(report.cardinality), report.trivial))
            cardinalities.append(report.cardinality)
            trivial.append(report.trivial)
    return TypeReport(tuple(rows), aggregate_labels(cardinalities, trivial))


def classify_k_type(pair: AlgebraPair, k: int, budget: int = DEFAULT_CLONE_BUDGET) -> TypeReport:
    """
    Generalization type relative to terms over x1..xk, for any signature.

    Labels count terms accepted by the clone automaton, so they describe the
    k-variable fragment only.
    """
    clone = generate_clone(pair, k, budget)
    rows = []
    cardinalities = []
    trivial = []
    for i, a in enumerate(pair.first.universe):
        for j, b in enumerate(pair.second.universe):
            report = tree_report(clone, 1 << i, 1 << j)
            rows.append((a, b, pair_label(report.cardinality), report.trivial))
            cardinalities.append(report.cardinality)
            trivial.append(report.trivial)
    return TypeReport(tuple(rows), aggregate_labels(cardinalities, trivial))


# Monounary algebras ----------------------------------------------------

def successor_symbol(alg: FiniteAlgebra) -> str:
    """
    Raises:
        NotMonounaryError: Unless the signature is exactly one unary symbol
    """
    symbols = alg.signature.symbols
    if len(symbols) != 1 or symbols[0][1] != 1:
        raise NotMonounaryError(f"Algebra {alg.name} is not monounary: {alg.signature.as_dict()}")
    return symbols[0][0]


def power_images(alg: FiniteAlgebra) -> Tuple[List[int], int]:
    """
    Images of S^0, S^1, ... as masks until they stop shrinking.

    The images form a decreasing chain, so they stabilize within |A| steps.

    Returns:
        (images up to and including the first repeated one, index of the stable image)
    """
    table = alg.unary_map(successor_symbol(alg))
    current = (1 << alg.size) - 1
    images = [current]
    while True:
        nxt = values_mask(table[i] for i in range(alg.size) if current >> i & 1)
        if nxt == current:
            return images, len(images) - 1
        images.append(nxt)
        current = nxt


def m_value(a: str, alg: FiniteAlgebra) -> Optional[int]:
    """
    The largest m with a in the image of S^m, or None when a stays in every image.
    """
    bit = 1 << alg.index(a)
    images, stable = power_images(alg)
    if images[stable] & bit:
        return None
    return max(m for m, img in enumerate(images) if img & bit)


def m_pair(a: str, b: str, alg: FiniteAlgebra) -> Optional[int]:
    """min(m(a), m(b)); None stands for infinity."""
    values = [v for v in (m_value(a, alg), m_value(b, alg)) if v is not None]
    return min(values) if values else None


def strictly_decreasing_prefix(alg: FiniteAlgebra, m: int) -> bool:
    """Whether the images of S^0..S^m are strictly decreasing."""
    images, stable = power_images(alg)
    return m <= stable


def monounary_closed_form(a: str, b: str, alg: FiniteAlgebra) -> Optional[Word]:
    """
    The single minimal word S^m(a,b) when m(a,b) is finite and the images
    up to S^m(a,b) strictly decrease; None outside that class.
    """
    m = m_pair(a, b, alg)
    if m is None or not strictly_decreasing_prefix(alg, m):
        return None
    return (successor_symbol(alg),) * m


def nat_successor_mgg(a: int, b: int) -> Word:
    """Minimal generalization of a and b in the natural numbers under successor."""
    if a < 0 or b < 0:
        raise ValueError(f"Natural numbers expected, got {a}, {b}")
    return (NAT_SUCCESSOR,) * min(a, b)
