"""
Deterministic finite automata over finite alphabets

Complete DFAs with integer states, built by crawling an implicit automaton
from its start state. Supports the boolean operations, inclusion and
equivalence, Moore minimization, language cardinality (empty / one /
finite(n) / infinite) and DOT export.
"""

from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple


class AlphabetMismatchError(ValueError):
    """Raised when combining automata over different alphabets."""
    pass


@dataclass(frozen=True)
class Cardinality:
    """Size of a language; count None means infinitely many members."""

    count: Optional[int]

    @property
    def is_infinite(self) -> bool:
        return self.count is None

    @property
    def label(self) -> str:
        if self.count is None:
            return "infinite"
        if self.count == 0:
            return "empty"
        if self.count == 1:
            return "one"
        return f"finite({self.count})"

    def __add__(self, other: "Cardinality") -> "Cardinality":
        if self.count is None or other.count is None:
            return INFINITE
        return Cardinality(self.count + other.count)

    def __str__(self) -> str:
        return self.label


INFINITE = Cardinality(None)
EMPTY = Cardinality(0)


class Dfa:
    """
    A complete DFA.

    States are 0..n-1, the alphabet is a sorted tuple of letter names and
    transitions[state][i] is the successor under alphabet[i].
    """

    def __init__(self, alphabet: Sequence[str], transitions: Sequence[Sequence[int]],
                 start: int, finals: Iterable[int], labels: Optional[Sequence[str]] = None):
        self.alphabet: Tuple[str, ...] = tuple(alphabet)
        if list(self.alphabet) != sorted(set(self.alphabet)):
            raise AlphabetMismatchError("Alphabet must be sorted and duplicate-free")
        self.transitions: Tuple[Tuple[int, ...], ...] = tuple(tuple(row) for row in transitions)
        n = len(self.transitions)
        if not 0 <= start < n:
            raise ValueError(f"Start state {start} is not a state")
        for row in self.transitions:
            if len(row) != len(self.alphabet) or any(not 0 <= q < n for q in row):
                raise ValueError("Transition table must be total over states and alphabet")
        self.start = start
        self.finals = frozenset(finals)
        if any(not 0 <= q < n for q in self.finals):
            raise ValueError("Final states must be states")
        self.labels = tuple(labels) if labels is not None else tuple(str(q) for q in range(n))
        self._letter = {letter: i for i, letter in enumerate(self.alphabet)}

    def __repr__(self) -> str:
        return f"Dfa(states={self.size}, alphabet={list(self.alphabet)}, finals={len(self.finals)})"

    @property
    def size(self) -> int:
        return len(self.transitions)

    # Construction -------------------------------------------------------

    @staticmethod
    def crawl(alphabet: Iterable[str], start: Hashable,
              follow: Callable[[Hashable, str], Hashable],
              final: Callable[[Hashable], bool],
              label: Optional[Callable[[Hashable], str]] = None) -> "Dfa":
        """
        Map out the reachable part of an implicit automaton.

        States are numbered in breadth-first order with letters taken in
        sorted order.
        """
        letters = tuple(sorted(set(alphabet)))
        states = [start]
        index = {start: 0}
        rows = []
        i = 0
        while i < len(states):
            state = states[i]
            row = []
            for letter in letters:
                nxt = follow(state, letter)
                if nxt not in index:
                    index[nxt] = len(states)
                    states.append(nxt)
                row.append(index[nxt])
            rows.append(row)
            i += 1
        finals = [j for j, state in enumerate(states) if final(state)]
        labels = [label(state) for state in states] if label else None
        return Dfa(letters, rows, 0, finals, labels)

    @staticmethod
    def universal(alphabet: Iterable[str]) -> "Dfa":
        letters = sorted(set(alphabet))
        return Dfa(letters, [[0] * len(letters)], 0, [0])

    @staticmethod
    def null(alphabet: Iterable[str]) -> "Dfa":
        letters = sorted(set(alphabet))
        return Dfa(letters, [[0] * len(letters)], 0, [])

    # Runs ---------------------------------------------------------------

    def step(self, state: int, letter: str) -> int:
        try:
            return self.transitions[state][self._letter[letter]]
        except KeyError:
            raise AlphabetMismatchError(f"Letter {letter!r} is not in the alphabet")

    def run(self, word: Sequence[str]) -> int:
        state = self.start
        for letter in word:
            state = self.step(state, letter)
        return state

    def accepts(self, word: Sequence[str]) -> bool:
        return self.run(word) in self.finals

    def __contains__(self, word: Sequence[str]) -> bool:
        return self.accepts(word)

    # Boolean operations -------------------------------------------------

    def _check_alphabet(self, other: "Dfa") -> None:
        if self.alphabet != other.alphabet:
            raise AlphabetMismatchError(
                f"Alphabets differ: {list(self.alphabet)} vs {list(other.alphabet)}"
            )

    def product(self, other: "Dfa", test: Callable[[bool, bool], bool]) -> "Dfa":
        self._check_alphabet(other)
        return Dfa.crawl(
            self.alphabet,
            (self.start, other.start),
            lambda s, letter: (self.step(s[0], letter), other.step(s[1], letter)),
            lambda s: test(s[0] in self.finals, s[1] in other.finals),
            lambda s: f"{self.labels[s[0]]} & {other.labels[s[1]]}",
        )

    def intersect(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda a, b: a and b)

    def union(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda a, b: a or b)

    def difference(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda a, b: a and not b)

    def complement(self) -> "Dfa":
        finals = set(range(self.size)) - self.finals
        return Dfa(self.alphabet, self.transitions, self.start, finals, self.labels)

    def __and__(self, other: "Dfa") -> "Dfa":
        return self.intersect(other)

    def __or__(self, other: "Dfa") -> "Dfa":
        return self.union(other)

    def __sub__(self, other: "Dfa") -> "Dfa":
        return self.difference(other)

    # Decisions ----------------------------------------------------------

    def reachable(self) -> List[int]:
        seen = {self.start}
        order = [self.start]
        queue = deque([self.start])
        while queue:
            state = queue.popleft()
            for nxt in self.transitions[state]:
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
        return order

    def live(self) -> frozenset:
        """Reachable states from which some final state is reachable."""
        reachable = self.reachable()
        predecessors: Dict[int, List[int]] = {q: [] for q in reachable}
        for q in reachable:
            for nxt in self.transitions[q]:
                predecessors[nxt].append(q)
        alive = {q for q in reachable if q in self.finals}
        queue = deque(alive)
        while queue:
            q = queue.popleft()
            for p in predecessors[q]:
                if p not in alive:
                    alive.add(p)
                    queue.append(p)
        return frozenset(alive)

    def is_empty(self) -> bool:
        return not self.live()

    def is_universal(self) -> bool:
        return self.complement().is_empty()

    def included(self, other: "Dfa") -> bool:
        return self.difference(other).is_empty()

    def equivalent(self, other: "Dfa") -> bool:
        self._check_alphabet(other)
        return self.product(other, lambda a, b: a != b).is_empty()

    def __le__(self, other: "Dfa") -> bool:
        return self.included(other)

    def cardinality(self) -> Cardinality:
        """
        Number of accepted words.

        Infinite iff the trim automaton has a cycle; otherwise paths are
        counted in reverse topological order.
        """
        alive = self.live()
        if not alive:
            return EMPTY
        successors = {q: [n for n in self.transitions[q] if n in alive] for q in alive}
        indegree = {q: 0 for q in alive}
        for q in alive:
            for nxt in successors[q]:
                indegree[nxt] += 1
        order = []
        queue = deque(q for q in sorted(alive) if indegree[q] == 0)
        while queue:
            q = queue.popleft()
            order.append(q)
            for nxt in successors[q]:
                indegree[nxt] -= 1
                if indegree[nxt] == 0:
                    queue.append(nxt)
        if len(order) != len(alive):
            return INFINITE
        count: Dict[int, int] = {}
        for q in reversed(order):
            count[q] = (1 if q in self.finals else 0) + sum(count[n] for n in successors[q])
        return Cardinality(count[self.start])

    # Normal forms -------------------------------------------------------

    def minimize(self) -> "Dfa":
        """Moore partition refinement on the reachable part."""
        states = self.reachable()
        block = {q: int(q in self.finals) for q in states}
        while True:
            signature = {
                q: (block[q],) + tuple(block[n] for n in self.transitions[q]) for q in states
            }
            numbering: Dict[tuple, int] = {}
            refined = {}
            for q in states:
                refined[q] = numbering.setdefault(signature[q], len(numbering))
            if len(numbering) == len(set(block.values())):
                block = refined
                break
            block = refined
        representative: Dict[int, int] = {}
        for q in states:
            representative.setdefault(block[q], q)
        return Dfa.crawl(
            self.alphabet,
            block[self.start],
            lambda b, letter: block[self.step(representative[b], letter)],
            lambda b: representative[b] in self.finals,
            lambda b: self.labels[representative[b]],
        )

    # Listing ------------------------------------------------------------

    def words(self, limit: Optional[int] = None, max_length: Optional[int] = None) -> Iterator[Tuple[str, ...]]:
        """Accepted words in shortlex order, optionally bounded in number and length."""
        if limit is not None and limit <= 0:
            return
        alive = self.live()
        if self.start not in alive:
            return
        produced = 0
        queue = deque([(self.start, ())])
        while queue:
            state, word = queue.popleft()
            if state in self.finals:
                yield word
                produced += 1
                if limit is not None and produced >= limit:
                    return
            if max_length is not None and len(word) >= max_length:
                continue
            for letter, nxt in zip(self.alphabet, self.transitions[state]):
                if nxt in alive:
                    queue.append((nxt, word + (letter,)))

    def to_dot(self, name: str = "dfa") -> str:
        lines = [f'digraph "{name}" {{', "  rankdir=LR;", '  __start [shape=point, label=""];']
        for q in self.reachable():
            shape = "doublecircle" if q in self.finals else "circle"
            label = self.labels[q].replace('"', '\\"')
            lines.append(f'  q{q} [shape={shape}, label="{label}"];')
        lines.append(f"  __start -> q{self.start};")
        for q in self.reachable():
            edges: Dict[int, List[str]] = {}
            for letter, nxt in zip(self.alphabet, self.transitions[q]):
                edges.setdefault(nxt, []).append(letter)
            for nxt, letters in edges.items():
                text = ",".join(letters).replace('"', '\\"')
                lines.append(f'  q{q} -> q{nxt} [label="{text}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def dfa_algebra(d1: Dfa, d2: Optional[Dfa], op: str):
    """
    Named entry point for the automaton operations.

    op is one of intersect, union, complement, included, equivalent,
    is_empty, cardinality; unary operations ignore d2.
    """
    if op == "intersect":
        return d1.intersect(d2)
    if op == "union":
        return d1.union(d2)
    if op == "complement":
        return d1.complement()
    if op == "included":
        return d1.included(d2)
    if op == "equivalent":
        return d1.equivalent(d2)
    if op == "is_empty":
        return d1.is_empty()
    if op == "cardinality":
        return d1.cardinality()
    raise ValueError(f"Unknown automaton operation: {op}")
