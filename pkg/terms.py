"""
Terms over a ranked signature

Signatures, first-order terms over the variables x1, x2, ..., substitutions,
syntactic matching and classical syntactic anti-unification (the least
general generalization of two terms). Everything here is purely syntactic;
algebras give terms their meaning in algebra.py.
"""

import re
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union


VARIABLE_PATTERN = re.compile(r"x[0-9]+")
VALID_VARIABLE = re.compile(r"x[1-9][0-9]*")
IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class TermError(ValueError):
    """Base class for term construction and parsing errors."""

    def __init__(self, message: str, position: Optional[int] = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class TermSyntaxError(TermError):
    """Raised when a term string does not follow the term grammar."""
    pass


class UnknownSymbolError(TermError):
    """Raised when a term uses a symbol missing from the signature."""
    pass


class ArityMismatchError(TermError):
    """Raised when a symbol is applied to the wrong number of arguments."""
    pass


@dataclass(frozen=True)
class Var:
    """The variable x<index>, index >= 1."""

    index: int

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class App:
    """Application of a symbol to its argument terms (no arguments for constants)."""

    symbol: str
    args: Tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.symbol
        return f"{self.symbol}({','.join(str(arg) for arg in self.args)})"


Term = Union[Var, App]
Substitution = Mapping[int, Term]


@dataclass(frozen=True)
class Signature:
    """Finite mapping from symbol names to arities."""

    symbols: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        for name, arity in self.symbols:
            if not name or not IDENTIFIER.fullmatch(name):
                raise TermError(f"Invalid symbol name: {name!r}")
            if VARIABLE_PATTERN.fullmatch(name):
                raise TermError(f"Symbol name {name!r} collides with the variable lexemes")
            if name in seen:
                raise TermError(f"Duplicate symbol: {name}")
            if not isinstance(arity, int) or arity < 0:
                raise TermError(f"Invalid arity for {name}: {arity!r}")
            seen.add(name)

    @staticmethod
    def from_dict(symbols: Mapping[str, int]) -> "Signature":
        return Signature(tuple((name, arity) for name, arity in symbols.items()))

    def arity(self, name: str) -> int:
        for symbol, arity in self.symbols:
            if symbol == name:
                return arity
        raise UnknownSymbolError(f"Unknown symbol: {name}")

    def __contains__(self, name: str) -> bool:
        return any(symbol == name for symbol, _ in self.symbols)

    def names(self) -> List[str]:
        return [name for name, _ in self.symbols]

    def constants(self) -> List[str]:
        return [name for name, arity in self.symbols if arity == 0]

    def as_dict(self) -> Dict[str, int]:
        return dict(self.symbols)

    @property
    def max_arity(self) -> int:
        return max((arity for _, arity in self.symbols), default=0)


def x(index: int) -> Var:
    return Var(index)


def check_term(t: Term, sig: Signature) -> None:
    """Raise if t uses unknown symbols or wrong argument counts."""
    if isinstance(t, Var):
        return
    arity = sig.arity(t.symbol)
    if arity != len(t.args):
        raise ArityMismatchError(
            f"Symbol {t.symbol} has arity {arity} but got {len(t.args)} arguments"
        )
    for arg in t.args:
        check_term(arg, sig)


# Parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<word>[A-Za-z0-9_]+)|(?P<punct>[(),]))")


def _tokenize(text: str) -> List[Tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if not match:
            raise TermSyntaxError(f"Unexpected character {text[pos]!r}", pos)
        start = match.start("word") if match.group("word") else match.start("punct")
        tokens.append((match.group("word") or match.group("punct"), start))
        pos = match.end()
    return tokens


def parse_term(text: str, sig: Signature) -> Term:
    """
    Parse a term written in the term grammar.

    Args:
        text: e.g. "f(x1,a)"
        sig: Signature the term must conform to

    Returns:
        The parsed term

    Raises:
        TermSyntaxError: On malformed input (with the offending position)
        UnknownSymbolError: On symbols missing from sig
        ArityMismatchError: When an application has the wrong argument count
    """
    tokens = _tokenize(text)
    if not tokens:
        raise TermSyntaxError("Empty term", 0)
    term, index = _parse(tokens, 0, sig, len(text))
    if index != len(tokens):
        raise TermSyntaxError(f"Unexpected token {tokens[index][0]!r}", tokens[index][1])
    return term


def _parse(tokens, index, sig, end):
    if index >= len(tokens):
        raise TermSyntaxError("Unexpected end of input", end)
    word, pos = tokens[index]
    if word in "(),":
        raise TermSyntaxError(f"Expected a variable or symbol, got {word!r}", pos)
    if VARIABLE_PATTERN.fullmatch(word):
        if not VALID_VARIABLE.fullmatch(word):
            raise TermSyntaxError(f"Invalid variable {word!r}", pos)
        return Var(int(word[1:])), index + 1
    if not IDENTIFIER.fullmatch(word):
        raise TermSyntaxError(f"Invalid symbol {word!r}", pos)
    if word not in sig:
        raise UnknownSymbolError(f"Unknown symbol: {word}", pos)
    arity = sig.arity(word)
    index += 1
    args = []
    if index < len(tokens) and tokens[index][0] == "(":
        index += 1
        while True:
            arg, index = _parse(tokens, index, sig, end)
            args.append(arg)
            if index >= len(tokens):
                raise TermSyntaxError("Missing ')'", end)
            if tokens[index][0] == ",":
                index += 1
                continue
            if tokens[index][0] == ")":
                index += 1
                break
            raise TermSyntaxError(f"Expected ',' or ')', got {tokens[index][0]!r}", tokens[index][1])
    if len(args) != arity:
        raise ArityMismatchError(
            f"Symbol {word} has arity {arity} but got {len(args)} arguments", pos
        )
    return App(word, tuple(args)), index


def format_term(t: Term) -> str:
    return str(t)


# Structure -------------------------------------------------------------

def variables(t: Term) -> Tuple[int, ...]:
    """Sorted distinct variable indices of t."""
    found = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            found.add(node.index)
        else:
            stack.extend(node.args)
    return tuple(sorted(found))


def rank(t: Term) -> int:
    return len(variables(t))


def size(t: Term) -> int:
    """Number of symbol and variable occurrences."""
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(arg) for arg in t.args)


def occurrences(t: Term) -> Dict[int, int]:
    """How often each variable occurs in t."""
    counts: Dict[int, int] = {}
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            counts[node.index] = counts.get(node.index, 0) + 1
        else:
            stack.extend(node.args)
    return counts


def is_ground(t: Term) -> bool:
    return not variables(t)


def apply_substitution(t: Term, s: Substitution) -> Term:
    """Simultaneously replace variables; unmapped variables stay."""
    if isinstance(t, Var):
        return s.get(t.index, t)
    if not t.args:
        return t
    return App(t.symbol, tuple(apply_substitution(arg, s) for arg in t.args))


def match_term(s: Term, t: Term) -> Optional[Dict[int, Term]]:
    """
    Decide s ≲ t: find σ with tσ = s.

    Returns:
        The matcher restricted to vars(t) with identity bindings dropped,
        or None when s is not an instance of t.
    """
    binding: Dict[int, Term] = {}
    stack = [(s, t)]
    while stack:
        instance, pattern = stack.pop()
        if isinstance(pattern, Var):
            bound = binding.get(pattern.index)
            if bound is None:
                binding[pattern.index] = instance
            elif bound != instance:
                return None
            continue
        if not isinstance(instance, App):
            return None
        if instance.symbol != pattern.symbol or len(instance.args) != len(pattern.args):
            return None
        stack.extend(zip(instance.args, pattern.args))
    return {i: u for i, u in binding.items() if u != Var(i)}


def is_instance(s: Term, t: Term) -> bool:
    return match_term(s, t) is not None


def syntactic_lgg(s: Term, t: Term) -> Term:
    """
    Least general generalization of two terms.

    Every disagreement pair (including a variable paired with itself) is
    replaced by one fresh variable, reused wherever the same pair recurs.
    Variables are numbered in first-occurrence order, so the result is
    canonical.
    """
    fresh: Dict[Tuple[Term, Term], Var] = {}

    def generalize(u: Term, v: Term) -> Term:
        if (isinstance(u, App) and isinstance(v, App)
                and u.symbol == v.symbol and len(u.args) == len(v.args)):
            return App(u.symbol, tuple(generalize(a, b) for a, b in zip(u.args, v.args)))
        if (u, v) not in fresh:
            fresh[(u, v)] = Var(len(fresh) + 1)
        return fresh[(u, v)]

    return generalize(s, t)


def canonical(t: Term) -> Term:
    """Renumber variables x1, x2, ... in first-occurrence order."""
    renaming: Dict[int, Term] = {}

    def visit(node: Term) -> None:
        if isinstance(node, Var):
            if node.index not in renaming:
                renaming[node.index] = Var(len(renaming) + 1)
        else:
            for arg in node.args:
                visit(arg)

    visit(t)
    return apply_substitution(t, renaming)


def alpha_equivalent(s: Term, t: Term) -> bool:
    return canonical(s) == canonical(t)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for arg in t.args:
            yield from subterms(arg)


def enumerate_terms(sig: Signature, k: int, max_size: int) -> Iterator[Term]:
    """
    Every term over sig and x1..xk of size at most max_size, by size.

    Meant for brute-force checks on tiny signatures; the count grows
    exponentially with max_size.
    """
    by_size: Dict[int, List[Term]] = {}
    for n in range(1, max_size + 1):
        level: List[Term] = []
        if n == 1:
            level.extend(Var(i) for i in range(1, k + 1))
            level.extend(App(name) for name in sig.constants())
        for name, arity in sig.symbols:
            if arity == 0:
                continue
            for sizes in compositions(n - 1, arity):
                pools = [by_size.get(part, []) for part in sizes]
                for args in product(*pools):
                    level.append(App(name, tuple(args)))
        by_size[n] = level
        yield from level


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered ways to write total as a sum of `parts` positive integers."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest
