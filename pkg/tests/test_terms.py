"""Unit tests for terms module."""

from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from terms import (
    App, ArityMismatchError, Signature, TermError, TermSyntaxError, UnknownSymbolError, Var,
    alpha_equivalent, apply_substitution, canonical, compositions, enumerate_terms,
    is_instance, match_term, occurrences, parse_term, size, subterms, syntactic_lgg, variables,
)


LGG_SIG = Signature.from_dict({"a": 0, "b": 0, "f": 2})


def terms_strategy(sig: Signature, max_var: int = 3):
    leaves = st.one_of(
        st.integers(min_value=1, max_value=max_var).map(Var),
        st.sampled_from([App(c) for c in sig.constants()]),
    )
    return st.recursive(
        leaves,
        lambda children: st.builds(lambda l, r: App("f", (l, r)), children, children),
        max_leaves=6,
    )


class TestSignature:
    """Tests for Signature."""

    def test_arity_lookup(self):
        sig = Signature.from_dict({"f": 2, "c": 0})
        assert sig.arity("f") == 2
        assert sig.constants() == ["c"]
        assert sig.max_arity == 2

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbolError):
            Signature.from_dict({"f": 1}).arity("g")

    def test_duplicate_symbol_rejected(self):
        with pytest.raises(TermError, match="Duplicate"):
            Signature((("f", 1), ("f", 2)))

    def test_symbol_colliding_with_variable_rejected(self):
        with pytest.raises(TermError, match="collides"):
            Signature((("x1", 0),))

    def test_empty_signature(self):
        sig = Signature(())
        assert sig.max_arity == 0
        assert list(enumerate_terms(sig, 2, 3)) == [Var(1), Var(2)]


class TestParsing:
    """Tests for parse_term and printing."""

    @pytest.mark.unit
    def test_roundtrip_print(self):
        t = parse_term("f(x1, f(a, x2))", LGG_SIG)
        assert t == App("f", (Var(1), App("f", (App("a"), Var(2)))))
        assert str(t) == "f(x1,f(a,x2))"

    def test_constant_without_parentheses(self):
        assert parse_term("a", LGG_SIG) == App("a")

    def test_unknown_symbol_position(self):
        with pytest.raises(UnknownSymbolError) as info:
            parse_term("f(x1,g)", LGG_SIG)
        assert info.value.position == 5

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatchError):
            parse_term("f(x1)", LGG_SIG)

    @pytest.mark.parametrize("text", ["", "f(x1,", "f(x1 x2)", "x0", "f(,a)", "a)"])
    def test_syntax_errors(self, text):
        with pytest.raises(TermSyntaxError):
            parse_term(text, LGG_SIG)

    def test_variables_size_occurrences(self):
        t = parse_term("f(x2,f(x1,x2))", LGG_SIG)
        assert variables(t) == (1, 2)
        assert size(t) == 5
        assert occurrences(t) == {1: 1, 2: 2}
        assert len(list(subterms(t))) == 5


class TestSubstitutionAndMatching:
    """Tests for substitution, matching and canonical forms."""

    def test_apply_substitution_is_simultaneous(self):
        t = parse_term("f(x1,x2)", LGG_SIG)
        swapped = apply_substitution(t, {1: Var(2), 2: Var(1)})
        assert str(swapped) == "f(x2,x1)"

    def test_match_finds_matcher(self):
        s = parse_term("f(a,f(b,b))", LGG_SIG)
        t = parse_term("f(x1,f(x2,x2))", LGG_SIG)
        sigma = match_term(s, t)
        assert sigma == {1: App("a"), 2: App("b")}
        assert apply_substitution(t, sigma) == s

    def test_match_fails_on_inconsistent_binding(self):
        s = parse_term("f(a,b)", LGG_SIG)
        t = parse_term("f(x1,x1)", LGG_SIG)
        assert match_term(s, t) is None

    def test_variable_is_not_instance_of_constant(self):
        assert not is_instance(Var(1), App("a"))

    def test_canonical_renumbers_by_first_occurrence(self):
        t = parse_term("f(x3,f(x1,x3))", LGG_SIG)
        assert str(canonical(t)) == "f(x1,f(x2,x1))"
        assert alpha_equivalent(t, parse_term("f(x7,f(x2,x7))", LGG_SIG))


class TestSyntacticLgg:
    """Tests for syntactic_lgg."""

    def test_textbook_example(self):
        s = parse_term("f(a,f(a,b))", LGG_SIG)
        t = parse_term("f(b,f(b,a))", LGG_SIG)
        assert str(syntactic_lgg(s, t)) == "f(x1,f(x1,x2))"

    def test_identical_terms(self):
        s = parse_term("f(x1,a)", LGG_SIG)
        assert alpha_equivalent(syntactic_lgg(s, s), s)

    @pytest.mark.slow
    def test_exhaustive_small_terms(self):
        """The lgg is the most specific common anti-instance among all small terms."""
        inputs = list(enumerate_terms(LGG_SIG, 1, 4))
        candidates = list(enumerate_terms(LGG_SIG, 2, 4))
        failures = 0
        for s, t in product(inputs, repeat=2):
            lgg = syntactic_lgg(s, t)
            if not (is_instance(s, lgg) and is_instance(t, lgg)):
                failures += 1
                continue
            common = [u for u in candidates if is_instance(s, u) and is_instance(t, u)]
            best = [u for u in common if all(is_instance(u, v) for v in common)]
            if not best or not alpha_equivalent(best[0], lgg):
                failures += 1
        assert failures == 0

    @pytest.mark.property
    @settings(max_examples=200, deadline=None)
    @given(terms_strategy(LGG_SIG), terms_strategy(LGG_SIG))
    def test_lgg_generalizes_both(self, s, t):
        lgg = syntactic_lgg(s, t)
        assert is_instance(s, lgg)
        assert is_instance(t, lgg)


class TestInstanceOrder:
    """≲ is a pre-order and matching is sound."""

    @pytest.mark.property
    @settings(max_examples=200, deadline=None)
    @given(terms_strategy(LGG_SIG))
    def test_reflexive(self, t):
        assert is_instance(t, t)

    @pytest.mark.property
    @settings(max_examples=100, deadline=None)
    @given(terms_strategy(LGG_SIG), terms_strategy(LGG_SIG), terms_strategy(LGG_SIG))
    def test_transitive(self, r, s, t):
        if is_instance(r, s) and is_instance(s, t):
            assert is_instance(r, t)

    @pytest.mark.property
    @settings(max_examples=200, deadline=None)
    @given(terms_strategy(LGG_SIG), terms_strategy(LGG_SIG))
    def test_matching_sound(self, s, t):
        sigma = match_term(s, t)
        if sigma is not None:
            assert apply_substitution(t, sigma) == s


class TestEnumeration:
    def test_compositions(self):
        assert list(compositions(3, 2)) == [(1, 2), (2, 1)]
        assert list(compositions(1, 2)) == []

    def test_terms_by_size(self):
        found = list(enumerate_terms(LGG_SIG, 1, 3))
        assert [size(t) for t in found] == sorted(size(t) for t in found)
        # 3 leaves, then 9 applications of f
        assert len(found) == 12


SUCC_SIG = Signature.from_dict({"c": 0, "S": 1})
SUCC_BOUND = 7


class TestTermAlgebra:
    """In the term algebra the image of a term is its set of ground instances."""

    @pytest.mark.property
    @settings(max_examples=50, deadline=None)
    @given(st.sampled_from(list(enumerate_terms(SUCC_SIG, 2, 5))))
    def test_ground_instances_are_the_image(self, t):
        ground = list(enumerate_terms(SUCC_SIG, 0, SUCC_BOUND))
        image = {apply_substitution(t, {i: g for i in variables(t)}) for g in ground}
        instances = {g for g in ground if is_instance(g, t)}
        assert instances == {u for u in image if size(u) <= SUCC_BOUND}
        if not variables(t):
            assert image == {t}
