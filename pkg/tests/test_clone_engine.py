"""Unit tests for clone_engine module."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from algebra import AlgebraPair, BudgetExceededError, image_mask, minimal_image_pairs, term_function
from automata import INFINITE, Cardinality
from clone_engine import (
    VariableRangeError, characteristic_gens, generate_clone, is_characteristic_set,
    k_generalizations, tree_report,
)
from selftest import check_tree_isomorphism_case
from terms import App, Var, enumerate_terms, parse_term
from tests.conftest import make_algebra


def truth_table(t, alg, k):
    return tuple(term_function(t, alg, list(range(1, k + 1))).tolist())


class TestGenerateClone:
    """Tests for clone closure."""

    def test_bool_unary_clone(self, bool_alg):
        clone = generate_clone(AlgebraPair.of(bool_alg), 1)
        assert len(clone) == 4
        assert sorted(fn.first for fn in clone.functions) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_bool_binary_clone_is_complete(self, bool_alg):
        clone = generate_clone(AlgebraPair.of(bool_alg), 2)
        assert len(clone) == 16

    def test_witnesses_realize_their_functions(self, bool_alg):
        clone = generate_clone(AlgebraPair.of(bool_alg), 2)
        for fn in clone.functions:
            assert truth_table(fn.witness, bool_alg, 2) == fn.first

    def test_states_in_witness_order(self, bool_alg):
        clone = generate_clone(AlgebraPair.of(bool_alg), 1)
        keys = [(fn.size, str(fn.witness)) for fn in clone.functions]
        assert keys == sorted(keys)
        assert [str(fn.witness) for fn in clone.functions[:3]] == ["one", "x1", "zero"]

    def test_ground_clone(self, bool_alg):
        ground = generate_clone(AlgebraPair.of(bool_alg), 0)
        assert [fn.first for fn in ground.functions] == [(1,), (0,)]
        assert ground.roots == []

    def test_pair_of_algebras_tracks_both_tables(self, chain_alg, swap_alg):
        clone = generate_clone(AlgebraPair(chain_alg, swap_alg), 1)
        assert [(fn.first, fn.second) for fn in clone.functions] == [
            ((0, 1), (0, 1)), ((1, 1), (1, 0)), ((1, 1), (0, 1)),
        ]

    def test_lookup(self, z3_alg):
        clone = generate_clone(AlgebraPair.of(z3_alg), 1)
        state = clone.lookup(parse_term("add(x1,neg(x1))", z3_alg.signature))
        assert clone.functions[state].first == (0, 0, 0)
        with pytest.raises(VariableRangeError):
            clone.lookup(Var(2))

    def test_budget(self, bool_alg):
        with pytest.raises(BudgetExceededError) as info:
            generate_clone(AlgebraPair.of(bool_alg), 2, budget=5)
        assert info.value.limit == 5

    def test_negative_k(self, bool_alg):
        with pytest.raises(ValueError):
            generate_clone(AlgebraPair.of(bool_alg), -1)

    def test_term_counts(self, chain_alg):
        clone = generate_clone(AlgebraPair.of(chain_alg), 1)
        counts, infinite = clone.term_counts()
        x1 = clone.lookup(Var(1))
        # only x1 itself has the identity function; S(x1), S(S(x1)), ... share the other
        assert counts[x1] == 1
        assert clone.cardinality([x1]) == Cardinality(1)
        assert clone.lookup(parse_term("S(x1)", chain_alg.signature)) in infinite

    def test_dot(self, bool_alg):
        clone = generate_clone(AlgebraPair.of(bool_alg), 1)
        text = clone.to_dot([0])
        assert text.startswith('digraph "clone"')
        assert 'label="not"' in text


class TestSaturation:
    """Every small term function over x1..xk is a state of the clone."""

    @pytest.mark.parametrize("k", [1, 2])
    @pytest.mark.parametrize("name", ["bool", "loop", "swap", "chain", "empty2"])
    def test_fixture_clones(self, request, name, k):
        alg = request.getfixturevalue(f"{name}_alg")
        clone = generate_clone(AlgebraPair.of(alg), k)
        for t in enumerate_terms(alg.signature, k, 5):
            witness = clone.functions[clone.lookup(t)].witness
            assert truth_table(witness, alg, k) == truth_table(t, alg, k)

    @pytest.mark.property
    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=1, max_value=2))
    def test_random_pairs(self, seed, k):
        rng = random.Random(seed)
        signature = {"f": 2, "g": 1, "c": 0}
        pair = AlgebraPair(make_algebra(rng, rng.randint(1, 2), signature, "A"),
                           make_algebra(rng, rng.randint(1, 2), signature, "B"))
        clone = generate_clone(pair, k)
        states = {clone.lookup(t) for t in enumerate_terms(pair.signature, k, 5)}
        assert states <= set(range(len(clone)))


class TestIsomorphism:
    """Minimal pairs and term counts are carried along isomorphisms."""

    @pytest.mark.parametrize("k", [1, 2])
    @pytest.mark.parametrize("name", ["bool", "z3", "swap", "chain"])
    def test_fixtures(self, request, name, k):
        alg = request.getfixturevalue(f"{name}_alg")
        renaming = {e: f"p{i}" for i, e in enumerate(reversed(alg.universe))}
        assert check_tree_isomorphism_case(alg, renaming, k, 10 ** 6) == 0

    def test_powerset(self, powerset2_alg):
        renaming = {e: f"s{i}" for i, e in enumerate(sorted(powerset2_alg.universe, reverse=True))}
        assert check_tree_isomorphism_case(powerset2_alg, renaming, 1, 10 ** 6) == 0

    @pytest.mark.property
    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_random_algebras(self, seed):
        rng = random.Random(seed)
        arity = rng.randint(1, 2)
        alg = make_algebra(rng, rng.randint(1, 3 if arity == 1 else 2), {"f": arity, "c": 0})
        targets = [f"p{i}" for i in range(alg.size)]
        rng.shuffle(targets)
        renaming = dict(zip(alg.universe, targets))
        assert check_tree_isomorphism_case(alg, renaming, rng.randint(1, 2), 10 ** 6) == 0


class TestKGeneralizations:
    """Tests for minimal k-generalizations."""

    def test_bool_unsatisfiable(self, bool_alg):
        report = k_generalizations("0", "0", AlgebraPair.of(bool_alg), 2)
        assert report.minimal_pairs == ((("0",), ("0",)),)
        assert report.witnesses == (App("zero"),)
        assert report.cardinality == INFINITE
        assert report.accepts(parse_term("not(or(x1,not(x1)))", bool_alg.signature))

    def test_bool_zero_one(self, bool_alg):
        report = k_generalizations("0", "1", AlgebraPair.of(bool_alg), 2)
        assert report.minimal_pairs == ((("0", "1"), ("0", "1")),)
        # 16 binary functions minus the two constants
        assert len(report.finals) == 14
        assert report.witnesses == (Var(1),)

    def test_members_and_classes(self, bool_alg):
        report = k_generalizations("1", "1", AlgebraPair.of(bool_alg), 1)
        assert report.classes == 1
        assert report.members(3) == [App("one")]

    def test_variable_range(self, bool_alg):
        report = k_generalizations("0", "1", AlgebraPair.of(bool_alg), 1)
        with pytest.raises(VariableRangeError):
            report.accepts(Var(2))

    def test_reuses_clone(self, z3_alg):
        pair = AlgebraPair.of(z3_alg)
        clone = generate_clone(pair, 1)
        assert (k_generalizations("1", "2", pair, 1, clone=clone).finals
                == tree_report(clone, 0b010, 0b100).finals)

    def test_trivial_when_everything_is_minimal(self, swap_alg):
        report = k_generalizations("a", "b", AlgebraPair.of(swap_alg), 1)
        assert report.trivial
        assert report.cardinality == INFINITE

    def test_matches_term_enumeration(self, z3_alg):
        report = k_generalizations("0", "0", AlgebraPair.of(z3_alg), 1)
        masks = [(image_mask(t, z3_alg), image_mask(t, z3_alg))
                 for t in enumerate_terms(z3_alg.signature, 1, 5)]
        brute = minimal_image_pairs(m for m in masks if m[0] & 1)
        assert set(report.image_masks) == set(brute)


class TestCharacteristic:
    """Tests for characteristic generalizations and sets."""

    def test_z3_x_plus_minus_x(self, z3_alg):
        t = parse_term("add(x1,neg(x1))", z3_alg.signature)
        report = characteristic_gens("0", z3_alg, 1)
        assert report.accepts(t)
        assert is_characteristic_set([t], "0", z3_alg, 1)

    def test_powerset_excluded_middle(self, powerset2_alg):
        t = parse_term("cup(x1,comp(x1))", powerset2_alg.signature)
        assert characteristic_gens("{1,2}", powerset2_alg, 1).accepts(t)
        assert is_characteristic_set([t], "{1,2}", powerset2_alg, 1)

    def test_variable_is_not_characteristic(self, z3_alg):
        assert not is_characteristic_set([Var(1)], "0", z3_alg, 1)

    def test_empty_set_is_not_characteristic(self, z3_alg):
        assert not is_characteristic_set([], "0", z3_alg, 1)

    def test_variable_range(self, z3_alg):
        with pytest.raises(VariableRangeError):
            is_characteristic_set([Var(3)], "0", z3_alg, 2)

    def test_bool_characteristic_of_one(self, bool_alg):
        report = characteristic_gens("1", bool_alg, 2)
        valid = parse_term("or(x1,not(x1))", bool_alg.signature)
        satisfiable = parse_term("or(x1,x2)", bool_alg.signature)
        assert report.accepts(valid)
        assert not report.accepts(satisfiable)
