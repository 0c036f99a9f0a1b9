"""Unit tests for report module."""

import json

import pytest

from algebra import AlgebraPair
from fragments import bounded_fragment_gens
from report import (
    SCHEMA, echo_text, render_charset, render_check, render_generalizations, render_selftest,
    render_type, render_up_set,
)
from unary_engine import classify_type, minimal_gens, up_set_dfa


def records(text):
    return [json.loads(line) for line in text.splitlines()]


@pytest.fixture
def query():
    return {"query": "antiunify", "inputs": ["chain.json"], "left": ["a"], "right": ["b"]}


class TestGeneralizations:
    """Tests for rendering minimal generalizations."""

    def test_text_report(self, chain_alg, query):
        report = minimal_gens("a", "b", AlgebraPair.of(chain_alg))
        text = render_generalizations(report, query)
        assert text.splitlines() == [
            "query: antiunify chain.json left=a right=b",
            "left: {a}",
            "right: {b}",
            "minimal pairs: 1",
            "  {a,b} / {a,b}  witness x1",
            "terms: one",
            "classes: 1",
            "trivial: no",
            "members: x1",
            "summary: one; nontrivial",
        ]

    def test_sigma_star_summary(self, swap_alg, query):
        report = minimal_gens("a", "b", AlgebraPair.of(swap_alg))
        text = render_generalizations(report, query, witnesses=2)
        assert "summary: infinite; trivial; Σ*" in text
        assert "members: x1, S(x1)" in text

    def test_k_note(self, chain_alg, query):
        report = minimal_gens("a", "b", AlgebraPair.of(chain_alg))
        text = render_generalizations(report, query, k=3)
        assert text.endswith("note: results are relative to k = 3\n")

    def test_machine_records(self, chain_alg, query):
        """Test the schema header followed by pair and summary records."""
        report = minimal_gens("b", "b", AlgebraPair.of(chain_alg))
        lines = records(render_generalizations(report, query, fmt="machine", duration_s=0.5))
        assert lines[0] == {"schema": SCHEMA, "query": query}
        assert lines[1] == {"record": "minimal_pair", "first": ["b"], "second": ["b"], "witness": "S(x1)"}
        summary = lines[-1]
        assert summary["record"] == "summary"
        assert summary["cardinality"] == "infinite"
        assert summary["terms"] is None
        assert summary["approximate"] is False
        assert summary["duration_s"] == 0.5

    def test_approximate_summary(self, bool_alg, query):
        report = bounded_fragment_gens("0", "1", AlgebraPair.of(bool_alg), 1, 1, max_size=3)
        text = render_generalizations(report, query)
        assert "approximate (terms up to size 3)" in text

    def test_dot(self, chain_alg, query):
        report = minimal_gens("a", "b", AlgebraPair.of(chain_alg))
        assert render_generalizations(report, query, fmt="dot").startswith(
            'digraph "minimal_generalizations"'
        )

    def test_dot_needs_an_automaton(self, bool_alg, query):
        report = bounded_fragment_gens("0", "1", AlgebraPair.of(bool_alg), 1, 1, max_size=3)
        with pytest.raises(ValueError, match="no automaton"):
            render_generalizations(report, query, fmt="dot")


class TestOtherQueries:
    """Tests for the remaining renderers."""

    def test_echo_text_skips_empty_sides(self):
        assert echo_text({"query": "check", "inputs": ["bool.json"], "left": []}) == "check bool.json"

    def test_up_set(self, chain_alg):
        text = render_up_set(up_set_dfa("a", chain_alg), "a", {"query": "gens"})
        assert "words: one" in text
        assert "universal: no" in text
        assert "members: ε" in text

    def test_up_set_machine(self, chain_alg):
        lines = records(render_up_set(up_set_dfa("b", chain_alg), "b", {"query": "gens"}, fmt="machine"))
        assert lines[1]["record"] == "up_set"
        assert lines[1]["universal"] is True
        assert lines[1]["members"][:2] == ["ε", "S"]

    def test_type_text_and_machine(self, chain_alg):
        result = classify_type(AlgebraPair.of(chain_alg))
        text = render_type(result, {"query": "type", "inputs": ["chain.json"]})
        assert text.splitlines()[-1] == "type: infinitary"
        lines = records(render_type(result, {"query": "type"}, fmt="machine", k=2))
        assert len(lines) == 2 + len(result.pairs)
        assert lines[-1] == {"record": "summary", "labels": ["infinitary"], "label": "infinitary", "k": 2}

    def test_type_has_no_dot(self, chain_alg):
        with pytest.raises(ValueError):
            render_type(classify_type(AlgebraPair.of(chain_alg)), {}, fmt="dot")

    def test_check(self):
        assert render_check("BOOL", None, {}) == "ok: BOOL\n"
        assert render_check("BOOL", "bad row", {}) == "invalid: bad row\n"
        lines = records(render_check("BOOL", None, {"query": "check"}, fmt="machine"))
        assert lines[1] == {"record": "check", "algebra": "BOOL", "ok": True, "error": None}

    def test_charset(self):
        text = render_charset(True, ["or(x1,not(x1))"], "1", 1, {"query": "check-charset"})
        assert "characteristic for 1: yes" in text
        assert "note: results are relative to k = 1" in text

    def test_selftest(self):
        results = [{"check": "unary", "cases": 3, "mismatches": 0},
                   {"check": "clone", "cases": 2, "mismatches": 1}]
        assert render_selftest(results, {}) == (
            "unary: 3 cases, 0 mismatches\nclone: 2 cases, 1 mismatches\nmismatches: 1\n"
        )
        lines = records(render_selftest(results, {"query": "selftest"}, fmt="machine"))
        assert lines[-1] == {"record": "summary", "mismatches": 1}
