"""Unit tests for query_config module."""

import json

import pytest

from query_config import (
    DEFAULT_CONFIG_PATH, QueryConfigBuilder, QueryConfigError, compute_changes_from_default,
    parse_fragment, split_list,
)


class TestQueryConfigBuilder:
    """Tests for QueryConfigBuilder class."""

    def test_default_config(self):
        """Test that a new builder carries the documented defaults."""
        builder = QueryConfigBuilder()
        assert builder.config["query"] is None
        assert builder.config["k"] == 2
        assert builder.config["format"] == "text"
        assert builder.config["clone_budget"] == 1000000

    def test_defaults_match_template(self):
        """Test that config.default.json and the builder agree."""
        assert QueryConfigBuilder.load_default().config == QueryConfigBuilder().config

    def test_with_query_invalid(self):
        """Test that unknown subcommands are rejected."""
        with pytest.raises(QueryConfigError, match="Invalid query: unify"):
            QueryConfigBuilder().with_query("unify")

    def test_with_inputs_counts(self):
        """Test that one or two algebra files are accepted."""
        builder = QueryConfigBuilder().with_inputs(["a.json", "b.json"])
        assert builder.config["inputs"] == ["a.json", "b.json"]
        with pytest.raises(QueryConfigError, match="one or two"):
            builder.with_inputs([])
        with pytest.raises(QueryConfigError, match="one or two"):
            builder.with_inputs(["a", "b", "c"])
        with pytest.raises(QueryConfigError, match="empty values"):
            builder.with_inputs(["a.json", " "])

    def test_with_elements_strips_whitespace(self):
        builder = QueryConfigBuilder().with_elements([" 0 "], ["1"])
        assert builder.config["left"] == ["0"]
        assert builder.config["right"] == ["1"]

    def test_with_elements_duplicates(self):
        """Test that duplicate element ids raise error."""
        with pytest.raises(QueryConfigError, match="Right elements contain duplicates"):
            QueryConfigBuilder().with_elements(["a"], ["b", "b"])

    def test_with_elements_empty_string(self):
        with pytest.raises(QueryConfigError, match="Left elements contain empty values"):
            QueryConfigBuilder().with_elements(["a", ""])

    def test_with_terms(self):
        """Test that term lists must be non-empty."""
        assert QueryConfigBuilder().with_terms([" x1 "]).config["terms"] == ["x1"]
        with pytest.raises(QueryConfigError):
            QueryConfigBuilder().with_terms([])

    @pytest.mark.parametrize("k", [0, -1, True, "2"])
    def test_with_k_invalid(self, k):
        """Test that k must be a positive integer."""
        with pytest.raises(QueryConfigError, match="positive integer"):
            QueryConfigBuilder().with_k(k)

    def test_with_fragment(self):
        """Test fragment bounds, including the unbounded form."""
        builder = QueryConfigBuilder().with_fragment(1, "inf")
        assert builder.config["fragment"] == [1, "inf"]
        assert builder.config["k"] == 1
        with pytest.raises(QueryConfigError, match="Occurrence bound"):
            builder.with_fragment(1, 0)

    def test_with_budget_sets_both_caps(self):
        builder = QueryConfigBuilder().with_budget(50)
        assert builder.config["clone_budget"] == 50
        assert builder.config["homomorphism_budget"] == 50
        with pytest.raises(QueryConfigError):
            builder.with_budget(0)

    def test_with_format_invalid(self):
        with pytest.raises(QueryConfigError, match="Invalid format: json"):
            QueryConfigBuilder().with_format("json")

    def test_with_witnesses_and_seed(self):
        builder = QueryConfigBuilder().with_witnesses(0).with_seed(-3)
        assert builder.config["witnesses"] == 0
        assert builder.config["seed"] == -3
        with pytest.raises(QueryConfigError):
            builder.with_witnesses(-1)
        with pytest.raises(QueryConfigError):
            builder.with_seed(1.5)

    def test_method_chaining(self):
        """Test that builder methods can be chained."""
        config = (QueryConfigBuilder()
                  .with_query("antiunify")
                  .with_inputs(["bool.json"])
                  .with_elements(["0"], ["1"])
                  .with_k(1)
                  .with_format("machine")
                  .validate())
        assert config["query"] == "antiunify"
        assert config["k"] == 1
        assert config["format"] == "machine"


class TestValidate:
    """Tests for cross-field validation."""

    def test_query_required(self):
        with pytest.raises(QueryConfigError, match="Query kind is required"):
            QueryConfigBuilder().validate()

    def test_input_required(self):
        """Test that every query but selftest needs an algebra file."""
        with pytest.raises(QueryConfigError, match="needs an algebra file"):
            QueryConfigBuilder().with_query("check").validate()
        assert QueryConfigBuilder().with_query("selftest").validate()["query"] == "selftest"

    def test_single_input_queries(self):
        builder = QueryConfigBuilder().with_query("gens").with_inputs(["a", "b"]).with_elements(["x"])
        with pytest.raises(QueryConfigError, match="single algebra file"):
            builder.validate()

    def test_antiunify_needs_both_elements(self):
        builder = QueryConfigBuilder().with_query("antiunify").with_inputs(["a"]).with_elements(["x"])
        with pytest.raises(QueryConfigError, match="--left and one --right"):
            builder.validate()

    def test_antiunify_set_needs_sets(self):
        builder = QueryConfigBuilder().with_query("antiunify-set").with_inputs(["a"])
        with pytest.raises(QueryConfigError, match="non-empty"):
            builder.validate()

    def test_check_charset_needs_terms(self):
        builder = (QueryConfigBuilder().with_query("check-charset")
                   .with_inputs(["a"]).with_elements(["0"]))
        with pytest.raises(QueryConfigError, match="--terms"):
            builder.validate()

    def test_monolinear_excludes_fragment(self):
        """Test that the two fragment selectors cannot be combined."""
        builder = (QueryConfigBuilder().with_query("antiunify").with_inputs(["a"])
                   .with_elements(["x"], ["y"]).with_fragment(1, 1).with_monolinear())
        with pytest.raises(QueryConfigError, match="mutually exclusive"):
            builder.validate()

    def test_loaded_values_are_revalidated(self):
        """Test that from_dict does not bypass validation."""
        builder = QueryConfigBuilder.from_dict({"query": "selftest", "clone_budget": 0})
        with pytest.raises(QueryConfigError, match="clone_budget"):
            builder.validate()


class TestPersistence:
    """Tests for saving and loading configs."""

    def test_save_creates_file(self, tmp_path):
        """Test that save writes the validated config."""
        path = tmp_path / "query.json"
        QueryConfigBuilder().with_query("selftest").with_seed(7).save(str(path))
        saved = json.loads(path.read_text())
        assert saved["query"] == "selftest"
        assert saved["seed"] == 7

    def test_save_default_path(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        QueryConfigBuilder().with_query("selftest").save()
        assert (tmp_path / "query.json").exists()

    def test_load_keeps_missing_defaults(self, tmp_path):
        """Test that keys absent from a file keep their defaults."""
        path = tmp_path / "partial.json"
        path.write_text(json.dumps({"query": "type", "inputs": ["a.json"], "k": 3}))
        builder = QueryConfigBuilder.load(str(path))
        assert builder.config["k"] == 3
        assert builder.config["max_term_size"] == 8

    def test_load_default_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="Default config not found"):
            QueryConfigBuilder.load_default(tmp_path / "nonexistent.json")

    def test_default_path_is_next_to_module(self):
        assert DEFAULT_CONFIG_PATH.name == "config.default.json"
        assert DEFAULT_CONFIG_PATH.exists()


class TestParsing:
    """Tests for command-line value parsers."""

    @pytest.mark.parametrize("text,expected", [
        ("1,1", (1, 1)),
        ("2, inf", (2, "inf")),
        ("3,∞", (3, "inf")),
    ])
    def test_parse_fragment(self, text, expected):
        assert parse_fragment(text) == expected

    @pytest.mark.parametrize("text", ["1", "1,2,3", "a,1", "1,many"])
    def test_parse_fragment_malformed(self, text):
        with pytest.raises(QueryConfigError, match="K,L"):
            parse_fragment(text)

    def test_split_list_keeps_terms_whole(self):
        assert split_list("or(x1,x2), not(x1)") == ["or(x1,x2)", "not(x1)"]

    def test_split_list_keeps_set_names_whole(self):
        assert split_list("{1,2},{}") == ["{1,2}", "{}"]

    def test_split_list_drops_blanks(self):
        assert split_list("a,,b,") == ["a", "b"]


class TestComputeChangesFromDefault:
    """Tests for compute_changes_from_default helper function."""

    def test_no_changes(self):
        """Test when config matches default exactly."""
        default = QueryConfigBuilder().config
        changed, changes = compute_changes_from_default(default, dict(default))
        assert changed == []
        assert changes == {}

    def test_multiple_changes(self):
        default = QueryConfigBuilder().config
        new = dict(default, k=1, format="dot")
        changed, changes = compute_changes_from_default(default, new)
        assert changed == ["k", "format"]
        assert changes["k"] == {"old": 2, "new": 1}
        assert changes["format"] == {"old": "text", "new": "dot"}
