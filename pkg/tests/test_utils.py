"""
Tests for utility functions
"""

from fractions import Fraction

import pytest
from rich.console import Console

from markovcanon.utils.config import Config, SearchSettings, load_config
from markovcanon.utils.file_utils import read_text_file, safe_write_file, sidecar_path
from markovcanon.utils.permutation import Permutation, generated_group, is_transitive
from markovcanon.utils.rationals import format_rational, parse_rational
from markovcanon.utils.report import Report, ReportRenderer, format_value
from markovcanon.utils.validators import (
    validate_configuration,
    validate_input_file,
    validate_output_dir,
)


class TestConfig:
    """Test cases for configuration loading."""

    def test_defaults(self):
        """Test the packaged defaults."""
        config = Config(load_config())
        assert config.get("search.n_max") == 8
        assert config.get("simulate.burn_in") == 64
        assert config.get("output.mode") == "human"
        assert config.get("search.missing", "fallback") == "fallback"

    def test_user_file_merges(self, tmp_path):
        """Test that a user file overrides single keys and keeps the rest."""
        path = tmp_path / "config.yaml"
        path.write_text("search:\n  n_max: 3\n")
        config = Config(load_config(path))
        assert config.get("search.n_max") == 3
        assert config.get("search.d_max") == 6

    def test_user_file_must_be_mapping(self, tmp_path):
        """Test that a YAML list is rejected."""
        path = tmp_path / "config.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ValueError, match="mapping"):
            load_config(path)

    def test_environment_override(self, monkeypatch):
        """Test MARKOVCANON_* variables with nested keys."""
        monkeypatch.setenv("MARKOVCANON_SEARCH__N_MAX", "4")
        monkeypatch.setenv("MARKOVCANON_SEARCH__ACCEPT_BUDGETED_MINIMALITY", "true")
        config = Config(load_config())
        assert config.get("search.n_max") == 4
        assert config.get("search.accept_budgeted_minimality") is True

    def test_set_creates_sections(self):
        """Test dot-key assignment."""
        config = Config()
        config.set("output.certificate_dir", "certs")
        assert config.to_dict()["output"]["certificate_dir"] == "certs"

    def test_search_settings(self):
        """Test the typed search view and its report echo."""
        config = Config({"search": {"jobs": 2, "coloring_time_limit": 1.5}})
        settings = config.search_settings()
        assert settings == SearchSettings(jobs=2, coloring_time_limit=1.5)
        echo = dict(settings.echo())
        assert echo["config.jobs"] == 2
        assert echo["config.n_max"] == 8


class TestValidators:
    """Test cases for validation functions."""

    def test_validate_configuration(self):
        """Test that the defaults validate."""
        assert validate_configuration(Config().to_dict())

    @pytest.mark.parametrize(
        "section, key, value",
        [
            ("search", "n_max", 0),
            ("search", "jobs", True),
            ("search", "coloring_time_limit", -1),
            ("search", "accept_budgeted_minimality", "yes"),
            ("simulate", "seed", -5),
            ("output", "mode", "json"),
            ("logging", "level", "LOUD"),
        ],
    )
    def test_invalid_configuration(self, section, key, value):
        """Test that each out-of-range value is rejected."""
        with pytest.raises(ValueError):
            validate_configuration({section: {key: value}})

    def test_validate_input_file(self, tmp_path):
        """Test input file validation."""
        path = tmp_path / "graph.sgf"
        path.write_text("vertex u\n")
        assert validate_input_file(path)
        with pytest.raises(ValueError, match="does not exist"):
            validate_input_file(tmp_path / "absent.sgf")
        with pytest.raises(ValueError, match="not a file"):
            validate_input_file(tmp_path)

    def test_validate_output_dir(self, tmp_path):
        """Test that output directories are created and files are refused."""
        target = tmp_path / "nested" / "certs"
        assert validate_output_dir(target)
        assert target.is_dir()
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(ValueError, match="not a directory"):
            validate_output_dir(blocker)


class TestFileUtils:
    """Test cases for file utilities."""

    def test_write_and_read(self, tmp_path):
        """Test writing into a missing directory and reading back."""
        path = tmp_path / "out" / "form.sgf"
        assert safe_write_file(path, "vertex o\n")
        assert read_text_file(path) == "vertex o\n"

    def test_read_missing(self, tmp_path):
        """Test that unreadable files raise ValueError."""
        with pytest.raises(ValueError):
            read_text_file(tmp_path / "absent")

    def test_sidecar_path(self, tmp_path):
        """Test sidecar naming next to the input and in a directory."""
        source = tmp_path / "drunkard.sgf"
        assert sidecar_path(source, ".cert") == tmp_path / "drunkard.cert"
        assert sidecar_path(source, ".cert", tmp_path / "c") == tmp_path / "c" / "drunkard.cert"


class TestRationals:
    """Test cases for exact rational literals."""

    def test_forms(self):
        """Test integer, ratio and decimal literals."""
        assert parse_rational("3") == 3
        assert parse_rational("2/6") == Fraction(1, 3)
        assert parse_rational("0.125") == Fraction(1, 8)

    @pytest.mark.parametrize("text", ["1/0", "1e-3", "", "a/b", "1/3/4"])
    def test_rejected(self, text):
        """Test malformed literals."""
        with pytest.raises(ValueError):
            parse_rational(text)

    def test_format(self):
        """Test that integers drop the denominator."""
        assert format_rational(Fraction(4, 2)) == "2"
        assert format_rational(Fraction(2, 3)) == "2/3"


class TestPermutation:
    """Test cases for fiber permutations."""

    def test_composition_order(self):
        """Test that (a * b)(y) = a(b(y))."""
        a = Permutation.parse("[2 3 1]")
        b = Permutation.transposition(3, 0, 1)
        assert (a * b)(0) == a(b(0))
        assert (a * a.inverse()).is_identity()

    def test_parse_and_format(self):
        """Test one-line notation."""
        assert str(Permutation.parse(" [3 1 2] ")) == "[3 1 2]"
        with pytest.raises(ValueError):
            Permutation.parse("3 1 2")
        with pytest.raises(ValueError):
            Permutation.parse("[1 1]")

    def test_all_and_group(self):
        """Test enumeration and generated subgroups."""
        assert len(list(Permutation.all(3))) == 6
        cycle = Permutation.parse("[2 3 1]")
        assert len(generated_group([cycle], 3)) == 3
        assert len(generated_group([cycle, Permutation.transposition(3, 0, 1)], 3)) == 6

    def test_is_transitive(self):
        """Test transitivity of generated groups on Y_d."""
        cycle = Permutation.parse("[2 3 1]")
        swap = Permutation.transposition(3, 0, 1)
        assert is_transitive([cycle], 3)
        assert not is_transitive([swap], 3)
        assert not is_transitive([], 2)
        assert is_transitive([], 1)


class TestReport:
    """Test cases for report rendering."""

    def test_format_value(self):
        """Test value rendering."""
        assert format_value(True) == "true"
        assert format_value(None) == "none"
        assert format_value([Fraction(4, 7), Fraction(1, 7)]) == "4/7,1/7"

    def test_report_lines(self):
        """Test key=value output order."""
        report = Report("info").add("period", 1).add("irreducible", True)
        assert report.lines() == ["period=1", "irreducible=true"]
        assert report.get("period") == "1"
        assert report.get("missing") is None

    def test_render_human(self):
        """Test that human mode separates settings from results."""
        renderer = ReportRenderer("human", Console())
        report = Report("degree").add("degree", 2).extend([("config.n_max", 8)])
        text = renderer.render_human(report)
        assert "Coloring degree" in text
        assert "search settings: n_max=8" in text

    def test_render_iso(self):
        """Test the verdict headline."""
        renderer = ReportRenderer()
        report = Report("iso").add("verdict", "no").add("reason", "period-mismatch")
        assert "Not isomorphic" in renderer.render_human(report)
