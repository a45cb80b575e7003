"""
Tests for run-config parsing, anchored validation messages, presets and the
command-line entry point.
"""

import io
from pathlib import Path
from textwrap import dedent

import pytest

import app
from config import OUTPUT_DIR_ENV, reload_config
from quasistatic_fracture.cli.commands import cmd_interpolation_error, cmd_validate
from quasistatic_fracture.cli.presets import PRESETS, deep_merge
from quasistatic_fracture.cli.run_config import (
    Anchor,
    ConfigError,
    check_run_config,
    key_lines,
    load_run_config,
    parse_run_config,
    preset_config,
)
from quasistatic_fracture.exporters import read_table

TEMPLATES = Path(__file__).resolve().parents[2] / "templates"


def _write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(dedent(text).lstrip())
    return path


def _issues(path):
    with pytest.raises(ConfigError) as info:
        load_run_config(path)
    return info.value.result.issues


@pytest.fixture
def env_output(monkeypatch, tmp_path):
    target = tmp_path / "from-env"
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(target))
    reload_config()
    yield target
    monkeypatch.delenv(OUTPUT_DIR_ENV)
    reload_config()


class TestKeyLines:
    TEXT = dedent("""
        seed = 1
        [domain]
        polygon = []
        [[domain.boundary]]
        label = "dirichlet"
        [[domain.boundary]]
        label = "traction"
    """).lstrip()

    def test_tables_and_arrays_of_tables(self):
        lines = key_lines(self.TEXT)
        assert lines['seed'] == 1
        assert lines['domain.polygon'] == 3
        assert lines['domain.boundary'] == 4
        assert lines['domain.boundary[1]'] == 6
        assert lines['domain.boundary[1].label'] == 7

    def test_anchor_falls_back_to_the_enclosing_key(self):
        anchor = Anchor("run.toml", key_lines(self.TEXT))
        assert anchor("domain.boundary[1].start", "bad") == "run.toml:6: domain.boundary[1].start: bad"
        assert anchor("domain.polygon[2]", "bad") == "run.toml:3: domain.polygon[2]: bad"
        assert anchor("model.mu", "bad") == "run.toml: model.mu: bad"

    def test_preset_keys_name_the_preset(self):
        anchor = Anchor("run.toml", {}, "strip-notch")
        assert anchor("model.mu", "bad") == "run.toml: model.mu (preset strip-notch): bad"


class TestSchema:
    def test_grid_outside_knot_range(self, tmp_path):
        path = _write(tmp_path, """
            preset = "strip-notch"
            [discretization]
            a = 0.1
            adaptive_grid = [0.05, 0.5]
        """)
        assert _issues(path) == [
            f"{path}:4: discretization.adaptive_grid[0]: 0.05 outside [a, 1 - a] = [0.1, 0.9]"
        ]

    def test_delta_and_steps_conflict(self, tmp_path):
        path = _write(tmp_path, """
            preset = "uniform-stretch"
            [discretization]
            delta = 0.1
        """)
        (issue,) = _issues(path)
        assert issue.endswith("discretization.delta: give either delta or steps, not both")
        assert issue.startswith(f"{path}:3:")

    def test_range_errors_are_anchored(self, tmp_path):
        path = _write(tmp_path, """
            preset = "uniform-stretch"
            [model]
            mu = -1.0
            bulk = "cubic"
        """)
        issues = _issues(path)
        assert any(i.startswith(f"{path}:3: model.mu: must be in (0.0, inf]") for i in issues)
        assert any(i.startswith(f"{path}:4: model.bulk: must be one of quadratic, p_norm") for i in issues)

    def test_unknown_keys_warn(self):
        with pytest.raises(ConfigError) as info:
            parse_run_config({"preset": "uniform-stretch", "colour": 1, "seed": -1})
        result = info.value.result
        assert any("colour" in w and "unknown key ignored" in w for w in result.warnings)
        assert any("seed" in i for i in result.issues)

    def test_unknown_preset(self):
        with pytest.raises(ConfigError) as info:
            parse_run_config({"preset": "nope"})
        assert "unknown preset 'nope'" in info.value.result.issues[0]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="file not found"):
            load_run_config(tmp_path / "absent.toml")


class TestDeepChecks:
    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_presets_are_valid(self, name):
        check = check_run_config(preset_config(name))
        assert check.valid, check.result.issues
        assert check.derived['triangles'] > 0

    @pytest.mark.parametrize("template", sorted(p.name for p in TEMPLATES.glob("*.toml")))
    def test_templates_validate(self, template):
        stream = io.StringIO()
        assert cmd_validate(TEMPLATES / template, stream) == 0
        assert ": OK" in stream.getvalue()

    def test_traction_next_to_brittle_region(self):
        third = 1.0 / 3.0
        config = parse_run_config({
            "preset": "uniform-stretch",
            "domain": {"boundary": [
                {"start": [0.0, 0.0], "end": [0.0, third], "label": "dirichlet"},
                {"start": [1.0, 0.0], "end": [1.0, third], "label": "dirichlet"},
                {"start": [2 * third, 0.0], "end": [1.0, 0.0], "label": "traction"},
            ]},
        })
        (issue,) = check_run_config(config).result.issues
        assert "domain.boundary[2]" in issue
        assert "touches the brittle region" in issue

    def test_non_conforming_polygon(self):
        config = parse_run_config({"preset": "uniform-stretch", "discretization": {"eps": 0.3}})
        (issue,) = check_run_config(config).result.issues
        assert "domain.polygon[1]" in issue
        assert "does not lie on the" in issue


class TestOutputDirectory:
    def test_file_value_is_the_fallback(self):
        config = preset_config("uniform-stretch")
        assert config.output_directory() == Path("runs/latest")
        assert config.with_overrides(out="cli-out").output_directory() == Path("cli-out")

    def test_environment_beats_the_file(self, env_output):
        config = preset_config("uniform-stretch")
        assert config.output_directory() == env_output
        assert config.with_overrides(out="cli-out").output_directory() == Path("cli-out")

    def test_overrides(self):
        config = preset_config("strip-notch").with_overrides(threads=3, seed=7, solver="both")
        assert config.solver.threads == 3
        assert config.seed == 7
        assert config.solver_settings().mode == "both"


def test_deep_merge_replaces_lists():
    base = {"model": {"mu": 1.0, "force": ["0", "0"]}, "seed": 0}
    merged = deep_merge(base, {"model": {"force": ["1", "0"]}, "seed": 3})
    assert merged == {"model": {"mu": 1.0, "force": ["1", "0"]}, "seed": 3}
    assert base["model"]["force"] == ["0", "0"]


class TestEntryPoint:
    def test_no_command(self):
        assert app.main([]) == 1

    def test_validate(self):
        assert app.main(["validate", "--config", str(TEMPLATES / "uniform-stretch.toml")]) == 0

    def test_invalid_config_exit_code(self, tmp_path):
        path = _write(tmp_path, """
            preset = "uniform-stretch"
            [discretization]
            delta = 0.1
        """)
        assert app.main(["validate", "--config", str(path)]) == 1

    def test_sequence_argument(self):
        assert app._sequence("1/8,0.2,0.1; 1/16,0.1,0.05") == [(0.125, 0.2, 0.1), (0.0625, 0.1, 0.05)]
        with pytest.raises(Exception, match="expected eps,a,delta"):
            app._sequence("0.1,0.2")

    def test_interpolation_error_command(self, tmp_path):
        stream = io.StringIO()
        assert cmd_interpolation_error([0.0], [0.25], [0.2], out=tmp_path, stream=stream) == 0
        table = read_table(tmp_path / "interpolation_error.csv")
        assert len(table) == 1
        assert table['rel_error'].iloc[0] < 1e-12
        assert "fitted C = " in stream.getvalue()

    def test_interpolation_error_through_point(self, tmp_path):
        stream = io.StringIO()
        code = cmd_interpolation_error([45.0], [0.25], [0.2], out=tmp_path, stream=stream, point=(0.5, 0.55))
        assert code == 0
        table = read_table(tmp_path / "interpolation_error.csv")
        # y = x + 0.05 runs from (0, 0.05) to (0.95, 1)
        assert table['reference'].iloc[0] == pytest.approx(0.95 * 2 ** 0.5)

    def test_lemma41_alias_and_point(self):
        args = app.build_parser().parse_args(["lemma41", "--point", "0.5,0.55"])
        assert args.command == "lemma41"
        assert args.point == (0.5, 0.55)
        assert app.build_parser().parse_args(["interpolation-error"]).point is None
        with pytest.raises(Exception, match="expected x,y"):
            app._point("0.5")
