"""
End-to-end runs of the command layer on the shipped templates.
"""

import io
import json
from pathlib import Path

import pytest

from quasistatic_fracture.cli.commands import cmd_oracle_check, cmd_run, cmd_study
from quasistatic_fracture.cli.run_config import load_run_config
from quasistatic_fracture.crack import approximate_initial_crack
from quasistatic_fracture.exporters import read_json, read_ledger, read_table

TEMPLATES = Path(__file__).resolve().parents[2] / "templates"


@pytest.fixture
def stretch_run(tmp_path):
    out = tmp_path / "run"
    stream = io.StringIO()
    code = cmd_run(TEMPLATES / "uniform-stretch.toml", out=out, progress=False, stream=stream)
    return code, out, stream.getvalue()


class TestUniformStretchRun:
    def test_exit_code_and_artifacts(self, stretch_run):
        code, out, text = stretch_run
        assert code == 0, text
        assert (out / "ledger.csv").exists()
        assert (out / "summary.json").exists()
        assert (out / "mesh.vtk").exists()
        assert (out / "mesh.json").exists()
        for i in range(9):
            assert (out / f"crack_step_{i}.json").exists()
            assert (out / f"field_step_{i}.vtk").exists()
            assert (out / f"field_step_{i}.json").exists()
        assert "PASS" in text

    def test_summary_records_the_checks(self, stretch_run):
        _, out, _ = stretch_run
        summary = read_json(out / "summary.json")
        assert summary['preset'] == "uniform-stretch"
        assert summary['completed'] == 9
        assert summary['aborted'] is None
        checks = summary['checks']
        assert checks['passed'] is True
        assert checks['irreversibility'] is True
        assert checks['energy_inequality']['pairs'] == 45
        assert checks['reparse_error'] <= 1e-12
        assert summary['metrics']['counters']['steps'] == 9

    def test_ledger_matches_the_closed_form(self, stretch_run):
        _, out, _ = stretch_run
        ledger = read_ledger(out / "ledger.csv")
        assert [row.step for row in ledger] == list(range(9))
        for row in ledger:
            assert row.bulk == pytest.approx(row.t ** 2 / 3)
            assert row.crack_length == 0.0

    def test_crack_files_stay_empty(self, stretch_run):
        _, out, _ = stretch_run
        payload = json.loads((out / "crack_step_8.json").read_text())
        assert payload['step'] == 8
        assert payload['edges'] == []

    def test_run_log_is_written(self, stretch_run):
        _, out, _ = stretch_run
        assert list((out / "logs").glob("*.log"))

    def test_runs_are_reproducible(self, stretch_run, tmp_path):
        _, first, _ = stretch_run
        second = tmp_path / "again"
        assert cmd_run(TEMPLATES / "uniform-stretch.toml", out=second, progress=False,
                       stream=io.StringIO()) == 0
        assert (first / "ledger.csv").read_bytes() == (second / "ledger.csv").read_bytes()
        assert (first / "field_step_8.vtk").read_bytes() == (second / "field_step_8.vtk").read_bytes()


def test_invalid_config_writes_nothing(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text('preset = "uniform-stretch"\n[model]\nmu = -1.0\n')
    stream = io.StringIO()
    assert cmd_run(path, out=tmp_path / "out", progress=False, stream=stream) == 1
    assert "model.mu" in stream.getvalue()
    assert not (tmp_path / "out").exists()


@pytest.mark.slow
def test_audited_run(tmp_path):
    out = tmp_path / "audited"
    assert cmd_run(TEMPLATES / "uniform-stretch.toml", out=out, audit=True, progress=False,
                   stream=io.StringIO()) == 0
    audit = read_json(out / "summary.json")['checks']['minimality_audit']
    assert audit['violations'] == 0
    assert audit['competitors'] > 0


@pytest.mark.slow
def test_oracle_check_on_the_small_strip(tmp_path):
    stream = io.StringIO()
    code = cmd_oracle_check(TEMPLATES / "oracle-strip.toml", out=tmp_path, stream=stream)
    assert code == 0, stream.getvalue()
    table = read_table(tmp_path / "oracle_check.csv")
    assert len(table) == 11
    assert not table['gap'].isna().any()


@pytest.mark.slow
def test_small_refinement_study(tmp_path):
    stream = io.StringIO()
    third = 1.0 / 3.0
    code = cmd_study(TEMPLATES / "uniform-stretch.toml", out=tmp_path, stream=stream,
                     sequence=[(third, 0.2, 0.4), (third / 2, 0.1, 0.2)])
    assert code == 0
    table = read_table(tmp_path / "study.csv")
    assert sorted(table['eps'].unique()) == pytest.approx([third / 2, third])
    finer = table[table['eps'] < 0.2]
    assert {'d_elastic', 'd_surface', 'grad_diff'} <= set(table.columns)
    assert (finer['d_surface'] == 0.0).all()
    assert (tmp_path / "study_initial.csv").exists()


@pytest.mark.slow
@pytest.mark.parametrize("template", ["strip-notch.toml", "anisotropic-zigzag.toml"])
def test_notched_runs_grow_the_crack(template, tmp_path):
    stream = io.StringIO()
    code = cmd_run(TEMPLATES / template, out=tmp_path, progress=False, stream=stream)
    assert code == 0, stream.getvalue()
    checks = read_json(tmp_path / "summary.json")['checks']
    assert checks['passed'] is True
    assert checks['irreversibility'] is True
    assert checks['energy_inequality']['failures'] == 0
    assert checks['energy_inequality']['pairs'] == 66

    setup = load_run_config(TEMPLATES / template).to_setup()
    initial = approximate_initial_crack(setup.initial_crack, setup.mesh, setup.a).crack_set.total_length
    lengths = [row.crack_length for row in read_ledger(tmp_path / "ledger.csv")]
    assert len(lengths) == 11
    assert lengths[0] >= initial - 1e-12
    assert all(b >= a - 1e-12 for a, b in zip(lengths, lengths[1:]))
    assert lengths[-1] > initial
