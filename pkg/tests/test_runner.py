import json

import pytest

from beurling_kit.cli.runner import EXIT_FAILED, EXIT_OK, ScenarioRunner, run_scenario, run_scenario_sync
from beurling_kit.cli.scenario import bundled_scenario_dir, validate_scenario
from beurling_kit.errors import ConfigError

FAILING_COVER = {
    "kind": "cover",
    "body": {"kind": "box", "params": {"half_widths": [1.0]}},
    "set": {"kind": "integer_lattice", "dim": 1, "spacing": 2.0},
    "expected": 0.8,
}

VIOLATION = {
    "kind": "theorem3",
    "body": {"kind": "box", "params": {"half_widths": [1.0]}},
    "set": {"kind": "integer_lattice", "dim": 1, "spacing": 4.0},
    "window": [[0.0, 40.0]],
    "function": {"body": {"kind": "box", "params": {"half_widths": [1.0]}},
                 "terms": [{"re": 1.0, "im": 0.0, "freq": [0.5]}]},
}


def test_reports_follow_declaration_order(config, tmp_path):
    """Parallel workers still report in the order checks were declared"""
    scenario = validate_scenario({
        "name": "ordered",
        "checks": [
            {"kind": "lemma1_suite", "count": 4},
            {"kind": "constants", "rhos": [0.2, 0.3]},
            {"kind": "rouche_suite", "count": 2},
        ],
    })
    result = run_scenario_sync(scenario, config, jobs=3, out_dir=str(tmp_path / "out"))
    assert [r.check_name for r in result.reports] == ["lemma1"] * 4 + ["constants"] * 2 + ["rouche"] * 2
    assert result.exit_code == EXIT_OK


def test_failed_check_sets_exit_code(config, tmp_path):
    scenario = validate_scenario({"name": "failing", "checks": [FAILING_COVER]})
    result = run_scenario_sync(scenario, config, out_dir=str(tmp_path / "out"))
    assert result.failures == 1
    assert result.exit_code == EXIT_FAILED


def test_skipped_check_is_not_a_failure(config, tmp_path):
    scenario = validate_scenario({"name": "violation", "checks": [VIOLATION]})
    result = run_scenario_sync(scenario, config, out_dir=str(tmp_path / "out"))
    assert result.skipped == 1
    assert result.exit_code == EXIT_OK


def test_output_files_and_default_directory(config):
    scenario = validate_scenario({"name": "files", "checks": [{"kind": "constants", "rhos": [0.5]}]})
    result = run_scenario_sync(scenario, config)
    assert result.out_dir.name == "files"
    names = sorted(p.name for p in result.files)
    assert names == ["constants.csv", "extremal_sweep.csv", "metadata.json", "reports.json",
                     "summary.csv", "theorem3_ratios.csv"]


def test_plot_data_can_be_disabled(config, tmp_path):
    scenario = validate_scenario({"name": "plain", "output": {"plot_data": False},
                                  "checks": [{"kind": "constants", "rhos": [0.5]}]})
    result = run_scenario_sync(scenario, config, out_dir=str(tmp_path / "out"))
    assert sorted(p.name for p in result.files) == ["metadata.json", "reports.json", "summary.csv"]


def test_settings_precedence(config, tmp_path):
    scenario = validate_scenario({"name": "prec", "seed": 5, "jobs": 2,
                                  "checks": [{"kind": "constants", "rhos": [0.5]}]})
    runner = ScenarioRunner(config, seed=9)
    settings = runner._settings(scenario)
    assert settings["seed"] == 9
    assert settings["jobs"] == 2
    assert settings["cap"] == config["limits"]["point_cap"]

    bare = validate_scenario({"name": "bare", "checks": [{"kind": "constants", "rhos": [0.5]}]})
    assert ScenarioRunner(config)._settings(bare)["seed"] == config["defaults"]["seed"]


def test_scenario_seed_reaches_checks(config, tmp_path):
    scenario = validate_scenario({"name": "seeded", "seed": 17, "checks": [{"kind": "lemma1_suite", "count": 1}]})
    result = run_scenario_sync(scenario, config, out_dir=str(tmp_path / "out"))
    assert result.reports[0].inputs["seed"] == 17
    metadata = json.loads((tmp_path / "out" / "metadata.json").read_text(encoding="utf-8"))
    assert metadata["seed"] == 17 and metadata["reports"] == 1


def test_run_scenario_from_bundled_file(config, tmp_path):
    result = run_scenario(bundled_scenario_dir() / "rouche.toml", config, out_dir=str(tmp_path / "out"))
    assert result.reports and all(r.check_name == "rouche" for r in result.reports)
    assert result.exit_code == EXIT_OK


def test_run_scenario_rejects_invalid_file_before_running(config, tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text('name = "broken"\nchecks = []\n', encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        run_scenario(path, config, out_dir=str(tmp_path / "out"))
    assert excinfo.value.field == "checks"
    assert not (tmp_path / "out").exists()
