import json

import pytest

from beurling_kit.cli.scenario import bundled_scenario_dir, load_scenario, validate_scenario
from beurling_kit.errors import ConfigError


def test_bundled_scenarios_validate():
    paths = sorted(bundled_scenario_dir().glob("*.toml")) + sorted(bundled_scenario_dir().glob("*.json"))
    assert len(paths) >= 8
    for path in paths:
        scenario = load_scenario(path)
        assert scenario.checks


def test_ball_suite_scenario_shape():
    scenario = load_scenario(bundled_scenario_dir() / "theorem3_ball_2d.toml")
    check = scenario.checks[0]
    assert check.kind == "theorem3_suite"
    assert check.params()["count"] == 500
    assert check.params()["dims"] == [2]


def test_misspelled_body_kind_names_field():
    with pytest.raises(ConfigError) as excinfo:
        validate_scenario({"name": "bad", "checks": [{"kind": "gauge_axioms", "body": {"kind": "elipse", "dim": 2}}]})
    assert excinfo.value.field == "checks.0.body"
    assert "elipse" in str(excinfo.value)


def test_unknown_check_kind_rejected():
    with pytest.raises(ConfigError) as excinfo:
        validate_scenario({"name": "bad", "checks": [{"kind": "theorem4"}]})
    assert excinfo.value.field.startswith("checks.0.kind")


def test_missing_required_field():
    with pytest.raises(ConfigError, match="Field required") as excinfo:
        validate_scenario({"name": "bad", "checks": [{"kind": "cover", "body": {"kind": "ball", "dim": 1}}]})
    assert excinfo.value.field == "checks.0.set"


def test_mistyped_parameter_names_field():
    with pytest.raises(ConfigError) as excinfo:
        validate_scenario({"name": "x", "checks": [{"kind": "landau_demo", "a": "four"}]})
    assert excinfo.value.field == "checks.0.a"


def test_parameter_of_another_kind_rejected():
    with pytest.raises(ConfigError, match="Extra inputs") as excinfo:
        validate_scenario({"name": "x", "checks": [{"kind": "constants", "probes": 10}]})
    assert excinfo.value.field == "checks.0.probes"


def test_nonpositive_grid_step_rejected():
    with pytest.raises(ConfigError) as excinfo:
        validate_scenario({"name": "x", "checks": [{
            "kind": "cover", "body": {"kind": "ball", "dim": 1},
            "set": {"kind": "integer_lattice", "dim": 1, "spacing": 1.0}, "probe_steps": [0.01, 0.0]}]})
    assert excinfo.value.field == "checks.0.probe_steps.1"


def test_empty_check_list_rejected():
    with pytest.raises(ConfigError) as excinfo:
        validate_scenario({"name": "bad", "checks": []})
    assert excinfo.value.field == "checks"


def test_negative_seed_rejected():
    with pytest.raises(ConfigError) as excinfo:
        validate_scenario({"name": "bad", "seed": -1, "checks": [{"kind": "constants"}]})
    assert excinfo.value.field == "seed"


def test_defaults_are_merged_into_checks():
    scenario = validate_scenario({
        "name": "merged",
        "defaults": {"seed": 9, "count": 3},
        "checks": [{"kind": "lemma1_suite"}, {"kind": "rouche_suite", "count": 5}],
    })
    assert [c.count for c in scenario.checks] == [3, 5]
    assert all(c.seed == 9 for c in scenario.checks)


def test_defaults_reach_only_checks_that_take_them():
    scenario = validate_scenario({
        "name": "merged",
        "defaults": {"seed": 2, "probes": 500},
        "checks": [{"kind": "counterexample", "body": {"kind": "ball", "dim": 2}}, {"kind": "constants"}],
    })
    counterexample, constants = scenario.checks
    assert counterexample.probes == 500
    assert "probes" not in constants.params()
    assert constants.seed == 2


def test_default_matching_no_check_rejected():
    with pytest.raises(ConfigError, match="prboes"):
        validate_scenario({"name": "typo", "defaults": {"prboes": 500}, "checks": [{"kind": "constants"}]})


def test_toml_syntax_error_has_position(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text('name = "x"\n[[checks]\nkind = "constants"\n', encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_scenario(path)
    assert excinfo.value.line == 2


def test_json_syntax_error_has_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"name": "x",\n "checks": [}\n', encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_scenario(path)
    assert excinfo.value.line == 2


def test_json_fallback_for_other_suffixes(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text(json.dumps({"name": "generated", "checks": [{"kind": "constants", "rhos": [0.1]}]}),
                    encoding="utf-8")
    assert load_scenario(path).name == "generated"


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="Cannot read"):
        load_scenario(tmp_path / "absent.toml")


def test_invalid_window_rejected():
    with pytest.raises(ConfigError) as excinfo:
        validate_scenario({"name": "bad", "checks": [{"kind": "counterexample", "body": {"kind": "ball", "dim": 1},
                                                      "window": [[1.0, 0.0]]}]})
    assert excinfo.value.field == "checks.0.window"
