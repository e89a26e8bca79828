import asyncio

import pytest

from beurling_kit.cli.scenario import CHECK_MODELS
from beurling_kit.verification.orchestrator import CheckOrchestrator
from beurling_kit.verification.reports import VerificationReport

INTERVAL = {"kind": "box", "params": {"half_widths": [1.0]}}


@pytest.fixture
def orchestrator(config):
    return CheckOrchestrator(config)


def test_registry_covers_every_check(orchestrator):
    assert set(orchestrator.check_handlers) == {
        "theorem3", "theorem3_suite", "theorem2_ball", "constants", "gauge_axioms", "cover", "density",
        "extremal", "extremal_sweep", "landau_demo", "counterexample", "classify_net",
        "lemma1", "lemma1_suite", "rouche", "rouche_suite",
    }


def test_unknown_check_is_an_error_report(orchestrator):
    reports = orchestrator.run_check("nonsense", {})
    assert reports[0].status == "error"
    assert reports[0].counts_as_failure


def test_library_errors_become_error_reports(orchestrator):
    reports = orchestrator.run_check("gauge_axioms", {"body": {"kind": "ball", "dim": 2, "params": {"radius": -1}}})
    assert reports[0].status == "error"
    assert "radius" in reports[0].notes[0]


def test_hypothesis_violation_is_skipped(orchestrator):
    params = {
        "body": INTERVAL,
        "set": {"kind": "integer_lattice", "dim": 1, "spacing": 4.0},
        "function": {"body": INTERVAL, "terms": [{"re": 1.0, "im": 0.0, "freq": [0.5]}]},
        "window": [[0.0, 40.0]],
    }
    reports = orchestrator.run_check("theorem3", params)
    assert reports[0].status == "skipped"
    assert not reports[0].counts_as_failure


def test_theorem3_instance_passes(orchestrator):
    params = {
        "body": INTERVAL,
        "set": {"kind": "integer_lattice", "dim": 1, "spacing": 2.0},
        "function": {"body": INTERVAL, "terms": [{"re": 0.0, "im": -0.5, "freq": [1.0]},
                                                 {"re": 0.0, "im": 0.5, "freq": [-1.0]}]},
        "window": [[0.0, 6.283185307179586]],
        "grid_step": 0.01,
    }
    reports = orchestrator.run_check("theorem3", params)
    assert reports[0].status == "passed"


def test_small_suite_runs_all_instances(orchestrator):
    reports = orchestrator.run_check("theorem3_suite", {"count": 4, "dims": [1], "bodies": ["ball", "box"]})
    assert len(reports) == 4
    assert [r.inputs["instance"] for r in reports] == [0, 1, 2, 3]
    assert all(r.status == "passed" for r in reports)


def test_constants_default_sweep(orchestrator):
    assert len(orchestrator.run_check("constants", {})) == 157


def test_cover_against_closed_form(orchestrator):
    reports = orchestrator.run_check("cover", {
        "body": INTERVAL,
        "set": {"kind": "integer_lattice", "dim": 1, "spacing": 2.0},
        "probe_steps": [0.01, 0.005],
        "expected": 1.0,
    })
    assert [r.status for r in reports] == ["passed", "passed"]


def test_cover_without_expectation_is_informational(orchestrator):
    reports = orchestrator.run_check("cover", {"body": {"kind": "ball", "dim": 2},
                                               "set": {"kind": "hexagonal", "spacing": 1.0}})
    assert reports[0].status == "info"
    assert reports[0].measured["rho_estimate"] > 0.5


def test_density_with_nyquist_verdict(orchestrator):
    reports = orchestrator.run_check("density", {
        "set": {"kind": "integer_lattice", "dim": 1, "spacing": 2.0},
        "radii": [10.0, 20.0, 40.0],
        "sigma": 1.0,
        "expected": 0.5,
    })
    assert reports[0].status == "passed"
    assert reports[0].measured["nyquist_margin"] > 0
    assert "sampling predicted" in reports[0].notes


def test_lemma1_suite_seeds_are_recorded(orchestrator):
    reports = orchestrator.run_check("lemma1_suite", {"count": 10, "seed": 5})
    assert all(r.passed for r in reports)
    assert {r.inputs["seed"] for r in reports} == {5}


def test_rouche_single_function(orchestrator):
    reports = orchestrator.run_check("rouche", {"cos_coeffs": [0.5], "sin_coeffs": [0.3], "omegas": [0.7],
                                                "eps": 0.1, "N": 5})
    assert reports[0].passed
    assert reports[0].measured["sign_changes"] == 10


def test_classify_net_attaches_counterexample(orchestrator):
    reports = orchestrator.run_check("classify_net", {"net_body": {"kind": "ball", "dim": 2, "params": {"radius": 2.0}},
                                                      "body": {"kind": "ball", "dim": 2}, "probes": 500})
    assert [r.check_name for r in reports] == ["classify_net", "proposition1"]
    assert reports[1].passed


def test_registered_handler_is_dispatched(orchestrator):
    report = VerificationReport.informational("custom", {}, {"value": 1.0})
    orchestrator.register_handler("custom", lambda params: [report])
    assert orchestrator.run_check("custom", {}) == [report]


def test_process_check_runs_in_executor(orchestrator):
    reports = asyncio.run(orchestrator.process_check("constants", {"rhos": [0.0, 0.5]}))
    assert [r.inputs["rho"] for r in reports] == [0.0, 0.5]


def test_lp_limits_come_from_config(config):
    config["limits"]["lp_max_points"] = 5
    reports = CheckOrchestrator(config).run_check("extremal", {"spacing": 2.0, "window_length": 60.0})
    assert reports[0].status == "error"
    assert "constraint points" in reports[0].notes[0]


def test_axiom_tolerance_defaults_to_config(config):
    config["defaults"]["tolerance"] = 1e-6
    report = CheckOrchestrator(config).run_check("gauge_axioms", {"body": {"kind": "ball", "dim": 2}})[0]
    assert report.bound["tolerance"] == 1e-6


def test_unvalidated_parameters_become_error_reports(orchestrator):
    reports = orchestrator.run_check("landau_demo", {"a": "four"})
    assert [r.status for r in reports] == ["error"]
    assert reports[0].notes[0].startswith("ValueError")


def test_missing_parameter_becomes_error_report(orchestrator):
    reports = orchestrator.run_check("extremal", {"sigma": 1.0})
    assert reports[0].status == "error"
    assert "KeyError" in reports[0].notes[0]
    assert reports[0].counts_as_failure


def test_every_check_has_a_parameter_model(orchestrator):
    assert set(CHECK_MODELS) == set(orchestrator.check_handlers)
