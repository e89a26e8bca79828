import math

import numpy as np
import pytest

from beurling_kit.errors import HypothesisViolationError, InvalidBodyError, ParameterRangeError
from beurling_kit.services.bandlimited import BandlimitedFunction, random_function, sine_wave
from beurling_kit.services.convex_geometry import ConvexBody
from beurling_kit.services.sampling_sets import covering_radius, integer_lattice, materialize
from beurling_kit.services.windows import Window
from beurling_kit.verification.theorem_checks import (
    check_theorem2_ball,
    check_theorem3,
    constants_compare,
    constants_report,
    constants_sweep,
    random_theorem3_instance,
)


def test_constants_equal_at_zero():
    assert constants_compare(0.0) == (1.0, 1.0)


def test_constants_out_of_range():
    with pytest.raises(ParameterRangeError):
        constants_compare(math.pi / 2)
    with pytest.raises(ParameterRangeError):
        constants_compare(-0.1)


def test_constants_sweep_default_grid():
    reports = constants_sweep()
    assert len(reports) == 157
    assert reports[-1].inputs["rho"] == 1.56
    assert all(r.passed for r in reports)
    assert all(r.measured["gap"] > 1e-12 for r in reports[1:])


def test_constants_report_fields():
    report = constants_report(1.0)
    assert report.bound["c2"] == pytest.approx(1 / (1 - math.sin(1.0)))
    assert report.measured["c3"] == pytest.approx(1 / math.cos(1.0))


def test_sine_wave_on_spaced_lattice():
    body = ConvexBody.interval(1.0)
    f = sine_wave(body, [1.0])
    report = check_theorem3(f, integer_lattice(1, 2.0), body, Window.from_list([[0.0, 2 * math.pi]]), 0.01)
    assert report.passed
    assert report.measured["rho_cert"] == pytest.approx(1.01)
    assert report.measured["ratio"] <= report.bound["constant"]


def test_sparse_lattice_is_a_hypothesis_violation():
    body = ConvexBody.interval(1.0)
    with pytest.raises(HypothesisViolationError):
        check_theorem3(sine_wave(body, [1.0]), integer_lattice(1, 4.0), body, Window.cube(20.0, 1), 0.05)


def test_ball_form_needs_a_ball(rng):
    body = ConvexBody.box([1.0, 1.0])
    f = random_function(body, 3, rng)
    with pytest.raises(InvalidBodyError):
        check_theorem2_ball(f, integer_lattice(2, 0.5), body, Window.cube(2.0, 2), 0.1)


def test_ball_form_uses_weaker_constant(rng):
    body = ConvexBody.ball(1)
    f = random_function(body, 4, rng)
    L = integer_lattice(1, 1.5, window_margin=2.0)
    report = check_theorem2_ball(f, L, body, Window.cube(10.0, 1), 0.01)
    assert report.bound["constant"] >= report.bound["sharper_constant"]


@pytest.mark.parametrize("dim,body_kind", [
    (1, "ball"), (1, "box"), (1, "polytope"),
    (2, "ball"), (2, "box"), (2, "polytope"),
    (3, "ball"),
])
@pytest.mark.parametrize("perturbed", [False, True])
def test_random_period_aligned_instances_pass(dim, body_kind, perturbed):
    rng = np.random.default_rng([7, dim, int(perturbed)])
    instance = random_theorem3_instance(rng, dim, body_kind, max_terms=6, perturbed=perturbed)
    report = check_theorem3(instance.f, instance.L, instance.body, instance.window,
                            instance.grid_step, instance.probe_step)
    assert report.status == "passed", report.to_dict()
    assert report.measured["rho_cert"] < math.pi / 2


def test_instance_lattice_contains_period_grid():
    instance = random_theorem3_instance(np.random.default_rng(3), 2, "box", perturbed=False)
    lattice = instance.L.generator
    shifted = lattice.offset + np.array([instance.period, 0.0])
    points = materialize(instance.L, Window.cube(instance.period + 1.0, 2, center=shifted))
    assert np.min(np.linalg.norm(points - shifted, axis=1)) < 1e-9


def test_instance_covering_is_certified_below_half_pi():
    for seed in range(3):
        instance = random_theorem3_instance(np.random.default_rng(seed), 2, "polytope", perturbed=True)
        estimate = covering_radius(instance.L, instance.body, instance.window, instance.probe_step)
        assert estimate.rho_upper_certificate < math.pi / 2


def test_narrow_window_uses_samples_beyond_its_edge():
    """The nearest sample of a window point may lie outside the window"""
    body = ConvexBody.interval(1.0)
    # cos(x - 1.9)
    f = BandlimitedFunction(body, [0.5 * np.exp(-1.9j), 0.5 * np.exp(1.9j)], [[1.0], [-1.0]])
    report = check_theorem3(f, integer_lattice(1, 2.0), body, Window.from_list([[-0.1, 1.9]]), 0.01)
    assert report.status == "passed", report.to_dict()
    assert report.measured["lattice_max"] == pytest.approx(math.cos(0.1))
    assert report.measured["samples"] >= 2


def test_window_without_samples_inside():
    body = ConvexBody.interval(1.0)
    constant = BandlimitedFunction(body, [1.0], [[0.0]])
    report = check_theorem3(constant, integer_lattice(1, 2.0), body, Window.from_list([[0.5, 1.5]]), 0.01)
    assert report.passed
    assert report.measured["lattice_max"] == pytest.approx(1.0)
    assert report.measured["line_g0"] == pytest.approx(1.0)
