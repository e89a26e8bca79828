import math

import numpy as np
import pytest

from beurling_kit.errors import ConstructorViolationError, ResourceCapError, WindowError
from beurling_kit.services.convex_geometry import ConvexBody
from beurling_kit.services.sampling_sets import ExplicitList, SamplingSet, integer_lattice
from beurling_kit.services.windows import Window
from beurling_kit.verification.extremal import (
    adversarial_ratio,
    extremal_report,
    extremal_sweep,
    is_nondecreasing,
    landau_necessity_demo,
    periodic_frequency_grid,
)


def test_frequency_grid_reaches_band_edge():
    grid = periodic_frequency_grid(1.0, 60.0, 2.0)
    assert grid.shape == (19, 1)
    assert grid[0, 0] == pytest.approx(-1.0) and grid[-1, 0] == pytest.approx(1.0)
    step = grid[1, 0] - grid[0, 0]
    assert 2 * math.pi / step <= 60.0 - 2.0


def test_frequency_grid_needs_room():
    with pytest.raises(WindowError):
        periodic_frequency_grid(1.0, 3.0, 3.5)
    with pytest.raises(WindowError):
        periodic_frequency_grid(0.01, 20.0, 2.0)


def test_adversarial_ratio_is_at_least_polygon_relaxed_constant():
    body = ConvexBody.interval(1.0)
    window = Window.cube(30.0, 1)
    grid = periodic_frequency_grid(1.0, 60.0, 2.0)
    result = adversarial_ratio(body, integer_lattice(1, 2.0), [1.0], grid, window)
    assert result.status == "optimal"
    assert result.ratio_lower_bound >= math.cos(math.pi / 32) - 1e-9
    assert result.certificate is not None
    values = np.abs(result.certificate.evaluate_many(np.arange(-30.0, 31.0, 2.0)))
    assert values.max() == pytest.approx(1.0)


def test_adversarial_inputs_are_validated():
    body = ConvexBody.interval(1.0)
    window = Window.cube(30.0, 1)
    with pytest.raises(ConstructorViolationError):
        adversarial_ratio(body, integer_lattice(1, 2.0), [1.0], np.array([[1.5]]), window)
    with pytest.raises(WindowError):
        adversarial_ratio(body, integer_lattice(1, 2.0), [40.0], np.array([[0.5]]), window)
    with pytest.raises(ResourceCapError):
        adversarial_ratio(body, integer_lattice(1, 0.01), [1.0], np.array([[0.5]]), window)


@pytest.mark.parametrize("spacing", [2.0, 2.5, 2.9])
def test_extremal_ratio_respects_sampling_bound(spacing):
    report = extremal_report(1.0, spacing, 60.0)
    assert report.passed
    assert report.measured["ratio_lower_bound"] <= 1 / math.cos(spacing / 2) + 1e-6
    assert report.measured["rho_cert"] == pytest.approx(spacing / 2, abs=2e-3 * spacing)


def test_extremal_sweep_is_nondecreasing():
    reports = extremal_sweep(1.0, [2.0, 2.9], 60.0)
    ratios = [r.measured["ratio_lower_bound"] for r in reports]
    assert all(r.passed for r in reports)
    assert is_nondecreasing(ratios)


def test_is_nondecreasing():
    assert is_nondecreasing([1.0, 1.0, 2.0])
    assert not is_nondecreasing([1.0, 0.5])


def test_landau_demo_gated_above_nyquist_density():
    report = landau_necessity_demo(1.0, 3.1)
    assert report.status == "passed"
    assert set(report.measured) >= {"ratio_w10", "ratio_w20", "ratio_w40", "nondecreasing"}


def test_landau_demo_reports_trend_below_nyquist_density():
    report = landau_necessity_demo(1.0, 3.3, half_widths=(10.0, 20.0))
    assert report.status == "info"
    assert any("subcritical" in note for note in report.notes)


def test_single_sample_leaves_ratio_unbounded():
    grid = periodic_frequency_grid(1.0, 60.0, 2.0)
    L = SamplingSet(ExplicitList([[0.0]]))
    result = adversarial_ratio(ConvexBody.interval(1.0), L, [1.0], grid, Window.cube(30.0, 1))
    assert result.unbounded
    assert math.isinf(result.ratio_lower_bound)
    assert result.certificate is None


def test_landau_ratios_grow_below_nyquist_density():
    report = landau_necessity_demo(1.0, 4.0)
    assert report.status == "info"
    assert report.measured["ratio_w40"] > report.measured["ratio_w10"]


def test_landau_ratios_stay_bounded_above_nyquist_density():
    report = landau_necessity_demo(1.0, 2.0)
    assert report.passed
    ratios = [report.measured[f"ratio_w{h}"] for h in (10, 20, 40)]
    assert max(ratios) <= 1 / math.cos(1.0) + 1e-6
    assert min(ratios) >= math.cos(math.pi / 32) - 1e-9


def test_extremal_sweep_up_to_three_point_one():
    spacings = [2.0, 2.5, 2.9, 3.1]
    reports = extremal_sweep(1.0, spacings, 60.0)
    assert [r.inputs["spacing"] for r in reports] == spacings
    assert all(r.passed for r in reports)
    assert reports[-1].measured["ratio_lower_bound"] >= reports[0].measured["ratio_lower_bound"]
    last = reports[-1].measured
    assert last["ratio_lower_bound"] <= 1 / math.cos(last["rho_cert"]) + 1e-6
