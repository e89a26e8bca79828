import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beurling_kit.errors import ConstructorViolationError, ParameterRangeError, ZeroDirectionError
from beurling_kit.services.bandlimited import (
    BandlimitedFunction,
    cosine_sum,
    evaluate,
    frequency_lattice_points,
    mollifier_band_excess,
    mollify_1d_lemma,
    mollify_nd,
    random_function,
    real_trigonometric,
    restrict_to_line,
    sine_wave,
    stable_sinc,
    sup_norm_on_window,
)
from beurling_kit.services.convex_geometry import ConvexBody, contains, polar_gauge
from beurling_kit.services.windows import Window


def test_constant_function_evaluates_to_coefficient():
    f = BandlimitedFunction(ConvexBody.ball(2), np.array([2.0 + 1.0j]), np.zeros((1, 2)))
    assert evaluate(f, [3.0, -7.0]) == pytest.approx(2.0 + 1.0j)


def test_frequency_outside_body_rejected():
    with pytest.raises(ConstructorViolationError):
        BandlimitedFunction(ConvexBody.ball(2), np.array([1.0]), np.array([[1.0, 1.0]]))


def test_mismatched_term_counts_rejected():
    with pytest.raises(ConstructorViolationError):
        BandlimitedFunction(ConvexBody.interval(1.0), np.array([1.0, 2.0]), np.array([[0.5]]))


def test_sine_wave_values():
    f = sine_wave(ConvexBody.box([1.0, 1.0]), [1.0, 0.0])
    assert evaluate(f, [math.pi / 2, 5.0]) == pytest.approx(1.0)
    assert abs(evaluate(f, [math.pi, 0.0])) < 1e-14


def test_dict_round_trip_keeps_values(rng):
    f = random_function(ConvexBody.ball(2), 5, rng)
    g = BandlimitedFunction.from_dict(f.to_dict())
    X = rng.normal(size=(10, 2))
    np.testing.assert_allclose(g.evaluate_many(X), f.evaluate_many(X))


def test_sup_norm_bracket_contains_true_sup():
    f = sine_wave(ConvexBody.interval(1.0), [1.0])
    estimate = sup_norm_on_window(f, Window.from_list([[0.0, 2 * math.pi]]), 0.05)
    assert estimate.estimate <= 1.0 <= estimate.upper
    assert estimate.error_bound == pytest.approx(1.0 * 0.05 / 2.0)


def test_line_restriction_band_bounded_by_polar_gauge(rng):
    body = ConvexBody.box([1.0, 0.5])
    f = random_function(body, 6, rng)
    d = np.array([0.3, -1.2])
    g = restrict_to_line(f, [0.1, 0.2], d)
    assert g.tau <= polar_gauge(body, d) + 1e-12
    u = np.linspace(-3.0, 3.0, 7)
    np.testing.assert_allclose(g(u), f.evaluate_many(np.array([0.1, 0.2]) + np.outer(u, d)))
    assert g.to_function().body.half_widths[0] == pytest.approx(polar_gauge(body, d))


def test_zero_direction_rejected(rng):
    f = random_function(ConvexBody.ball(2), 2, rng)
    with pytest.raises(ZeroDirectionError):
        restrict_to_line(f, [0.0, 0.0], [0.0, 0.0])


def test_mollify_nd_moves_each_frequency_by_eps(rng):
    body = ConvexBody.ball(3)
    f = random_function(body, 3, rng)
    eps = 0.2
    g = mollify_nd(f, eps)
    assert g.n_terms == 8 * f.n_terms
    distances = np.linalg.norm(g.frequencies.reshape(f.n_terms, 8, 3) - f.frequencies[:, None, :], axis=2)
    np.testing.assert_allclose(distances, eps)
    x = rng.normal(size=3)
    expected = evaluate(f, x) * np.prod(np.cos(eps * x / math.sqrt(3)))
    assert evaluate(g, x) == pytest.approx(expected)


def test_mollify_nd_rejects_nonpositive_eps(rng):
    with pytest.raises(ParameterRangeError):
        mollify_nd(random_function(ConvexBody.ball(2), 1, rng), 0.0)


def test_band_excess_along_axis_and_diagonal():
    assert mollifier_band_excess(0.3, [1.0, 0.0]) == pytest.approx(0.3 / math.sqrt(2))
    assert mollifier_band_excess(0.3, [1.0, 1.0]) == pytest.approx(0.3 * math.sqrt(2))


def test_stable_sinc_is_continuous_at_zero():
    w = np.array([0.0, 1e-6, 1e-3, 1.0, 2.0 + 1.0j])
    expected = np.array([1.0, 1.0 - 1e-12 / 6, np.sin(1e-3) / 1e-3, np.sin(1.0), np.sin(2 + 1j) / (2 + 1j)])
    np.testing.assert_allclose(stable_sinc(w), expected, rtol=1e-13)


def test_lemma_mollifier_formula():
    f = real_trigonometric([1.0], [0.0], [1.0])
    eps = 0.1
    f_eps = mollify_1d_lemma(f, eps)
    z = 2.0
    expected = (1 - eps) * math.sin(eps * z) / (eps * z) * math.cos((1 - eps) * z)
    assert f_eps(z) == pytest.approx(expected)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.5])
def test_lemma_mollifier_range(eps):
    with pytest.raises(ParameterRangeError):
        mollify_1d_lemma(real_trigonometric([1.0], [0.0], [0.5]), eps)


def test_cosine_sum_peaks_at_origin():
    g = cosine_sum([0.5, 0.3, 0.2], [0.0, 0.5, 1.0], 1.0)
    assert g(0.0) == pytest.approx(1.0)
    u = np.linspace(-10.0, 10.0, 101)
    assert np.all(np.abs(g.evaluate_many(u)) <= 1.0 + 1e-12)


def test_cosine_sum_rejects_negative_amplitudes():
    with pytest.raises(ConstructorViolationError):
        cosine_sum([1.0, -0.1], [0.0, 0.5], 1.0)


def test_real_trigonometric_is_real():
    f = real_trigonometric([0.3, 0.2], [0.1, -0.4], [0.5, 1.0])
    t = np.linspace(-20.0, 20.0, 41)
    assert np.abs(f.evaluate_many(t).imag).max() < 1e-14


def test_frequency_lattice_points_lie_in_body():
    body = ConvexBody.polytope([[1.0, 0.2], [-0.3, 0.9]], symmetrize=True)
    points = frequency_lattice_points(body, 0.25)
    assert len(points) > 1
    assert all(contains(body, p, 1e-12) for p in points)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=0, max_value=2**31 - 1))
def test_random_functions_respect_coefficient_bound(dim, seed):
    rng = np.random.default_rng(seed)
    f = random_function(ConvexBody.ball(dim), 4, rng)
    X = rng.normal(scale=5.0, size=(20, dim))
    assert np.abs(f.evaluate_many(X)).max() <= f.coefficient_sum + 1e-9


@pytest.mark.parametrize("dim,half_width", [(1, 10.0), (2, 2.0)])
def test_sup_brackets_overlap_across_refinement(dim, half_width, rng):
    f = random_function(ConvexBody.ball(dim), 4, rng)
    window = Window.cube(half_width, dim)
    coarse = sup_norm_on_window(f, window, 0.1)
    fine = sup_norm_on_window(f, window, 0.01)
    assert coarse.estimate <= fine.upper + 1e-12
    assert fine.estimate <= coarse.upper + 1e-12
    assert fine.error_bound == pytest.approx(coarse.error_bound / 10)


def _normalized_cosine_family(rng):
    amplitudes = rng.uniform(0.0, 1.0, size=5)
    return cosine_sum(amplitudes / amplitudes.sum(), rng.uniform(0.0, 1.0, size=5), 1.0)


@pytest.mark.parametrize("eps", [0.05, 0.3, 0.9])
def test_lemma_mollifier_shrinks_real_axis_sup(eps, rng):
    g = _normalized_cosine_family(rng)
    values = mollify_1d_lemma(g, eps)(np.linspace(-60.0, 60.0, 4001))
    assert np.abs(values).max() <= (1.0 - eps) + 1e-12


@pytest.mark.parametrize("eps", [0.1, 0.5])
def test_lemma_mollifier_complex_growth(eps, rng):
    g = _normalized_cosine_family(rng)
    radius = rng.uniform(1.0, 30.0, size=500)
    angle = rng.uniform(0.0, 2 * math.pi, size=500)
    z = radius * np.exp(1j * angle)
    z = z.real + 1j * np.clip(z.imag, -6.0, 6.0)
    z = z[np.abs(z) >= 1.0]
    values = np.abs(mollify_1d_lemma(g, eps)(z))
    bound = np.exp(np.abs(z.imag)) / (eps * np.abs(z))
    assert np.all(values <= bound * (1.0 + 1e-9))


def test_band_excess_is_attained_by_mollified_frequencies():
    f = BandlimitedFunction(ConvexBody.ball(2), [1.0], [[0.0, 0.0]])
    eps = 0.4
    for d in ([1.0, 0.0], [1.0, 1.0], [0.3, -2.0]):
        shifts = mollify_nd(f, eps).frequencies @ np.asarray(d)
        assert shifts.max() == pytest.approx(mollifier_band_excess(eps, d))
