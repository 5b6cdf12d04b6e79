import numpy as np
import pytest

from loewner_lab import InvalidArgument
from loewner_lab.core import (
    ArcSpec,
    Curve,
    DrivingFunction,
    IntervalOnR,
    LineSpec,
    MeasurePair,
    PerturbedArcSpec,
    PerturbedLineSpec,
    RatioSeries,
    SingularPair,
    capacity_length_ratio,
    generate_curve,
    mobius_to_segment,
)


def test_singular_pair_intervals():
    pair = SingularPair(t=1.0, f_minus=-1.0, lam=3.0, f_plus=4.0)
    assert pair.left_interval == IntervalOnR(-1.0, 3.0)
    assert pair.right_interval == IntervalOnR(3.0, 4.0)
    assert pair.length == 5.0


def test_singular_pair_must_contain_lambda():
    with pytest.raises(InvalidArgument):
        SingularPair(t=1.0, f_minus=0.0, lam=-1.0, f_plus=1.0)


def test_measure_pair_range():
    with pytest.raises(InvalidArgument):
        MeasurePair(t=1.0, m_left=0.0, m_right=0.5)


@pytest.mark.parametrize("m_left, m_right", [(0.5, 0.5), (0.7, 0.4)])
def test_measure_pair_sides_leave_room_for_the_real_axis(m_left, m_right):
    with pytest.raises(InvalidArgument):
        MeasurePair(t=1.0, m_left=m_left, m_right=m_right)
    MeasurePair(t=1.0, m_left=m_left - 0.1, m_right=m_right - 0.15)


def test_ratio_series_needs_decreasing_grid():
    with pytest.raises(InvalidArgument):
        RatioSeries(
            times=[1e-4, 1e-3, 1e-2, 1e-1],
            values=[1.0, 1.0, 1.0, 1.0],
            limit_estimate=1.0,
            limit_error=0.0,
            model="line",
            theorem=1,
            quantity="measure",
        )


def test_curve_validation():
    with pytest.raises(InvalidArgument):
        Curve.from_vertices([1j, 2j])
    with pytest.raises(InvalidArgument):
        Curve.from_vertices([0, 1 - 0.5j])
    with pytest.raises(InvalidArgument):
        Curve.from_vertices([0, 1j, 2j], capacity=[0.0, 0.5, 0.4])


def test_curve_from_vertices_accumulates_chords():
    curve = Curve.from_vertices([0, 3 + 4j, 3 + 5j])
    np.testing.assert_allclose(curve.arc_length, [0.0, 5.0, 6.0])
    assert curve.length == 6.0
    assert curve.tip == 3 + 5j
    assert len(curve.prefix(2)) == 2


def test_curve_scaled():
    curve = Curve.from_vertices([0, 1j, 2j], capacity=[0.0, 0.25, 1.0])
    scaled = curve.scaled(2.0)
    np.testing.assert_allclose(scaled.vertices, [0, 2j, 4j])
    np.testing.assert_allclose(scaled.capacity, [0.0, 1.0, 4.0])


def test_check_simple_detects_crossing():
    generate_curve(ArcSpec(2.0), 64).check_simple()
    with pytest.raises(InvalidArgument):
        Curve.from_vertices([0, 2j, 1 + 1j, -1 + 1.5j]).check_simple()


def test_constant_and_sqrt_driving():
    assert DrivingFunction.constant(0.5)(0.3) == 0.5
    driving = DrivingFunction.sqrt(3.0, domain_end=4.0)
    assert driving(4.0) == pytest.approx(6.0)
    assert driving.at_sqrt_time(2.0) == pytest.approx(6.0)
    np.testing.assert_allclose(driving(np.array([0.0, 1.0])), [0.0, 3.0])


def test_driving_domain_is_enforced():
    driving = DrivingFunction.sqrt(1.0, domain_end=1.0)
    with pytest.raises(InvalidArgument):
        driving(1.5)
    with pytest.raises(InvalidArgument):
        driving(-0.1)


def test_negative_sqrt_coefficient_is_a_reflection():
    driving = DrivingFunction.sqrt(-2.0)
    assert driving(0.25) == pytest.approx(-1.0)
    assert driving.reflected()(0.25) == pytest.approx(1.0)


def test_rescaled_driving():
    alpha = 2.0
    driving = DrivingFunction.sampled([0.0, 0.25, 1.0, 4.0], [0.0, 0.3, 0.1, -0.5])
    rescaled = driving.rescaled(alpha)
    assert rescaled.domain_end == pytest.approx(1.0)
    for t in (0.1, 0.25, 0.7):
        assert rescaled(t) == pytest.approx(driving(alpha**2 * t) / alpha)


def test_sampled_driving_interpolates_samples():
    times = np.linspace(0.0, 1.0, 11) ** 2
    driving = DrivingFunction.sampled(times, 3 * np.sqrt(times))
    assert driving(0.5) == pytest.approx(3 * np.sqrt(0.5), rel=1e-12)


def test_sampled_driving_validation():
    with pytest.raises(InvalidArgument):
        DrivingFunction.sampled([0.1, 0.2], [0.0, 1.0])
    with pytest.raises(InvalidArgument):
        DrivingFunction.sampled([0.0, 0.2, 0.1], [0.0, 1.0, 2.0])


def test_generate_line():
    curve = generate_curve(LineSpec(np.pi / 4, 2.0), 5)
    assert curve.length == pytest.approx(2.0)
    assert curve.tip == pytest.approx(np.sqrt(2) * (1 + 1j))


def test_generate_arc_lies_on_circle():
    curve = generate_curve(ArcSpec(1.0), 33)
    np.testing.assert_allclose(np.abs(curve.vertices - 1j), 1.0, atol=1e-14)
    assert curve.length == pytest.approx(1.0)


def test_perturbed_line_is_uniform_in_arc_length():
    curve = generate_curve(PerturbedLineSpec(np.pi / 5, 0.1, 5), 65)
    chords = np.abs(np.diff(curve.vertices))
    assert chords.max() / chords.min() < 1.01
    # tangent to the ray at the base
    assert np.angle(curve.vertices[1]) == pytest.approx(np.pi / 5, abs=1e-6)


def test_perturbed_arc_departs_from_circle_inwards():
    curve = generate_curve(PerturbedArcSpec(1.0, 0.1, 7), 65)
    distance = np.abs(curve.vertices - 1j)
    assert distance[-1] < 1.0
    assert abs(distance[1] - 1.0) < 1e-12


@pytest.mark.parametrize(
    "spec",
    [LineSpec(0.0), LineSpec(np.pi / 3, -1.0), ArcSpec(np.pi), PerturbedLineSpec(1.0, 0.1, 4), PerturbedArcSpec(1.0, 0.1, 6)],
)
def test_generate_curve_rejects_invalid_specs(spec):
    with pytest.raises(InvalidArgument):
        generate_curve(spec, 16)


def test_mobius_flattens_the_arc():
    images = mobius_to_segment(generate_curve(ArcSpec(2.0), 64))
    np.testing.assert_allclose(images.imag, 0.0, atol=1e-12)
    assert np.all(images.real >= 0)


def test_capacity_length_ratio_needs_capacity():
    with pytest.raises(InvalidArgument):
        capacity_length_ratio(generate_curve(LineSpec(1.0), 8), 0.5)


def test_vertical_line_vertices():
    curve = generate_curve(LineSpec(np.pi / 2, 2.0), 3)
    np.testing.assert_allclose(curve.vertices, [0, 1j, 2j], atol=1e-15)


def test_line_endpoint_direction():
    assert generate_curve(LineSpec(np.pi / 5, 1.0), 2).tip == pytest.approx(0.809017 + 0.587785j, abs=1e-6)


def test_unperturbed_line_equals_line():
    line = generate_curve(LineSpec(np.pi / 5, 1.0), 17)
    perturbed = generate_curve(PerturbedLineSpec(np.pi / 5, 0.0, 5, 1.0), 17)
    np.testing.assert_array_equal(perturbed.vertices, line.vertices)


@pytest.mark.parametrize("spec", [ArcSpec(2.0), PerturbedLineSpec(1.0, 0.5, 5), PerturbedArcSpec(2.0, 0.1, 7)])
def test_chords_follow_arc_length(spec):
    curve = generate_curve(spec, 257)
    chords = np.abs(np.diff(curve.vertices))
    steps = np.diff(curve.arc_length)
    assert np.max(np.abs(chords - steps) / steps) < 0.01
