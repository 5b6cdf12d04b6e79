import numpy as np
import pytest

from loewner_lab import InvalidArgument
from loewner_lab.core import (
    ArcSpec,
    Curve,
    DrivingFunction,
    LineSpec,
    PerturbedArcSpec,
    capacity_length_ratio,
    generate_curve,
)
from loewner_lab.oracles import arc_driving, arc_params_at_angle, arc_series_coeffs, arc_tip, sqrt_params, sqrt_tip
from loewner_lab.welding import (
    compute_driving,
    hcap,
    hcap_closeness_ratios,
    round_trip_error,
    with_capacity,
)


def test_vertical_slit_capacity(cfg):
    result = compute_driving(generate_curve(LineSpec(np.pi / 2, 2.0), 256), cfg)
    assert result.hcap_total == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(result.driving.values, 0.0, atol=1e-10)


@pytest.mark.parametrize("length", [0.6, 1.0, 3.0])
def test_single_vertical_chord(cfg, length):
    assert hcap(Curve.from_vertices([0, 1j * length]), cfg) == pytest.approx(length**2 / 4)


def test_single_tilted_chord_is_the_sqrt_slit(cfg):
    # one straight chord is welded exactly: λ = c√t, hcap = (r/|B(c)|)²
    params = sqrt_params(3.0)
    tip = sqrt_tip(3.0, 0.5)
    result = compute_driving(Curve.from_vertices([0, tip]), cfg)
    assert result.hcap_total == pytest.approx(0.5, rel=1e-12)
    assert result.driving.values[-1] == pytest.approx(3.0 * np.sqrt(0.5), rel=1e-12)
    assert params.b_modulus * np.sqrt(result.hcap_total) == pytest.approx(abs(tip))


def test_capacity_scales_quadratically(cfg):
    curve = generate_curve(ArcSpec(1.0), 128)
    assert hcap(curve.scaled(2.0), cfg) == pytest.approx(4 * hcap(curve, cfg), rel=1e-10)


def test_mirrored_curve_has_reflected_driving(cfg):
    curve = generate_curve(ArcSpec(1.0), 64)
    mirrored = Curve(-np.conj(curve.vertices), curve.arc_length)
    result = compute_driving(curve, cfg)
    mirrored_result = compute_driving(mirrored, cfg)
    assert mirrored_result.hcap_total == pytest.approx(result.hcap_total, rel=1e-10)
    np.testing.assert_allclose(mirrored_result.driving.values, -result.driving.values, atol=1e-10)


def test_straight_slit_recovers_sqrt_driving(cfg):
    params = sqrt_params(3.0)
    curve = generate_curve(LineSpec(params.theta, params.b_modulus), 1024)
    result = compute_driving(curve, cfg)
    assert result.hcap_total == pytest.approx(1.0, rel=1e-2)
    assert result.driving.values[-1] == pytest.approx(3.0 * np.sqrt(result.hcap_total), rel=1e-2)
    assert np.all(np.diff(result.per_vertex_capacity) > 0)


def test_arc_capacity_length_ratio(cfg):
    curve = with_capacity(generate_curve(ArcSpec(0.05), 512), cfg)
    ratios = capacity_length_ratio(curve, 1 / 3)
    assert ratios[-1] == pytest.approx(arc_series_coeffs()["B1"], rel=0.05)


def test_arc_capacity_matches_closed_form(cfg):
    t = 1e-4
    phi = np.angle(arc_tip(t, cfg) - 1j) + np.pi / 2
    assert hcap(generate_curve(ArcSpec(phi), 512), cfg) == pytest.approx(t, rel=1e-2)


def test_compute_driving_rejects_self_intersection(cfg):
    with pytest.raises(InvalidArgument):
        compute_driving(Curve.from_vertices([0, 2j, 1 + 1j, -1 + 1.5j]), cfg)


def test_round_trip_needs_capacity(cfg):
    with pytest.raises(InvalidArgument):
        round_trip_error(DrivingFunction.sqrt(3.0), generate_curve(LineSpec(1.0), 16), cfg)


def test_round_trip_of_exact_vertical_trace(cfg):
    times = np.linspace(0.0, 1.0, 65)[1:] ** 2
    curve = Curve.from_vertices(
        np.concatenate(([0j], 2j * np.sqrt(times))), capacity=np.concatenate(([0.0], times))
    )
    assert round_trip_error(DrivingFunction.constant(0.0), curve, cfg) < 1e-10


def test_hcap_closeness_ratios_decrease(cfg):
    # the capacity gap of a fifth-order perturbation shrinks like s⁶, i.e. about 16x per halving of s
    ratios = hcap_closeness_ratios(np.pi / 5, 1.0, 5, range(4, 11), 128, cfg)
    assert len(ratios) == 7
    assert np.all(ratios > 0)
    assert np.all(ratios[1:] <= ratios[:-1] / 1.5)


def test_ray_capacity_length_relation(cfg):
    params = sqrt_params(3.0)
    curve = with_capacity(generate_curve(LineSpec(params.theta, 1.0), 256), cfg)
    ratios = capacity_length_ratio(curve, 1 / 2)
    assert ratios[0] == pytest.approx(params.b_modulus, rel=1e-10)
    np.testing.assert_allclose(ratios[:16], params.b_modulus, rtol=5e-3)


def test_prefix_capacities_increase(cfg):
    curve = generate_curve(ArcSpec(1.0), 64)
    capacities = [hcap(curve.prefix(n), cfg) for n in (8, 16, 32, 64)]
    assert np.all(np.diff(capacities) > 0)


def test_arc_is_removed_by_the_circular_start(cfg):
    curve = generate_curve(ArcSpec(0.5), 256)
    result = compute_driving(curve, cfg)
    assert result.circular_start_vertices == len(curve) - 1
    exact = arc_params_at_angle(0.5)
    assert result.hcap_total == pytest.approx(exact.t, rel=1e-12)
    assert result.driving.values[-1] == pytest.approx(exact.lambda0, rel=1e-12)


def test_rays_do_not_take_the_circular_start(cfg):
    result = compute_driving(generate_curve(LineSpec(np.pi / 5, 1.0), 64), cfg)
    assert result.circular_start_vertices == 0


def test_perturbed_arc_leaves_the_circle_and_continues_with_chords(cfg):
    curve = generate_curve(PerturbedArcSpec(0.5, 0.05, 7), 512)
    result = compute_driving(curve, cfg)
    assert 3 <= result.circular_start_vertices < len(curve) - 1
    assert np.all(np.diff(result.per_vertex_capacity) > 0)
    chords_only = compute_driving(curve, cfg, circular_start=False)
    assert chords_only.circular_start_vertices == 0
    assert result.hcap_total == pytest.approx(chords_only.hcap_total, rel=1e-2)


def test_left_going_perturbed_arc_has_reflected_driving(cfg):
    curve = generate_curve(PerturbedArcSpec(0.5, 0.05, 7), 256)
    mirrored = Curve(-np.conj(curve.vertices), curve.arc_length)
    result = compute_driving(curve, cfg)
    mirrored_result = compute_driving(mirrored, cfg)
    assert mirrored_result.circular_start_vertices == result.circular_start_vertices > 0
    np.testing.assert_allclose(mirrored_result.per_vertex_capacity, result.per_vertex_capacity, rtol=1e-10)
    np.testing.assert_allclose(mirrored_result.driving.values, -result.driving.values, atol=1e-10)


@pytest.mark.slow
def test_welded_arc_driving_matches_closed_form(cfg):
    result = compute_driving(generate_curve(ArcSpec(0.5), 512), cfg)
    reference = arc_driving(cfg.arc_t_max, cfg)
    for t in result.hcap_total * np.array([0.1, 0.5, 1.0]):
        assert result.driving(t) == pytest.approx(reference(t), rel=5e-4)


@pytest.mark.slow
def test_chord_zipper_alone_follows_the_arc(cfg):
    result = compute_driving(generate_curve(ArcSpec(0.5), 512), cfg, circular_start=False)
    reference = arc_driving(cfg.arc_t_max, cfg)
    for t in result.hcap_total * np.array([0.1, 0.5, 1.0]):
        assert result.driving(t) == pytest.approx(reference(t), rel=5e-3)


@pytest.mark.slow
def test_arc_trace_round_trip_at_4096_steps(cfg):
    times = cfg.arc_t_max * np.linspace(0.0, 1.0, 4096)[1:] ** 3
    tips = np.array([arc_tip(t, cfg) for t in times])
    trace = Curve.from_vertices(np.concatenate(([0j], tips)), capacity=np.concatenate(([0.0], times)))
    assert round_trip_error(arc_driving(cfg.arc_t_max, cfg), trace, cfg) < 1e-3
