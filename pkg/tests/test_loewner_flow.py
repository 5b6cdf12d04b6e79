import numpy as np
import pytest

from loewner_lab import InvalidArgument, loewner_flow
from loewner_lab.core import DrivingFunction
from loewner_lab.loewner_flow import (
    check_normalization,
    compute_trace,
    evolve_point,
    inverse_point,
    singular_pair,
    singular_pairs,
    trace_tip,
)
from loewner_lab.oracles import arc_driving, arc_interval_endpoints, sqrt_interval_endpoints, sqrt_tip


@pytest.mark.parametrize(
    "z0, t, expected",
    [
        (1j, 1 / 16, 0.8660254037844386j),
        (2.0, 1.0, 2 * np.sqrt(2)),
        (1 + 1j, 0.5, np.sqrt(2 + 2j)),
    ],
)
def test_evolve_point_zero_driving(cfg, z0, t, expected):
    # with λ ≡ 0 the flow is f(z, t) = √(z² + 4t)
    result = evolve_point(z0, DrivingFunction.constant(0.0), t, cfg)
    assert result.survived
    assert result.value == pytest.approx(expected, abs=1e-9)


def test_evolve_point_at_time_zero(cfg):
    result = evolve_point(0.3 + 0.2j, DrivingFunction.sqrt(3.0), 0.0, cfg)
    assert result.value == 0.3 + 0.2j
    assert result.step_count == 0


@pytest.mark.parametrize("z0", [0.0, 1 - 1j])
def test_evolve_point_rejects_invalid_starts(cfg, z0):
    with pytest.raises(InvalidArgument):
        evolve_point(z0, DrivingFunction.constant(0.0), 0.5, cfg)


def test_evolve_point_rejects_time_outside_domain(cfg):
    with pytest.raises(InvalidArgument):
        evolve_point(1j, DrivingFunction.constant(0.0, domain_end=1.0), 2.0, cfg)


def test_evolve_point_converges_with_tolerance(cfg):
    # λ ≡ 0, z0 = i, t = 1/16: the error shrinks as the tolerances tighten
    driving = DrivingFunction.constant(0.0)
    exact = 0.8660254037844386j
    loose = cfg.updated(ode_method="RK23", ode_rel_tol=1e-4, ode_abs_tol=1e-6)
    tight = cfg.updated(ode_method="RK23", ode_rel_tol=1e-8, ode_abs_tol=1e-10)
    loose_error = abs(evolve_point(1j, driving, 1 / 16, loose).value - exact)
    tight_error = abs(evolve_point(1j, driving, 1 / 16, tight).value - exact)
    assert tight_error < loose_error or tight_error < 1e-12
    assert tight_error < 1e-6


def test_evolve_point_error_estimate(cfg):
    result = evolve_point(1 + 1j, DrivingFunction.sqrt(1.0), 0.5, cfg, estimate_error=True)
    assert np.isfinite(result.error_estimate)
    assert result.error_estimate < 1e-6


def test_singular_pair_zero_driving(cfg):
    pair = singular_pair(DrivingFunction.constant(0.0), 0.25, cfg)
    assert pair.f_minus == pytest.approx(-1.0, abs=1e-6)
    assert pair.lam == 0.0
    assert pair.f_plus == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("c", [0.0, 1.0, 3.0])
def test_singular_pair_matches_sqrt_oracle(cfg, c):
    pair = singular_pair(DrivingFunction.sqrt(c), 1.0, cfg)
    exact = sqrt_interval_endpoints(c, 1.0)
    assert pair.f_minus == pytest.approx(exact.f_minus, abs=1e-6)
    assert pair.lam == pytest.approx(exact.lam)
    assert pair.f_plus == pytest.approx(exact.f_plus, abs=1e-6)


def test_singular_pairs_keep_grid_order(cfg):
    times = [0.01, 0.0001, 0.001]
    pairs = singular_pairs(DrivingFunction.sqrt(3.0), times, cfg)
    assert [pair.t for pair in pairs] == times
    for pair in pairs:
        exact = sqrt_interval_endpoints(3.0, pair.t)
        assert pair.f_plus == pytest.approx(exact.f_plus, rel=1e-6)
        assert pair.f_minus == pytest.approx(exact.f_minus, rel=1e-6)


def test_singular_pair_rejects_zero_time(cfg):
    with pytest.raises(InvalidArgument):
        singular_pair(DrivingFunction.constant(0.0), 0.0, cfg)


def test_reflection_swaps_the_singular_solutions(cfg):
    driving = DrivingFunction.sqrt(3.0)
    pair = singular_pair(driving, 0.5, cfg)
    mirrored = singular_pair(driving.reflected(), 0.5, cfg)
    assert mirrored.f_minus == pytest.approx(-pair.f_plus, abs=1e-9)
    assert mirrored.f_plus == pytest.approx(-pair.f_minus, abs=1e-9)


def test_trace_tip_zero_driving(cfg):
    assert trace_tip(DrivingFunction.constant(0.0), 1.0, cfg) == pytest.approx(2j, abs=1e-6)
    assert trace_tip(DrivingFunction.constant(0.0), 0.0, cfg) == 0


def test_trace_tip_sqrt_driving(cfg):
    tip = trace_tip(DrivingFunction.sqrt(3.0), 1.0, cfg)
    assert tip == pytest.approx(2.452481 + 1.781832j, abs=2e-5)
    assert tip == pytest.approx(sqrt_tip(3.0, 1.0), abs=1e-6)


def test_trace_scaling(cfg):
    # the trace of (1/α)λ(α²t) is the trace of λ shrunk by 1/α
    u = np.linspace(0.0, 1.0, 65)
    driving = DrivingFunction.sampled(u**2, 0.5 * np.sin(3 * u))
    alpha = 2.0
    t = 0.2
    scaled_tip = trace_tip(driving.rescaled(alpha), t, cfg)
    reference = trace_tip(driving, alpha**2 * t, cfg) / alpha
    assert abs(scaled_tip - reference) <= 1e-8 * abs(reference)


@pytest.mark.parametrize("family", ["sqrt", "arc"])
@pytest.mark.parametrize("z0", [0.3 + 0.2j, -0.5 + 0.05j, 0.4])
def test_flow_scaling(cfg, family, z0):
    # f̃(z, t) = (1/α) f(αz, α²t) for the driving λ̃(t) = (1/α) λ(α²t)
    driving = DrivingFunction.sqrt(3.0) if family == "sqrt" else arc_driving(cfg.arc_t_max, cfg)
    alpha = 2.0
    t = 0.2 * driving.domain_end
    scaled = evolve_point(z0, driving.rescaled(alpha), t, cfg)
    reference = evolve_point(alpha * z0, driving, alpha**2 * t, cfg)
    assert scaled.survived and reference.survived
    assert scaled.value == pytest.approx(reference.value / alpha, rel=1e-9)


def test_compute_trace_zero_driving(cfg):
    curve = compute_trace(DrivingFunction.constant(0.0), [0.25, 1.0], cfg)
    np.testing.assert_allclose(curve.vertices, [0, 1j, 2j], atol=1e-6)
    np.testing.assert_allclose(curve.capacity, [0.0, 0.25, 1.0])
    assert curve.length == pytest.approx(2.0, abs=1e-6)


def test_compute_trace_rejects_unsorted_grid(cfg):
    with pytest.raises(InvalidArgument):
        compute_trace(DrivingFunction.constant(0.0), [0.5, 0.25], cfg)


def test_inverse_point_zero_driving(cfg):
    # f^{-1}(w, t) = √(w² - 4t)
    assert inverse_point(1j, DrivingFunction.constant(0.0), 0.25, cfg) == pytest.approx(1j * np.sqrt(2), abs=1e-9)


def test_inverse_point_is_inverse_of_evolve(cfg):
    driving = DrivingFunction.sqrt(1.0)
    z = inverse_point(0.5 + 1j, driving, 0.7, cfg)
    assert evolve_point(z, driving, 0.7, cfg).value == pytest.approx(0.5 + 1j, abs=1e-8)


def test_check_normalization_zero_driving(cfg):
    # √(z² + 4t) - z - 2t/z = -2t²/z³ + O(z⁻⁵), so the residual is close to 2t²/R
    driving = DrivingFunction.constant(0.0)
    residual_10 = check_normalization(driving, 1.0, 10.0, cfg)
    residual_20 = check_normalization(driving, 1.0, 20.0, cfg)
    assert residual_10 == pytest.approx(0.2, rel=0.05)
    assert residual_20 < residual_10


def test_check_normalization_sqrt_driving_stays_bounded(cfg):
    driving = DrivingFunction.sqrt(3.0)
    residuals = [check_normalization(driving, 1.0, radius, cfg) for radius in (10.0, 20.0, 40.0)]
    assert all(np.isfinite(residuals))
    assert residuals[2] <= 1.5 * residuals[1] + 1e-6


@pytest.mark.parametrize("c", [0.0, 1.0, 3.0])
@pytest.mark.parametrize("t", [1e-4, 1e-2, 1.0])
def test_flow_matches_sqrt_family(cfg, c, t):
    driving = DrivingFunction.sqrt(c)
    pair = singular_pair(driving, t, cfg)
    exact = sqrt_interval_endpoints(c, t)
    assert pair.f_minus == pytest.approx(exact.f_minus, rel=1e-6)
    assert pair.f_plus == pytest.approx(exact.f_plus, rel=1e-6)
    tip = trace_tip(driving, t, cfg)
    assert abs(tip - sqrt_tip(c, t)) <= 1e-4 * abs(sqrt_tip(c, t))


def test_image_segment_length_zero_driving(cfg):
    for pair in singular_pairs(DrivingFunction.constant(0.0), [0.01, 0.3, 1.0], cfg):
        assert pair.length == pytest.approx(4 * np.sqrt(pair.t), rel=1e-8)


@pytest.mark.slow
def test_arc_singular_pair_integrates_the_tangential_side_cheaply(cfg, monkeypatch):
    # the start next to the inner side of the arc follows λ(t) closely
    evaluations = []
    solve = loewner_flow._solve

    def counting_solve(*args, **kwargs):
        sol = solve(*args, **kwargs)
        evaluations.append(sol.nfev)
        return sol

    monkeypatch.setattr(loewner_flow, "_solve", counting_solve)
    pair = singular_pair(arc_driving(cfg.arc_t_max, cfg), 1e-2, cfg)
    exact = arc_interval_endpoints(1e-2, cfg)
    assert pair.f_minus == pytest.approx(exact.f_minus, abs=1e-4)
    assert pair.f_plus == pytest.approx(exact.f_plus, abs=1e-4)
    assert len(evaluations) >= 4
    assert max(evaluations) < 100_000
