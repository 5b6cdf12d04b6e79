"""
Self-checks of the numerical invariants, run by `loewner-lab check`.

Every check returns an `InvariantCheck`; a numerical failure inside a check
marks it as failed instead of aborting the suite.
"""
import dataclasses

import numpy as np
from loguru import logger

from .config import NumericConfig
from .core import ArcSpec, Curve, DrivingFunction, IntervalOnR, LineSpec, generate_curve, mobius_to_segment
from .exceptions import InvalidArgument, LoewnerLabError
from .loewner_flow import check_normalization, evolve_point, singular_pair, singular_pairs, trace_tip
from .measures import harmonic_measure_interval, measures_from_pair
from .oracles import arc_driving, arc_tip, sqrt_interval_endpoints, sqrt_tip
from .welding import hcap, round_trip_error

SCALING_TOL = 1e-8
REFLECTION_TOL = 1e-9
TAN_IDENTITY_TOL = 1e-12
ROUND_TRIP_TOL = 1e-3
ROUND_TRIP_STEPS = 4096
MOBIUS_TOL = 1e-12
NORMALIZATION_RADII = (10.0, 20.0, 40.0)
# allowed growth of the normalisation residual per doubling of the radius
NORMALIZATION_GROWTH = 1.5


@dataclasses.dataclass(frozen=True)
class InvariantCheck:
    name: str
    passed: bool
    detail: str


def check_scaling(cfg):
    """
    For λ̃ = (1/α)λ(α²t) with α = 2, the flow satisfies f̃(z,t) = (1/α)f(αz, α²t)
    and the trace is the original one shrunk by 1/α; checked on the arc
    driving and on λ = 3√t (which is its own rescaling).
    """
    alpha = 2.0
    z0 = 0.3 + 0.2j
    arc = arc_driving(cfg.arc_t_max, cfg)
    t = 0.2 * arc.domain_end
    scaled_tip = trace_tip(arc.rescaled(alpha), t, cfg)
    reference = trace_tip(arc, alpha**2 * t, cfg) / alpha
    tip_error = abs(scaled_tip - reference) / abs(reference)

    flow_error = 0.0
    for driving in (arc, DrivingFunction.sqrt(3.0, domain_end=1.0)):
        scaled = evolve_point(z0, driving.rescaled(alpha), t, cfg).value
        reference = evolve_point(alpha * z0, driving, alpha**2 * t, cfg).value / alpha
        flow_error = max(flow_error, abs(scaled - reference) / abs(reference))

    error = max(tip_error, flow_error)
    return error <= SCALING_TOL, (
        f"relative tip difference {tip_error:.3g}, flow difference {flow_error:.3g} (tolerance {SCALING_TOL:g})"
    )


def check_reflection(cfg):
    """λ ↦ -λ mirrors the image segment and swaps the slit-side measures."""
    driving = DrivingFunction.sqrt(3.0, domain_end=1.0)
    t = 0.5
    pair = singular_pair(driving, t, cfg)
    mirrored = singular_pair(driving.reflected(), t, cfg)
    error = max(abs(mirrored.f_minus + pair.f_plus), abs(mirrored.f_plus + pair.f_minus), abs(mirrored.lam + pair.lam))
    measures, mirrored_measures = measures_from_pair(pair), measures_from_pair(mirrored)
    error = max(
        error,
        abs(measures.m_left - mirrored_measures.m_right),
        abs(measures.m_right - mirrored_measures.m_left),
    )
    return error <= REFLECTION_TOL, f"largest mismatch {error:.3g} (tolerance {REFLECTION_TOL:g})"


def check_tan_identity(cfg):
    """tan(π ω(i, [a, b])) = (b - a)/(1 + ab) whenever 1 + ab > 0."""
    intervals = []
    for c in (0.0, 1.0, 3.0):
        for t in (1e-6, 1e-3, 0.1):
            pair = sqrt_interval_endpoints(c, t)
            intervals += [pair.left_interval, pair.right_interval]
    intervals += [IntervalOnR(-1.0, 0.9), IntervalOnR(0.0, 1.0), IntervalOnR(0.3, 0.7)]
    worst = 0.0
    for interval in intervals:
        a, b = interval.a, interval.b
        lhs = np.tan(np.pi * harmonic_measure_interval(interval))
        rhs = (b - a) / (1 + a * b)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst <= TAN_IDENTITY_TOL, f"largest relative deviation {worst:.3g} over {len(intervals)} intervals"


def check_normalization_residual(cfg):
    """|f(z,t) - z - 2t/z|·|z|² stays bounded as |z| doubles."""
    driving = DrivingFunction.sqrt(3.0, domain_end=1.0)
    residuals = [check_normalization(driving, 1.0, radius, cfg) for radius in NORMALIZATION_RADII]
    passed = all(
        later <= NORMALIZATION_GROWTH * earlier + 1e-6 for earlier, later in zip(residuals, residuals[1:])
    )
    detail = ", ".join(f"R={r:g}: {res:.6g}" for r, res in zip(NORMALIZATION_RADII, residuals))
    return passed, detail


def check_monotone_growth(cfg):
    """The image segment [f_minus, f_plus] strictly grows with t."""
    driving = DrivingFunction.sqrt(1.0, domain_end=1.0)
    times = np.geomspace(1e-4, 1.0, 9)
    pairs = singular_pairs(driving, times, cfg)
    f_minus = np.array([pair.f_minus for pair in pairs])
    f_plus = np.array([pair.f_plus for pair in pairs])
    passed = bool(np.all(np.diff(f_minus) < 0) and np.all(np.diff(f_plus) > 0))
    return passed, f"image segment lengths {pairs[0].length:.4g} ... {pairs[-1].length:.4g}"


def _exact_trace(tips, times):
    vertices = np.concatenate(([0j], tips))
    return Curve.from_vertices(vertices, capacity=np.concatenate(([0.0], times)))


def check_weld_round_trip(cfg):
    """Welding the exact traces of λ = 3√t and of the arc driving recovers the drivings."""
    times = np.linspace(0.0, 1.0, ROUND_TRIP_STEPS)[1:] ** 2
    sqrt_curve = _exact_trace(np.array([sqrt_tip(3.0, t) for t in times]), times)
    sqrt_error = round_trip_error(DrivingFunction.sqrt(3.0, domain_end=1.0), sqrt_curve, cfg)

    arc_times = cfg.arc_t_max * np.linspace(0.0, 1.0, ROUND_TRIP_STEPS)[1:] ** 3
    arc_curve = _exact_trace(np.array([arc_tip(t, cfg) for t in arc_times]), arc_times)
    arc_error = round_trip_error(arc_driving(cfg.arc_t_max, cfg), arc_curve, cfg)

    error = max(sqrt_error, arc_error)
    return (
        error < ROUND_TRIP_TOL,
        f"sup-error {sqrt_error:.3g} (sqrt:c=3), {arc_error:.3g} (arc) at {ROUND_TRIP_STEPS} steps",
    )


def check_vertical_slit_capacity(cfg):
    """hcap([0, 2i]) = 1."""
    error = abs(hcap(generate_curve(LineSpec(np.pi / 2, 2.0), 256), cfg) - 1.0)
    return error < 1e-10, f"|hcap - 1| = {error:.3g}"


def check_arc_trace(cfg):
    """The backward flow of the arc driving ends on the closed-form arc tip."""
    driving = arc_driving(cfg.arc_t_max, cfg)
    t = 0.5 * driving.domain_end
    error = abs(trace_tip(driving, t, cfg) - arc_tip(t, cfg))
    return error < 1e-6, f"|trace_tip - arc_tip| = {error:.3g} at t={t:g}"


def check_mobius(cfg):
    """w ↦ 2w/(2 + iw) flattens the arc onto the positive real axis."""
    images = mobius_to_segment(generate_curve(ArcSpec(2.0), 256))
    spread = float(np.max(np.abs(images.imag)))
    passed = spread <= MOBIUS_TOL and bool(np.all(images.real >= 0))
    return passed, f"max |Im| of the image {spread:.3g}"


INVARIANT_CHECKS = {
    "scaling": check_scaling,
    "reflection": check_reflection,
    "tan-identity": check_tan_identity,
    "normalization": check_normalization_residual,
    "monotone-growth": check_monotone_growth,
    "weld-round-trip": check_weld_round_trip,
    "vertical-slit-hcap": check_vertical_slit_capacity,
    "arc-trace": check_arc_trace,
    "mobius": check_mobius,
}


def run_invariant_suite(cfg: NumericConfig = NumericConfig(), names=None):
    """
    Run the invariant checks (all of them, or those in `names`).

    Returns
    -------
    list of InvariantCheck
    """
    names = list(INVARIANT_CHECKS) if names is None else list(names)
    unknown = [name for name in names if name not in INVARIANT_CHECKS]
    if unknown:
        raise InvalidArgument(f"run_invariant_suite: unknown checks {unknown}, expected some of {list(INVARIANT_CHECKS)}")
    results = []
    for name in names:
        check = INVARIANT_CHECKS[name]
        try:
            passed, detail = check(cfg)
        except LoewnerLabError as ex:
            passed, detail = False, f"{type(ex).__name__}: {ex}"
        logger.info(f"Invariant {name}: {'passed' if passed else 'FAILED'} ({detail})")
        results.append(InvariantCheck(name=name, passed=bool(passed), detail=detail))
    return results
