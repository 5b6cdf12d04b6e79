"""
Small-capacity sweeps of slit-side ratios and their extrapolated t -> 0 limits.

Theorem 1 (slits tangent to a ray at angle (π/2)(1-β) to order 4):
    m_left/m_right -> (1+β)/(1-β)
Theorem 2 (slits tangent to the unit circle centred at i to order 6):
    (meas I_left)²/meas I_right -> 2π. The harmonic-measure form is not scale
    invariant: since πm ≈ meas I for short intervals, m_left²/m_right -> 2
    while tan²(πm_left)/tan(πm_right) -> 2π.
"""
import numpy as np
from loguru import logger

from ..config import NumericConfig
from ..core import Curve, DrivingFunction, LimitEstimate, RatioSeries
from ..exceptions import ConvergenceError, InvalidArgument
from ..loewner_flow import singular_pairs
from ..oracles import arc_interval_endpoints, sqrt_params
from ..welding import compute_driving
from .harmonic import measures_from_pair

EXTRAPOLATION_MODELS = {
    # leading corrections in √t for rays and in ∛t for the circular arc
    "line": (0.5, 1.0),
    "arc": (1 / 3, 2 / 3),
}
THEOREM2_QUANTITIES = ("measure", "tangent", "interval")
MIN_GRID_POINTS = 4
# grid capacities below that of the first few welded vertices rest on a handful of driving samples
MIN_RESOLVED_VERTICES = 16


def extrapolate_limit(times, values, model: str) -> LimitEstimate:
    """
    Least-squares fit of values(t) = L + a t^p + b t^q with the exponents of
    `model`, returning L and the standard error of L as `error`.
    """
    if model not in EXTRAPOLATION_MODELS:
        raise InvalidArgument(f"extrapolate_limit: unknown model {model!r}, expected one of {list(EXTRAPOLATION_MODELS)}")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) < MIN_GRID_POINTS or times.shape != values.shape:
        raise InvalidArgument(f"extrapolate_limit: need at least {MIN_GRID_POINTS} grid points with one value each")
    ratios = times[1:] / times[:-1]
    if not np.allclose(ratios, ratios[0], rtol=1e-6):
        logger.warning("extrapolate_limit: the capacity grid is not geometric")

    exponents = EXTRAPOLATION_MODELS[model]
    columns = [np.ones_like(times)] + [times**p for p in exponents]
    design = np.column_stack(columns)
    column_scale = np.max(np.abs(design), axis=0)
    coeffs, _, rank, _ = np.linalg.lstsq(design / column_scale, values, rcond=None)
    if rank < design.shape[1]:
        raise ConvergenceError(f"extrapolate_limit: rank-deficient fit (rank {rank} < {design.shape[1]})")
    coeffs = coeffs / column_scale

    residual = values - design @ coeffs
    dof = len(values) - design.shape[1]
    ssr = float(residual @ residual)
    if dof > 0 and ssr > 0:
        covariance = ssr / dof * np.linalg.inv(design.T @ design)
        error = float(np.sqrt(covariance[0, 0]))
    else:
        error = float(np.sqrt(ssr))
    return LimitEstimate(limit=float(coeffs[0]), error=error, model=model)


def theorem_limit(theorem: int, c: float = None, quantity: str = "measure", theta: float = None):
    """
    Exact t -> 0 limit of a sweep quantity: (1+β)/(1-β) for theorem 1 (β from
    the coefficient `c` or the tangent angle `theta`), 2π or 2 for theorem 2.
    """
    if theorem == 1:
        if c is not None:
            beta = np.sign(c) * sqrt_params(abs(c)).beta
        elif theta is not None:
            beta = 1 - 2 * theta / np.pi
        else:
            raise InvalidArgument("theorem_limit: theorem 1 needs c or theta")
        return float((1 + beta) / (1 - beta))
    if theorem == 2:
        if quantity not in THEOREM2_QUANTITIES:
            raise InvalidArgument(f"theorem_limit: unknown quantity {quantity!r}")
        return 2.0 if quantity == "measure" else float(2 * np.pi)
    raise InvalidArgument(f"theorem_limit: unknown theorem {theorem}")


def _check_grid(t_grid):
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or len(times) < MIN_GRID_POINTS:
        raise InvalidArgument(f"ratio sweep: the capacity grid needs at least {MIN_GRID_POINTS} points")
    if np.any(times <= 0) or np.any(np.diff(times) >= 0):
        raise InvalidArgument("ratio sweep: the capacity grid must be positive and strictly decreasing")
    return times


def unresolved_capacities(times, vertex_capacity):
    """
    Grid capacities below the capacity of the first `MIN_RESOLVED_VERTICES`
    vertices of a welded curve, with a warning when there are any.
    """
    floor = vertex_capacity[min(MIN_RESOLVED_VERTICES, len(vertex_capacity) - 1)]
    unresolved = times[times < floor]
    if len(unresolved):
        logger.warning(
            f"ratio sweep: {len(unresolved)} grid capacities lie below t={floor:.3g}, reached by the first "
            f"{MIN_RESOLVED_VERTICES} welded vertices; refine the curve to resolve them"
        )
    return unresolved


def _driving_for(source, times, cfg):
    if isinstance(source, DrivingFunction):
        driving = source
    elif isinstance(source, Curve):
        weld = compute_driving(source, cfg)
        driving = weld.driving
        unresolved_capacities(times, weld.per_vertex_capacity)
    else:
        driving = DrivingFunction.sqrt(float(source), domain_end=float(times[0]))
    if times[0] > driving.domain_end * (1 + 1e-12):
        raise InvalidArgument(
            f"ratio sweep: grid start t={times[0]:.6g} exceeds the capacity range [0, {driving.domain_end:.6g}]"
        )
    return driving


def _first_chord_angle(curve):
    return float(np.angle(curve.vertices[1]))


def ratio_theorem1(source, t_grid, cfg: NumericConfig) -> RatioSeries:
    """
    m_left(t)/m_right(t) on a decreasing capacity grid and its t -> 0 limit.

    Parameters
    ----------
    source : float, DrivingFunction or Curve
        A sqrt-family coefficient c (negative values drive the mirrored slit),
        a driving, or a curve that is welded first.
    t_grid : sequence of float
        Strictly decreasing positive capacities inside the capacity range.
    cfg : NumericConfig
    """
    times = _check_grid(t_grid)
    driving = _driving_for(source, times, cfg)
    pairs = singular_pairs(driving, times, cfg)
    measures = [measures_from_pair(pair) for pair in pairs]
    values = np.array([m.m_left / m.m_right for m in measures])
    estimate = extrapolate_limit(times, values, "line")

    if isinstance(source, Curve):
        expected = theorem_limit(1, theta=_first_chord_angle(source))
    elif isinstance(source, DrivingFunction):
        expected = None
    else:
        expected = theorem_limit(1, c=float(source))
    logger.info(f"Theorem 1 sweep: limit {estimate.limit:.8g} ± {estimate.error:.2g} (expected {expected})")
    return RatioSeries(
        times=times,
        values=values,
        limit_estimate=estimate.limit,
        limit_error=estimate.error,
        model=estimate.model,
        theorem=1,
        quantity="measure",
        expected_limit=expected,
        pairs=tuple(pairs),
    )


def theorem2_value(pair, quantity):
    measures = measures_from_pair(pair)
    if quantity == "measure":
        return measures.m_left**2 / measures.m_right
    if quantity == "tangent":
        return np.tan(np.pi * measures.m_left) ** 2 / np.tan(np.pi * measures.m_right)
    return pair.left_interval.length**2 / pair.right_interval.length


def ratio_theorem2(source, t_grid, cfg: NumericConfig, quantity: str = "measure") -> RatioSeries:
    """
    Theorem-2 ratio on a decreasing capacity grid and its t -> 0 limit.

    Parameters
    ----------
    source : "oracle", DrivingFunction or Curve
        "oracle" takes the image intervals from the Christoffel-Schwarz
        parameters of the circular arc; a curve is welded first.
    quantity : {"measure", "tangent", "interval"}
        m_left²/m_right (limit 2), tan²(πm_left)/tan(πm_right) (limit 2π) or
        (meas I_left)²/meas I_right (limit 2π).
    """
    if quantity not in THEOREM2_QUANTITIES:
        raise InvalidArgument(f"ratio_theorem2: unknown quantity {quantity!r}, expected one of {THEOREM2_QUANTITIES}")
    times = _check_grid(t_grid)
    if isinstance(source, str):
        if source != "oracle":
            raise InvalidArgument(f"ratio_theorem2: unknown source {source!r}")
        pairs = [arc_interval_endpoints(t, cfg) for t in times]
    else:
        pairs = singular_pairs(_driving_for(source, times, cfg), times, cfg)

    values = np.array([theorem2_value(pair, quantity) for pair in pairs])
    estimate = extrapolate_limit(times, values, "arc")
    expected = theorem_limit(2, quantity=quantity)
    logger.info(
        f"Theorem 2 sweep ({quantity}): limit {estimate.limit:.8g} ± {estimate.error:.2g} (expected {expected:.8g})"
    )
    return RatioSeries(
        times=times,
        values=values,
        limit_estimate=estimate.limit,
        limit_error=estimate.error,
        model=estimate.model,
        theorem=2,
        quantity=quantity,
        expected_limit=expected,
        pairs=tuple(pairs),
    )
