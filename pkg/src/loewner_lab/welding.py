"""
Driving function and half-plane capacity of a polygonal slit by composing
elementary tilted-slit maps (zipper).

The elementary map removes the straight slit from 0 to p = r e^{iθ}. Its
inverse is explicit,

    z(w) = (w - a)^α (w - b)^(1-α),   α = 1 - θ/π,
    a = -(1-α)k,  b = αk,  k = r / (α^α (1-α)^(1-α)),

it is hydrodynamically normalised, sends the tip to λ = (2α-1)k and adds
k²α(1-α)/4 to the capacity. This is the slit generated by λ = c√t, so straight
rays through the base point are reproduced exactly.

A slit that leaves the real axis tangentially along a circle is badly served
by chords: the first steps are much longer than the height they climb. When
the leading vertices lie on one circle tangent to R at 0, that arc is removed
in a single step with the Christoffel-Schwarz map of the circular-arc family,
and the zipper takes over from its last vertex.
"""
import dataclasses

import numpy as np
from loguru import logger

from .config import NumericConfig
from .core import Curve, DrivingFunction, LineSpec, PerturbedLineSpec, generate_curve
from .exceptions import InvalidArgument, ResolutionError
from .oracles import arc_params_at_angle

# keep the tilted-slit exponent away from the degenerate horizontal slits
MIN_SLIT_ANGLE = 1e-12
MAX_STEP_HALVINGS = 60
# relative spread of |z|²/(2 Im z) over vertices taken to share a circle tangent to R at 0
CIRCULAR_START_RTOL = 1e-6
MIN_CIRCULAR_VERTICES = 3


@dataclasses.dataclass(frozen=True, eq=False)
class WeldResult:
    driving: DrivingFunction
    hcap_total: float
    per_vertex_capacity: np.ndarray
    circular_start_vertices: int = 0


def _tilted_slit(p):
    theta = np.angle(p)
    if not MIN_SLIT_ANGLE < theta < np.pi - MIN_SLIT_ANGLE:
        raise ResolutionError(
            f"compute_driving: elementary slit angle {theta:.3g} is not resolvable at the current "
            f"resolution; refine the curve"
        )
    alpha = 1 - theta / np.pi
    k = abs(p) / (alpha**alpha * (1 - alpha) ** (1 - alpha))
    return alpha, -(1 - alpha) * k, alpha * k, (2 * alpha - 1) * k, k * k * alpha * (1 - alpha) / 4


def _unzip_points(q, p, alpha, a, b, lam, cfg):
    """
    Solve z(w) = q for w in the upper half-plane, vectorised over `q`, by
    damped Newton on α Log(w-a) + (1-α) Log(w-b) - Log(q) = 0. All arguments
    lie in (0, π) on the upper half-plane, so principal logarithms are
    consistent.
    """
    root = np.sqrt(q * q - p * p)
    root = np.where(root.imag < 0, -root, root)
    w = lam + root
    w = w.real + 1j * np.maximum(w.imag, 1e-3 * abs(p))
    target = np.log(q)

    for _ in range(cfg.max_newton_iters):
        residual = alpha * np.log(w - a) + (1 - alpha) * np.log(w - b) - target
        if np.max(np.abs(residual), initial=0.0) < cfg.newton_tol:
            return w
        step = residual / (alpha / (w - a) + (1 - alpha) / (w - b))
        w_new = w - step
        for _ in range(MAX_STEP_HALVINGS):
            below = w_new.imag <= 0
            if not np.any(below):
                break
            step = np.where(below, step / 2, step)
            w_new = w - step
        w = w_new

    residual = alpha * np.log(w - a) + (1 - alpha) * np.log(w - b) - target
    worst = float(np.max(np.abs(residual), initial=0.0))
    if worst < 1e3 * cfg.newton_tol:
        return w
    raise ResolutionError(
        f"compute_driving: inverting an elementary slit map did not converge (residual {worst:.3g}); "
        f"refine the curve"
    )


def _mirror(z, side):
    return z if side > 0 else -np.conj(z)


def _circular_start(z):
    """
    Number of leading vertices (base excluded) on one circle tangent to R at
    0, the circle radius, and the side the circle leaves to (+1 right, -1
    left). The count is 0 when fewer than MIN_CIRCULAR_VERTICES qualify.
    """
    if len(z) < MIN_CIRCULAR_VERTICES or z[0].real == 0 or z[0].imag <= 0:
        return 0, 0.0, 1.0
    side = 1.0 if z[0].real > 0 else -1.0
    points = _mirror(z, side)
    with np.errstate(divide="ignore", invalid="ignore"):
        radii = np.abs(points) ** 2 / (2 * points.imag)
        radius = float(radii[0])
        # on the circle 1/z = X - i/2 and X = cot(φ/2)/2 decreases along the arc
        x = (radius / points).real
        on_circle = (points.imag > 0) & (np.abs(radii / radius - 1) <= CIRCULAR_START_RTOL) & (x > 0)
    on_circle[1:] &= np.diff(x) < 0
    count = len(on_circle) if np.all(on_circle) else int(np.argmin(on_circle))
    if count < MIN_CIRCULAR_VERTICES:
        return 0, radius, side
    return count, radius, side


def _arc_map_reciprocal(w, params):
    """1/z(w) for the unit-circle arc map of `params`, and its derivative in w."""
    beta1, beta2 = params.beta1, params.beta2
    k = (beta2 + beta1) / (beta2 - beta1)
    value = (np.log(w - beta1) - np.log(w - beta2)) / (2 * np.pi) + k / (w - beta1)
    derivative = (1 / (w - beta1) - 1 / (w - beta2)) / (2 * np.pi) - k / (w - beta1) ** 2
    return value, derivative


def _arc_image(guess, target, params, cfg):
    # Newton on 1/z(w) = 1/target, halving steps that leave the upper half-plane
    inverse_target = 1 / target
    tol = cfg.newton_tol * abs(inverse_target)
    w = guess
    for _ in range(cfg.max_newton_iters):
        value, derivative = _arc_map_reciprocal(w, params)
        residual = value - inverse_target
        if abs(residual) < tol:
            return w
        step = residual / derivative
        w_new = w - step
        for _ in range(MAX_STEP_HALVINGS):
            if w_new.imag > 0:
                break
            step /= 2
            w_new = w - step
        w = w_new
    residual = abs(_arc_map_reciprocal(w, params)[0] - inverse_target)
    if residual < 1e3 * tol:
        return w
    raise ResolutionError(
        f"compute_driving: inverting the circular-arc map did not converge at {target:.6g} "
        f"(relative residual {residual / abs(inverse_target):.3g}); refine the curve"
    )


def _unzip_through_arc(q, params, cfg):
    """
    Images under the unit-circle arc map of `params` of the points `q`, which
    continue the curve beyond the arc tip. The first one is seeded from the
    quadratic behaviour of z(w) at the critical point λ₀, every later one
    from the previous image by an Euler predictor.
    """
    beta1, beta2, lam0 = params.beta1, params.beta2, params.lambda0
    k = (beta2 + beta1) / (beta2 - beta1)
    at_tip = np.log((lam0 - beta1) / (beta2 - lam0)) / (2 * np.pi) + k / (lam0 - beta1) - 0.5j
    second = (-1 / (lam0 - beta1) ** 2 + 1 / (lam0 - beta2) ** 2) / (2 * np.pi) + 2 * k / (lam0 - beta1) ** 3
    # z''(λ₀); z'(λ₀) = 0
    curvature = -second / at_tip**2

    images = np.empty_like(q)
    for j, target in enumerate(q):
        if j == 0:
            guess = lam0 + np.sqrt(2 * (target - 1 / at_tip) / curvature)
            if guess.imag < 0:
                guess = 2 * lam0 - guess
            guess = guess.real + 1j * max(guess.imag, 1e-3 * abs(guess - lam0))
        else:
            value, derivative = _arc_map_reciprocal(images[j - 1], params)
            guess = images[j - 1] - (target - q[j - 1]) * value**2 / derivative
            if guess.imag <= 0:
                guess = images[j - 1]
        images[j] = _arc_image(guess, target, params, cfg)
    return images


def _weld_circular_start(z, cfg):
    """
    Remove the leading vertices of `z` that lie on one circle tangent to R at
    0 with the circular-arc map.

    Returns (count, lam, capacity, images): driving values and capacities at
    those `count` vertices and the images of the remaining vertices. `count`
    is 0 when the curve does not start on such a circle.
    """
    count, radius, side = _circular_start(z)
    if count == 0:
        return 0, None, None, None
    points = _mirror(z, side) / radius
    angles = 2 * np.arctan2(1.0, 2 * (1 / points[:count]).real)
    params = [arc_params_at_angle(phi) for phi in angles]
    lam = side * radius * np.array([p.lambda0 for p in params])
    capacity = radius**2 * np.array([p.t for p in params])
    images = _mirror(radius * _unzip_through_arc(points[count:], params[-1], cfg), side)
    if np.any(images.imag <= 0):
        raise ResolutionError("compute_driving: vertex images left the upper half-plane after the circular start")
    logger.debug(
        f"compute_driving: {count} leading vertices lie on a circle of radius {radius:.6g} tangent at 0, "
        f"removed up to capacity {capacity[-1]:.6g}"
    )
    return count, lam, capacity, images


def compute_driving(curve: Curve, cfg: NumericConfig, check_simple=True, circular_start=True) -> WeldResult:
    """
    Recover the sampled driving function and the capacities of a polygonal
    slit.

    Parameters
    ----------
    curve : Curve
        Slit with at least 2 vertices, starting at the origin.
    cfg : NumericConfig
    check_simple : bool, optional
        Verify that the polyline does not self-intersect before welding.
    circular_start : bool, optional
        Remove leading vertices on a circle tangent to R at 0 with the exact
        circular-arc map instead of chords.

    Returns
    -------
    WeldResult
        `driving` samples λ at the vertex capacities (λ(0) = 0), interpolated
        in √t like every sampled driving.
    """
    if check_simple:
        curve.check_simple()

    n = len(curve)
    z = curve.vertices[1:].copy()
    xi = 0.0
    lam = np.zeros(n)
    capacity = np.zeros(n)

    start = 0
    if circular_start:
        start, arc_lam, arc_capacity, images = _weld_circular_start(z, cfg)
        if start:
            lam[1 : start + 1] = arc_lam
            capacity[1 : start + 1] = arc_capacity
            z[start:] = images
            xi = lam[start]

    for step in range(start, n - 1):
        p = z[step] - xi
        alpha, a, b, lam_step, dcap = _tilted_slit(p)
        if step < n - 2:
            images = _unzip_points(z[step + 1 :] - xi, p, alpha, a, b, lam_step, cfg)
            if np.any(images.imag <= 0):
                raise ResolutionError(
                    f"compute_driving: vertex images left the upper half-plane at step {step}; refine the curve"
                )
            z[step + 1 :] = images + xi
        xi += lam_step
        lam[step + 1] = xi
        capacity[step + 1] = capacity[step] + dcap

    if np.any(np.diff(capacity) <= 0):
        raise ResolutionError("compute_driving: capacity increments vanished; refine the curve")

    logger.info(f"Welded curve with {n} vertices: hcap={capacity[-1]:.8g}, lambda(end)={lam[-1]:.8g}")
    return WeldResult(
        driving=DrivingFunction.sampled(capacity, lam),
        hcap_total=float(capacity[-1]),
        per_vertex_capacity=capacity,
        circular_start_vertices=start,
    )


def hcap(curve: Curve, cfg: NumericConfig) -> float:
    """Half-plane capacity of the curve."""
    return compute_driving(curve, cfg).hcap_total


def with_capacity(curve: Curve, cfg: NumericConfig) -> Curve:
    """The curve with its capacity parametrisation populated by welding."""
    result = compute_driving(curve, cfg)
    return Curve(curve.vertices, curve.arc_length, result.per_vertex_capacity)


def round_trip_error(driving: DrivingFunction, curve: Curve, cfg: NumericConfig) -> float:
    """
    sup_i |λ_weld(t_i) - λ(t_i)| where `curve` is the trace of `driving`
    with its capacities t_i populated, and λ_weld the welded driving.
    """
    if curve.capacity is None:
        raise InvalidArgument("round_trip_error: the trace must carry its capacities")
    welded = compute_driving(curve, cfg).driving
    times = curve.capacity[1:]
    times = times[times <= welded.domain_end]
    return float(np.max(np.abs(welded(times) - driving(times))))


def hcap_closeness_ratios(theta, kappa, order, ks, n_vertices, cfg: NumericConfig):
    """
    |t(s) - τ(s)| / s² at s = 2^{-k}, where τ(s) is the capacity of the
    segment of length s at angle θ and t(s) the capacity of the tangent
    perturbed segment of the same parameter length.
    """
    ratios = []
    for k in ks:
        s = 2.0 ** (-k)
        line = generate_curve(LineSpec(theta, s), n_vertices)
        perturbed = generate_curve(PerturbedLineSpec(theta, kappa, order, s), n_vertices)
        difference = abs(hcap(perturbed, cfg) - hcap(line, cfg))
        ratios.append(difference / s**2)
        logger.debug(f"hcap closeness at s=2^-{k}: ratio {ratios[-1]:.3g}")
    return np.array(ratios)
