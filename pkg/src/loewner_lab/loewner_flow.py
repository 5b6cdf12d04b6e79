"""
Chordal Löwner flow df/dt = 2/(f - λ(t)), f(z, 0) = z.

All integrations run in the variable u = √t (forward: df/du = 4u/(f - λ(u²))),
which turns the square-root behaviour of the flow near the singular start into
linear behaviour in u. The backward flow that recovers the trace is started
with a square-root bootstrap step and integrated in σ = √s on [0, t/2] and in
u = √(t - s) on the remainder.
"""
import dataclasses
from typing import Optional

import numpy as np
import scipy.integrate
from loguru import logger

from .config import NumericConfig, parallel_map
from .core import Curve, DrivingFunction, SingularPair
from .exceptions import ConvergenceError, IntegrationError, InvalidArgument

# distance |f - λ| (relative to the problem scale) below which a point counts as swallowed
SWALLOW_TOL = 1e-13
# allowed excursion of the backward flow below the real axis, relative to √t
LOWER_HALF_PLANE_TOL = 1e-9
# sample points on the circle |z| = radius used by check_normalization
N_NORMALIZATION_SAMPLES = 16


@dataclasses.dataclass(frozen=True)
class FlowResult:
    value: complex
    survived: bool
    step_count: int
    error_estimate: float
    swallow_time: Optional[float] = None


def _check_time(driving, t, operation, allow_zero=True):
    if t < 0 or (t == 0 and not allow_zero) or t > driving.domain_end * (1 + 1e-12):
        raise InvalidArgument(
            f"{operation}: t={t} outside the domain {'[' if allow_zero else '('}0, {driving.domain_end}]"
        )


def _solve(rhs, span, y0, cfg, atol=None, method=None, **kwargs):
    return scipy.integrate.solve_ivp(
        rhs,
        span,
        y0,
        method=cfg.ode_method if method is None else method,
        rtol=cfg.ode_rel_tol,
        atol=cfg.ode_abs_tol if atol is None else atol,
        **kwargs,
    )


def evolve_point(z0, driving: DrivingFunction, t: float, cfg: NumericConfig, estimate_error=False) -> FlowResult:
    """
    Evolve a point under the forward flow, returning f(z0, t).

    Parameters
    ----------
    z0 : complex or float
        Start point in the closed upper half-plane; real starts are integrated
        as a real ODE.
    driving : DrivingFunction
    t : float
        Capacity in [0, driving.domain_end].
    cfg : NumericConfig
    estimate_error : bool, optional
        If True, repeat the integration with 100x looser tolerances and report
        the difference; otherwise the tolerance-implied bound is reported.

    Returns
    -------
    FlowResult
        `survived` is False (with the swallowing time) when |f - λ| collapses
        before `t`.
    """
    _check_time(driving, t, "evolve_point")
    z0 = complex(z0)
    if z0.imag < 0:
        raise InvalidArgument(f"evolve_point: z0={z0} lies below the real axis")
    if t == 0:
        return FlowResult(value=z0, survived=True, step_count=0, error_estimate=0.0)
    if z0 == 0:
        raise InvalidArgument("evolve_point: z0 = 0 is the singular point, use singular_pair")

    is_real = z0.imag == 0
    y0 = np.array([z0.real]) if is_real else np.array([z0], dtype=complex)
    swallow_tol = SWALLOW_TOL * max(abs(z0), np.sqrt(t))

    def rhs(u, y):
        return 4 * u / (y - driving.at_sqrt_time(u))

    def swallowed(u, y):
        return abs(y[0] - driving.at_sqrt_time(u)) - swallow_tol

    swallowed.terminal = True
    swallowed.direction = -1

    sol = _solve(rhs, (0.0, np.sqrt(t)), y0, cfg, events=swallowed)
    value = complex(sol.y[0, -1])
    if is_real:
        value = value.real
    step_count = len(sol.t) - 1

    if sol.status != 0:
        u_stop = sol.t_events[0][0] if sol.status == 1 else sol.t[-1]
        logger.debug(f"evolve_point: z0={z0} swallowed near t={u_stop**2:.6g} ({sol.message})")
        return FlowResult(
            value=value,
            survived=False,
            step_count=step_count,
            error_estimate=float("nan"),
            swallow_time=float(u_stop**2),
        )

    if estimate_error:
        coarse_cfg = cfg.updated(ode_rel_tol=cfg.ode_rel_tol * 100, ode_abs_tol=cfg.ode_abs_tol * 100)
        coarse = _solve(rhs, (0.0, np.sqrt(t)), y0, coarse_cfg)
        error_estimate = float(abs(coarse.y[0, -1] - sol.y[0, -1]))
    else:
        error_estimate = cfg.ode_rel_tol * abs(value) + cfg.ode_abs_tol

    return FlowResult(value=value, survived=True, step_count=step_count, error_estimate=error_estimate)


def _aitken(e0, e1, e2, noise):
    d1, d2 = e1 - e0, e2 - e1
    if abs(d2) <= noise or d1 * d2 <= 0 or abs(d2) >= abs(d1):
        return e2
    return e2 - d2 * d2 / (d2 - d1)


def _extrapolate_eps(values, noise):
    """
    Richardson-type extrapolation of f(±ε_k, t) to ε = 0 on a geometric ε
    sequence. The order of the leading error term depends on the angle at
    which the slit leaves the real axis, so it is estimated from three
    consecutive values (Aitken Δ²). Returns the last two extrapolants.
    """
    if len(values) == 2:
        return values[1], values[0]
    estimates = [_aitken(*values[k : k + 3], noise) for k in range(len(values) - 2)]
    previous = estimates[-2] if len(estimates) > 1 else values[-2]
    return estimates[-1], previous


def _approach_side(driving, sign, eps, u_eval, cfg, atol, swallow_tol):
    """
    f(λ(0) + sign·ε, t) for the ε of `eps` (largest first) at the sqrt-times
    `u_eval`, one row per ε. A start that comes closer to λ than `swallow_tol`
    or crosses it cannot be resolved; it and every smaller ε are dropped.
    """
    lam0 = driving(0.0)
    lam_eval = driving.at_sqrt_time(u_eval)

    def rhs(u, y):
        return 4 * u / (y - driving.at_sqrt_time(u))

    def swallowed(u, y):
        return abs(y[0] - driving.at_sqrt_time(u)) - swallow_tol

    swallowed.terminal = True
    swallowed.direction = -1

    rows = []
    for e in eps:
        sol = _solve(
            rhs,
            (0.0, u_eval[-1]),
            np.array([lam0 + sign * e]),
            cfg,
            atol=atol,
            method=cfg.real_ode_method,
            t_eval=u_eval,
            events=swallowed,
        )
        logger.trace(f"singular_pair: start {sign * e:+.3g} took {sol.nfev} right-hand side evaluations")
        if sol.status != 0 or sol.y.shape[1] < len(u_eval) or np.any(sign * (sol.y[0] - lam_eval) <= 0):
            logger.debug(f"singular_pair: start λ(0){'+' if sign > 0 else '-'}{e:.3g} not resolved ({sol.message})")
            break
        rows.append(sol.y[0])
    return np.array(rows)


def singular_pairs(driving: DrivingFunction, t_grid, cfg: NumericConfig):
    """
    Singular solutions at every capacity of `t_grid`.

    The maximal and minimal singular solutions are approached from the real
    starts λ(0) ± ε_k √t_min (ε_k from `cfg.eps_list`), each integrated once
    up to the largest capacity, and extrapolated to ε = 0. Near a tangential
    slit side the start meets λ(t) so closely that the smallest ε cannot be
    resolved; such starts are dropped, and the remaining ones (at least two)
    are used.

    Returns
    -------
    list of SingularPair
        In the order of `t_grid`.
    """
    times = np.atleast_1d(np.asarray(t_grid, dtype=float))
    for t in times:
        _check_time(driving, t, "singular_pair", allow_zero=False)
    sorted_times = np.unique(times)
    u_eval = np.sqrt(sorted_times)
    scale = np.sqrt(sorted_times[0])

    eps = np.sort(np.asarray(cfg.eps_list))[::-1] * scale
    atol = cfg.ode_abs_tol * min(1.0, scale)
    swallow_tol = SWALLOW_TOL * scale

    sides = {}
    for name, sign in (("plus", 1.0), ("minus", -1.0)):
        rows = _approach_side(driving, sign, eps, u_eval, cfg, atol, swallow_tol)
        if len(rows) == 0:
            raise IntegrationError(
                f"singular_pair: integration from λ(0){'+' if sign > 0 else '-'}ε stopped before "
                f"t={sorted_times[-1]:.6g}; the driving {driving.describe()} may not generate a slit"
            )
        if len(rows) < 2:
            raise ConvergenceError(
                f"singular_pair: only the start ε={eps[0]:.3g} on the {name} side could be resolved, "
                f"nothing to extrapolate from; use a larger cfg.eps_list"
            )
        sides[name] = rows
    logger.debug(
        f"singular_pair: {len(sides['plus'])} (plus) and {len(sides['minus'])} (minus) starts "
        f"resolved up to t={sorted_times[-1]:.6g}"
    )

    pairs = {}
    for j, t in enumerate(sorted_times):
        plus = sides["plus"][:, j]
        minus = sides["minus"][:, j]
        noise_plus = 10 * (cfg.ode_rel_tol * np.max(np.abs(plus)) + atol)
        noise_minus = 10 * (cfg.ode_rel_tol * np.max(np.abs(minus)) + atol)
        f_plus, f_plus_prev = _extrapolate_eps(plus, noise_plus)
        f_minus, f_minus_prev = _extrapolate_eps(minus, noise_minus)
        length = f_plus - f_minus
        tol = cfg.extrapolation_rel_tol * length
        diffs = (abs(f_plus - f_plus_prev), abs(f_minus - f_minus_prev))
        if max(diffs) > tol:
            raise ConvergenceError(
                f"singular_pair: ε-extrapolation did not converge at t={t:.6g} "
                f"(successive estimates differ by {diffs[0]:.3g} (plus) and {diffs[1]:.3g} (minus), "
                f"tolerance {tol:.3g}; f(+ε)={plus.tolist()}, f(-ε)={minus.tolist()})"
            )
        lam = driving(t)
        # the image segment always contains λ(t); clip round-off at the ends
        pairs[t] = SingularPair(
            t=float(t),
            f_minus=float(min(f_minus, lam)),
            lam=float(lam),
            f_plus=float(max(f_plus, lam)),
        )

    return [pairs[t] for t in times]


def singular_pair(driving: DrivingFunction, t: float, cfg: NumericConfig) -> SingularPair:
    """
    (f₂(0,t), λ(t), f₁(0,t)): the minimal and maximal singular solutions at
    capacity `t`, bounding the image segment of the slit.
    """
    return singular_pairs(driving, [t], cfg)[0]


def _check_upper_half_plane(sol, t, operation):
    tol = LOWER_HALF_PLANE_TOL * np.sqrt(t)
    lowest = float(np.min(sol.y[0].imag))
    if lowest < -tol:
        raise IntegrationError(
            f"{operation}: backward flow left the upper half-plane (Im h = {lowest:.3g}) at t={t:.6g}; "
            f"the driving does not generate a slit at this resolution"
        )


def trace_tip(driving: DrivingFunction, t: float, cfg: NumericConfig) -> complex:
    """
    The tip γ(t) = f^{-1}(λ(t), t), from the backward flow
    dh/ds = -2/(h - λ(t - s)), h(0) = λ(t), integrated over s in [0, t].
    """
    _check_time(driving, t, "trace_tip")
    if t == 0:
        return 0j

    lam_t = driving(t)
    s0 = cfg.bootstrap_fraction * t
    sigma0 = np.sqrt(s0)
    sigma1 = np.sqrt(t / 2)
    h0 = np.array([lam_t + 2j * sigma0], dtype=complex)

    def rhs_near_tip(sigma, h):
        return -4 * sigma / (h - driving(max(t - sigma * sigma, 0.0)))

    def rhs_near_base(u, h):
        return 4 * u / (h - driving.at_sqrt_time(u))

    first = _solve(rhs_near_tip, (sigma0, sigma1), h0, cfg)
    if not first.success:
        raise IntegrationError(f"trace_tip: backward flow failed near the tip at t={t:.6g} ({first.message})")
    _check_upper_half_plane(first, t, "trace_tip")

    second = _solve(rhs_near_base, (sigma1, 0.0), first.y[:, -1], cfg)
    if not second.success:
        raise IntegrationError(f"trace_tip: backward flow failed near the base at t={t:.6g} ({second.message})")
    _check_upper_half_plane(second, t, "trace_tip")

    return complex(second.y[0, -1])


def compute_trace(driving: DrivingFunction, t_grid, cfg: NumericConfig) -> Curve:
    """
    Trace vertices γ(t) at the capacities of an increasing grid.

    The returned curve starts at the base point 0 (capacity 0), followed by
    one vertex per grid point; arc length is accumulated along the chords.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise InvalidArgument("compute_trace: t_grid must be a non-empty 1D sequence")
    if np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise InvalidArgument("compute_trace: t_grid must be positive and strictly increasing")

    tips = parallel_map(lambda t: trace_tip(driving, t, cfg), times)
    vertices = np.concatenate(([0j], np.asarray(tips, dtype=complex)))
    logger.info(f"Computed trace of {driving.describe()} at {len(times)} capacities")
    return Curve.from_vertices(vertices, capacity=np.concatenate(([0.0], times)))


def inverse_point(w, driving: DrivingFunction, t: float, cfg: NumericConfig) -> complex:
    """f^{-1}(w, t) for w in the upper half-plane, by the backward flow started at w."""
    _check_time(driving, t, "inverse_point")
    w = complex(w)
    if w.imag <= 0:
        raise InvalidArgument(f"inverse_point: w={w} must lie in the upper half-plane")
    if t == 0:
        return w

    def rhs(u, h):
        return 4 * u / (h - driving.at_sqrt_time(u))

    sol = _solve(rhs, (np.sqrt(t), 0.0), np.array([w], dtype=complex), cfg)
    if not sol.success:
        raise IntegrationError(f"inverse_point: backward flow failed at t={t:.6g} ({sol.message})")
    _check_upper_half_plane(sol, t, "inverse_point")
    return complex(sol.y[0, -1])


def check_normalization(driving: DrivingFunction, t: float, radius: float, cfg: NumericConfig) -> float:
    """
    max over |z| = radius (upper half) of |f(z,t) - z - 2t/z|·|z|², which
    stays bounded when the map has the hydrodynamic expansion
    f(z,t) = z + 2t/z + O(1/z²).

    The displacement f - z is integrated directly so that the residual is not
    lost to cancellation at large radius.
    """
    _check_time(driving, t, "check_normalization")
    if not radius > 0:
        raise InvalidArgument(f"check_normalization: radius must be positive, got {radius}")
    if t == 0:
        return 0.0

    angles = np.pi * (np.arange(N_NORMALIZATION_SAMPLES) + 0.5) / N_NORMALIZATION_SAMPLES
    z = radius * np.exp(1j * angles)

    def rhs(u, e):
        return 4 * u / (z + e - driving.at_sqrt_time(u))

    atol = cfg.ode_abs_tol * t / radius
    sol = _solve(rhs, (0.0, np.sqrt(t)), np.zeros_like(z), cfg, atol=atol)
    if not sol.success:
        raise IntegrationError(f"check_normalization: integration failed ({sol.message})")
    displacement = sol.y[:, -1]
    return float(np.max(np.abs(displacement - 2 * t / z) * np.abs(z) ** 2))
