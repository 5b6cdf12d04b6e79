"""
Closed-form and semi-closed-form solution families used as ground truth.

sqrt family
    λ(t) = c√t drives a straight slit {B(c)√x : 0 <= x <= t} with
    |B(c)| = 2((√(c²+16)+c)/(√(c²+16)-c))^(c/(2√(c²+16))) and
    arg B(c) = θ(c) = (π/2)(1 - β), β = c/√(c²+16). The slit sides are
    mapped onto [(c-√(c²+16))/2·√t, c√t] and [c√t, (c+√(c²+16))/2·√t].

circular-arc family
    The arc of the unit circle centred at i, growing to the right of the
    origin, has the inverse map given by the Christoffel-Schwarz form

        1/f₀^{-1}(w,t) = (1/2π) log((w-β₁)/(w-β₂)) + K/(w-β₁),
        K = (β₂+β₁)/(β₂-β₁),

    with the logarithm taken as Log(w-β₁) - Log(w-β₂) (principal branches,
    boundary values from the upper half-plane), so that (β₁, β₂) is mapped
    onto the circle where Im(1/z) = -1/2. Expanding at w → ∞ under
    f₀^{-1}(w) = w - 2t/w + O(1/w²) gives, per power of 1/w,

        1/w  : (β₂-β₁)/(2π) + K = 1       ⇔  r₁ = 1 + 4πβ₁/(β₂-β₁)² = 0
        1/w² : vanishes identically once the 1/w condition holds
        1/w³ : (β₂³-β₁³)/(6π) + Kβ₁² = 2t ⇔  r₂ = [...]/(2t) - 1 = 0

    and the driving λ₀ = 2β₁ + β₂ (the critical point of the integrand).
"""
import dataclasses
import functools

import numpy as np
import scipy.optimize
from loguru import logger

from .config import NumericConfig
from .core import DrivingFunction, SingularPair
from .core.driving import DrivingKind
from .exceptions import ConvergenceError, InvalidArgument

# nodes of the tabulated arc driving, uniform in t^(1/3)
N_ARC_DRIVING_NODES = 1024
MIN_DAMPING = 2.0**-20


@dataclasses.dataclass(frozen=True)
class SqrtSlitParams:
    c: float
    beta: float
    b_modulus: float
    theta: float


@dataclasses.dataclass(frozen=True)
class ArcParams:
    t: float
    beta1: float
    beta2: float
    lambda0: float
    residual1: float = 0.0
    residual2: float = 0.0
    jacobian_condition: float = float("nan")


def sqrt_params(c: float) -> SqrtSlitParams:
    """Direction and modulus of the straight slit driven by λ(t) = c√t."""
    if c < 0:
        raise InvalidArgument(f"sqrt_params: c must be non-negative, got {c}")
    root = np.sqrt(c * c + 16)
    beta = c / root
    b_modulus = 2 * ((root + c) / (root - c)) ** (c / (2 * root))
    return SqrtSlitParams(c=float(c), beta=float(beta), b_modulus=float(b_modulus), theta=float(np.pi / 2 * (1 - beta)))


def theta_for_c(c: float) -> float:
    return sqrt_params(c).theta


def c_for_theta(theta: float) -> float:
    """Inverse of θ(c): the coefficient whose slit leaves 0 at angle θ in (0, π/2]."""
    if not 0 < theta <= np.pi / 2:
        raise InvalidArgument(f"c_for_theta: theta must lie in (0, pi/2], got {theta}")
    beta = 1 - 2 * theta / np.pi
    return float(4 * beta / np.sqrt(1 - beta * beta))


def sqrt_interval_endpoints(c: float, t: float) -> SingularPair:
    if c < 0 or t < 0:
        raise InvalidArgument(f"sqrt_interval_endpoints: c and t must be non-negative, got c={c}, t={t}")
    root = np.sqrt(c * c + 16)
    sqrt_t = np.sqrt(t)
    return SingularPair(
        t=float(t),
        f_minus=float((c - root) / 2 * sqrt_t),
        lam=float(c * sqrt_t),
        f_plus=float((c + root) / 2 * sqrt_t),
    )


def sqrt_tip(c: float, t: float) -> complex:
    """γ(t) = |B(c)|√t e^{iθ(c)}."""
    params = sqrt_params(c)
    return complex(params.b_modulus * np.sqrt(t) * np.exp(1j * params.theta))


def arc_series_coeffs():
    """Leading coefficients of β₁ ≈ A1 t^(2/3), β₂ ≈ B1 t^(1/3), λ₀ ≈ C1 t^(1/3)."""
    a1 = -((9 / (4 * np.pi)) ** (1 / 3))
    b1 = (12 * np.pi) ** (1 / 3)
    return dict(A1=a1, B1=b1, C1=b1, B2_minus_C2=-2 * a1)


def _arc_residuals(beta1, beta2, t):
    d = beta2 - beta1
    k = (beta2 + beta1) / d
    r1 = 1 + 4 * np.pi * beta1 / d**2
    p = (beta2**3 - beta1**3) / (6 * np.pi) + k * beta1**2
    return np.array([r1, p / (2 * t) - 1])


def _arc_jacobian(beta1, beta2, t):
    d = beta2 - beta1
    k = (beta2 + beta1) / d
    dr1_db1 = 4 * np.pi / d**2 + 8 * np.pi * beta1 / d**3
    dr1_db2 = -8 * np.pi * beta1 / d**3
    dp_db1 = -(beta1**2) / (2 * np.pi) + 2 * beta2 * beta1**2 / d**2 + 2 * k * beta1
    dp_db2 = beta2**2 / (2 * np.pi) - 2 * beta1**3 / d**2
    return np.array([[dr1_db1, dr1_db2], [dp_db1 / (2 * t), dp_db2 / (2 * t)]])


def _check_arc_time(t, cfg, operation):
    if not 0 < t <= cfg.arc_t_max:
        raise InvalidArgument(
            f"{operation}: t={t} outside the working range (0, {cfg.arc_t_max}] of the arc family"
        )


def _solve_arc(t, cfg, guess=None):
    if guess is None:
        coeffs = arc_series_coeffs()
        guess = (coeffs["A1"] * t ** (2 / 3), coeffs["B1"] * t ** (1 / 3))
    x = np.array(guess, dtype=float)
    residual = _arc_residuals(*x, t)
    norm = np.linalg.norm(residual)

    for iteration in range(cfg.max_newton_iters):
        if norm < cfg.newton_tol:
            break
        step = np.linalg.solve(_arc_jacobian(*x, t), -residual)
        # damped Newton: halve the step until the residual decreases inside the admissible set
        damping = 1.0
        while damping >= MIN_DAMPING:
            x_new = x + damping * step
            if x_new[0] < 0 < x_new[1]:
                residual_new = _arc_residuals(*x_new, t)
                norm_new = np.linalg.norm(residual_new)
                if norm_new < norm:
                    break
            damping /= 2
        else:
            raise ConvergenceError(
                f"arc_params: damped Newton stalled at t={t:.6g} after {iteration} iterations "
                f"(residual1={residual[0]:.3g}, residual2={residual[1]:.3g})"
            )
        x, residual, norm = x_new, residual_new, norm_new
        logger.debug(f"arc_params: t={t:.3g} iteration {iteration} residual {norm:.3g} damping {damping:g}")
    else:
        if norm >= cfg.newton_tol:
            raise ConvergenceError(
                f"arc_params: Newton did not converge after {cfg.max_newton_iters} iterations at t={t:.6g} "
                f"(residual1={residual[0]:.3g}, residual2={residual[1]:.3g})"
            )
    return x, residual


def arc_params(t: float, cfg: NumericConfig) -> ArcParams:
    """
    Christoffel-Schwarz parameters (β₁, β₂, λ₀) of the circular-arc slit of
    capacity `t`, by damped Newton on the two normalisation conditions seeded
    with the leading series β₁ ≈ A1 t^(2/3), β₂ ≈ B1 t^(1/3).
    """
    _check_arc_time(t, cfg, "arc_params")
    (beta1, beta2), residual = _solve_arc(t, cfg)
    condition = float(np.linalg.cond(_arc_jacobian(beta1, beta2, t)))
    return ArcParams(
        t=float(t),
        beta1=float(beta1),
        beta2=float(beta2),
        lambda0=float(2 * beta1 + beta2),
        residual1=float(residual[0]),
        residual2=float(residual[1]),
        jacobian_condition=condition,
    )


def arc_interval_endpoints(t: float, cfg: NumericConfig) -> SingularPair:
    """(β₁, λ₀, β₂): images of the outer (left) and inner (right) sides of the arc."""
    params = arc_params(t, cfg)
    return SingularPair(t=params.t, f_minus=params.beta1, lam=params.lambda0, f_plus=params.beta2)


def arc_tip(t: float, cfg: NumericConfig) -> complex:
    """
    Tip of the arc slit of capacity `t`, from the boundary value of the
    Christoffel-Schwarz form at w = λ₀.
    """
    params = arc_params(t, cfg)
    beta1, beta2, lambda0 = params.beta1, params.beta2, params.lambda0
    k = (beta2 + beta1) / (beta2 - beta1)
    inverse = np.log((lambda0 - beta1) / (beta2 - lambda0)) / (2 * np.pi) + k / (lambda0 - beta1) - 0.5j
    return complex(1 / inverse)


def _arc_params_from_width(d):
    # r₁ = 0 fixes β₁ = -d²/(4π) for the width d = β₂ - β₁; r₂ = 0 then gives t
    beta1 = -d * d / (4 * np.pi)
    beta2 = d + beta1
    k = (beta2 + beta1) / d
    t = ((beta2**3 - beta1**3) / (6 * np.pi) + k * beta1**2) / 2
    return ArcParams(t=float(t), beta1=float(beta1), beta2=float(beta2), lambda0=float(2 * beta1 + beta2))


def arc_params_at_angle(phi: float) -> ArcParams:
    """
    Christoffel-Schwarz parameters of the arc slit ending at angle `phi` on the
    unit circle centred at i, i.e. at sin φ + i(1 - cos φ), for 0 < φ < π.

    The normalisation r₁ = 0 leaves a one-parameter family in the width
    d = β₂ - β₁. On the circle 1/z = X - i/2 with X = cot(φ/2)/2, and the
    boundary value at λ₀ gives X = log((1-u)/u)/(2π) + 1/d with u = d/(2π),
    which is decreasing in d; it is solved by bracketing. No capacity range
    applies.
    """
    if not 0 < phi < np.pi:
        raise InvalidArgument(f"arc_params_at_angle: phi must lie in (0, pi), got {phi}")
    x = 0.5 / np.tan(phi / 2)

    def residual(d):
        u = d / (2 * np.pi)
        return np.log((1 - u) / u) / (2 * np.pi) + 1 / d - x

    lower = min(0.25 / x, 1.0)
    upper = 2 * np.pi * (1 - 1e-12)
    d = scipy.optimize.brentq(residual, lower, upper, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    return _arc_params_from_width(d)


@functools.lru_cache(maxsize=8)
def _arc_driving_table(domain_end, cfg):
    tau = np.linspace(0.0, np.cbrt(domain_end), N_ARC_DRIVING_NODES)
    times = tau**3
    values = np.zeros_like(times)
    guess = None
    for i, t in enumerate(times[1:], start=1):
        # continuation: seed each node with the previous solution rescaled by the series exponents
        if guess is not None:
            ratio = t / times[i - 1]
            guess = (guess[0] * ratio ** (2 / 3), guess[1] * ratio ** (1 / 3))
        (beta1, beta2), _ = _solve_arc(t, cfg, guess)
        guess = (beta1, beta2)
        values[i] = 2 * beta1 + beta2
    logger.debug(f"Tabulated the arc driving on {N_ARC_DRIVING_NODES} nodes up to t={domain_end}")
    return times, values


def arc_driving(domain_end: float = None, cfg: NumericConfig = NumericConfig()) -> DrivingFunction:
    """
    The implicit driving λ₀(t) of the circular-arc slit, tabulated on a
    uniform grid in t^(1/3) and interpolated by a cubic spline in that
    variable.
    """
    domain_end = cfg.arc_t_max if domain_end is None else domain_end
    _check_arc_time(domain_end, cfg, "arc_driving")
    times, values = _arc_driving_table(float(domain_end), cfg)
    return DrivingFunction(DrivingKind.ARC, float(domain_end), times=times, values=values)
