import dataclasses
from typing import Union

import numpy as np
from loguru import logger

from ..exceptions import InvalidArgument
from .types import Curve

DEFAULT_N_VERTICES = 4096
# oversampling of the parameter when a curve is resampled uniformly in arc length
RESAMPLING_FACTOR = 16


@dataclasses.dataclass(frozen=True)
class LineSpec:
    """Segment {e^{iθ}s : 0 <= s <= length}."""

    theta: float
    length: float = 1.0


@dataclasses.dataclass(frozen=True)
class ArcSpec:
    """Unit circle centred at i, points sin φ + i(1 - cos φ) for 0 <= φ <= phi_max."""

    phi_max: float


@dataclasses.dataclass(frozen=True)
class PerturbedLineSpec:
    """e^{iθ}s + i e^{iθ} κ s^order, tangent to the ray of angle θ to order `order`-1."""

    theta: float
    kappa: float
    order: int = 5
    length: float = 1.0


@dataclasses.dataclass(frozen=True)
class PerturbedArcSpec:
    """The `ArcSpec` arc displaced by κ φ^order along its normal towards the centre i."""

    phi_max: float
    kappa: float
    order: int = 7


CurveSpec = Union[LineSpec, ArcSpec, PerturbedLineSpec, PerturbedArcSpec]


def _validate_theta(theta):
    if not 0 < theta < np.pi:
        raise InvalidArgument(f"generate_curve: theta must lie in (0, pi), got {theta}")


def _validate_length(length):
    if not length > 0:
        raise InvalidArgument(f"generate_curve: length must be positive, got {length}")


def _validate_phi_max(phi_max):
    if not 0 < phi_max < np.pi:
        raise InvalidArgument(f"generate_curve: phi_max must lie in (0, pi), got {phi_max}")


def _arc_points(phi):
    # 1 - cos φ written as 2 sin²(φ/2) to keep the imaginary part accurate near 0
    return np.sin(phi) + 2j * np.sin(phi / 2) ** 2


def _resample_by_arc_length(func, param_max, n_vertices):
    """
    Evaluate the parametrised curve `func` on [0, param_max] at vertices that
    are equidistant in arc length.
    """
    params = np.linspace(0.0, param_max, RESAMPLING_FACTOR * (n_vertices - 1) + 1)
    points = func(params)
    cumulative = np.concatenate(([0.0], np.cumsum(np.abs(np.diff(points)))))
    arc_length = np.linspace(0.0, cumulative[-1], n_vertices)
    vertex_params = np.interp(arc_length, cumulative, params)
    vertices = func(vertex_params)
    vertices[0] = 0.0
    return Curve(vertices=vertices, arc_length=arc_length)


def generate_curve(spec: CurveSpec, n_vertices: int = DEFAULT_N_VERTICES) -> Curve:
    """
    Sample a slit from one of the built-in geometric families.

    Parameters
    ----------
    spec : LineSpec, ArcSpec, PerturbedLineSpec or PerturbedArcSpec
        The family and its parameters.
    n_vertices : int
        Number of vertices, sampled uniformly in arc length (base included).

    Returns
    -------
    Curve
        Curve with arc length populated and capacity unpopulated.
    """
    if n_vertices < 2:
        raise InvalidArgument(f"generate_curve: n_vertices must be at least 2, got {n_vertices}")

    if isinstance(spec, LineSpec):
        _validate_theta(spec.theta)
        _validate_length(spec.length)
        arc_length = np.linspace(0.0, spec.length, n_vertices)
        return Curve(vertices=np.exp(1j * spec.theta) * arc_length, arc_length=arc_length)

    if isinstance(spec, ArcSpec):
        _validate_phi_max(spec.phi_max)
        phi = np.linspace(0.0, spec.phi_max, n_vertices)
        return Curve(vertices=_arc_points(phi), arc_length=phi)

    if isinstance(spec, PerturbedLineSpec):
        _validate_theta(spec.theta)
        _validate_length(spec.length)
        if spec.order < 5:
            raise InvalidArgument(
                f"generate_curve: perturbed-line needs order >= 5 for 4-order tangency, got {spec.order}"
            )
        if spec.kappa == 0:
            return generate_curve(LineSpec(spec.theta, spec.length), n_vertices)
        direction = np.exp(1j * spec.theta)

        def func(s):
            return direction * (s + 1j * spec.kappa * s**spec.order)

        return _resample_by_arc_length(func, spec.length, n_vertices)

    if isinstance(spec, PerturbedArcSpec):
        _validate_phi_max(spec.phi_max)
        if spec.order < 7:
            raise InvalidArgument(
                f"generate_curve: perturbed-arc needs order >= 7 for 6-order tangency, got {spec.order}"
            )
        if spec.kappa == 0:
            return generate_curve(ArcSpec(spec.phi_max), n_vertices)

        def func(phi):
            inward_normal = -np.sin(phi) + 1j * np.cos(phi)
            return _arc_points(phi) + spec.kappa * phi**spec.order * inward_normal

        curve = _resample_by_arc_length(func, spec.phi_max, n_vertices)
        logger.debug(f"Generated perturbed arc of length {curve.length:.6g} with {n_vertices} vertices")
        return curve

    raise InvalidArgument(f"generate_curve: unknown curve spec {spec!r}")


def mobius_to_segment(curve: Curve) -> np.ndarray:
    """
    Images of the vertices under w ↦ 2w/(2 + iw), which sends the unit circle
    centred at i onto the real axis. The result is reflected in the imaginary
    axis when needed so that the images of arc vertices lie on the positive
    real axis.
    """
    w = curve.vertices
    images = 2 * w / (2 + 1j * w)
    if np.mean(images.real) < 0:
        images = -np.conj(images)
    return images


def capacity_length_ratio(curve: Curve, exponent: float) -> np.ndarray:
    """
    s / t**exponent at every non-base vertex of a curve with populated
    capacity; tends to |B(c)| (exponent 1/2) for rays and to ∛(12π)
    (exponent 1/3) for the circular arc.
    """
    if curve.capacity is None:
        raise InvalidArgument("capacity_length_ratio: the curve has no capacity parametrisation")
    return curve.arc_length[1:] / curve.capacity[1:] ** exponent
