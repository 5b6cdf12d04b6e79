import dataclasses
import enum
from typing import Optional

import numpy as np

from ..exceptions import InvalidArgument

# plane points are plain Python/numpy complex numbers
ComplexPoint = complex


class Side(enum.Enum):
    """
    Slit sides. `LEFT` is the side met first when the boundary of the slit
    domain is traversed along the real axis from -infinity towards the base
    point; it is the left-hand side when the slit is walked from base to tip.
    """

    LEFT = "left"
    RIGHT = "right"


@dataclasses.dataclass(frozen=True)
class IntervalOnR:
    a: float
    b: float

    def __post_init__(self):
        if not self.a <= self.b:
            raise InvalidArgument(f"IntervalOnR: a ({self.a}) must not exceed b ({self.b})")

    @property
    def length(self):
        return self.b - self.a


@dataclasses.dataclass(frozen=True)
class SingularPair:
    """
    Endpoints of the image segment of the slit on the real line at capacity
    `t`: the left side maps to [f_minus, lam], the right side to [lam, f_plus].
    """

    t: float
    f_minus: float
    lam: float
    f_plus: float

    def __post_init__(self):
        if not self.f_minus <= self.lam <= self.f_plus:
            raise InvalidArgument(
                f"SingularPair: expected f_minus <= lambda <= f_plus, got "
                f"({self.f_minus}, {self.lam}, {self.f_plus}) at t={self.t}"
            )

    @property
    def left_interval(self):
        return IntervalOnR(self.f_minus, self.lam)

    @property
    def right_interval(self):
        return IntervalOnR(self.lam, self.f_plus)

    @property
    def length(self):
        return self.f_plus - self.f_minus


@dataclasses.dataclass(frozen=True)
class MeasurePair:
    t: float
    m_left: float
    m_right: float

    def __post_init__(self):
        if not (0 < self.m_left < 1 and 0 < self.m_right < 1):
            raise InvalidArgument(
                f"MeasurePair: harmonic measures must lie in (0, 1), got ({self.m_left}, {self.m_right})"
            )
        if not self.m_left + self.m_right < 1:
            raise InvalidArgument(
                f"MeasurePair: the two sides cannot carry the whole boundary, got m_left + m_right = "
                f"{self.m_left + self.m_right}"
            )


@dataclasses.dataclass(frozen=True)
class LimitEstimate:
    limit: float
    error: float
    model: str


@dataclasses.dataclass(frozen=True, eq=False)
class RatioSeries:
    """
    A ratio of slit-side quantities sampled on a capacity grid decreasing
    towards 0, together with its extrapolated t -> 0 limit.
    """

    times: np.ndarray
    values: np.ndarray
    limit_estimate: float
    limit_error: float
    model: str
    theorem: int
    quantity: str
    expected_limit: Optional[float] = None
    pairs: tuple = ()

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape:
            raise InvalidArgument("RatioSeries: times and values must have the same shape")
        if np.any(np.diff(times) >= 0) or np.any(times <= 0):
            raise InvalidArgument("RatioSeries: times must be positive and strictly decreasing")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise InvalidArgument("RatioSeries: values must be finite and positive")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def summary(self):
        return dict(
            limit=float(self.limit_estimate),
            error=float(self.limit_error),
            model=self.model,
            theorem=self.theorem,
        )


@dataclasses.dataclass(frozen=True, eq=False)
class Curve:
    """
    A simple slit in the closed upper half-plane stored as a polyline.

    Parameters
    ----------
    vertices : np.ndarray of complex
        Vertices from the base point 0 to the tip.
    arc_length : np.ndarray of float
        Arc length at every vertex (0 at the base).
    capacity : np.ndarray of float, optional
        Half-plane capacity of the prefix ending at every vertex, when known.
    """

    vertices: np.ndarray
    arc_length: np.ndarray
    capacity: Optional[np.ndarray] = None

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=complex)
        arc_length = np.asarray(self.arc_length, dtype=float)
        if vertices.ndim != 1 or len(vertices) < 2:
            raise InvalidArgument("Curve: at least 2 vertices are required")
        if arc_length.shape != vertices.shape:
            raise InvalidArgument("Curve: arc_length must have one entry per vertex")
        if vertices[0] != 0:
            raise InvalidArgument(f"Curve: the first vertex must be the origin, got {vertices[0]}")
        if np.any(vertices[1:].imag <= 0):
            raise InvalidArgument("Curve: all vertices but the base must lie in the upper half-plane")
        if arc_length[0] != 0 or np.any(np.diff(arc_length) <= 0):
            raise InvalidArgument("Curve: arc length must start at 0 and strictly increase")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "arc_length", arc_length)
        if self.capacity is not None:
            capacity = np.asarray(self.capacity, dtype=float)
            if capacity.shape != vertices.shape:
                raise InvalidArgument("Curve: capacity must have one entry per vertex")
            if np.any(np.diff(capacity) <= 0):
                raise InvalidArgument("Curve: capacity must strictly increase along the curve")
            object.__setattr__(self, "capacity", capacity)

    @classmethod
    def from_vertices(cls, vertices, capacity=None):
        """Build a curve whose arc length is accumulated from the chords."""
        vertices = np.asarray(vertices, dtype=complex)
        arc_length = np.concatenate(([0.0], np.cumsum(np.abs(np.diff(vertices)))))
        return cls(vertices=vertices, arc_length=arc_length, capacity=capacity)

    def __len__(self):
        return len(self.vertices)

    @property
    def length(self):
        return float(self.arc_length[-1])

    @property
    def tip(self):
        return complex(self.vertices[-1])

    def scaled(self, alpha):
        capacity = None if self.capacity is None else self.capacity * alpha**2
        return Curve(self.vertices * alpha, self.arc_length * alpha, capacity)

    def prefix(self, n_vertices):
        """The sub-curve made of the first `n_vertices` vertices."""
        if not 2 <= n_vertices <= len(self):
            raise InvalidArgument(f"Curve.prefix: n_vertices must lie in [2, {len(self)}]")
        capacity = None if self.capacity is None else self.capacity[:n_vertices]
        return Curve(self.vertices[:n_vertices], self.arc_length[:n_vertices], capacity)

    def check_simple(self):
        """
        Raise `InvalidArgument` if two non-adjacent segments of the polyline
        intersect.
        """
        a = self.vertices[:-1]
        b = self.vertices[1:]
        lo_x, hi_x = np.minimum(a.real, b.real), np.maximum(a.real, b.real)
        lo_y, hi_y = np.minimum(a.imag, b.imag), np.maximum(a.imag, b.imag)

        def cross(u, v):
            return u.real * v.imag - u.imag * v.real

        for i in range(len(a) - 2):
            j = np.arange(i + 2, len(a))
            overlap = (
                (lo_x[j] <= hi_x[i])
                & (hi_x[j] >= lo_x[i])
                & (lo_y[j] <= hi_y[i])
                & (hi_y[j] >= lo_y[i])
            )
            j = j[overlap]
            if len(j) == 0:
                continue
            d_i = b[i] - a[i]
            d_j = b[j] - a[j]
            o1 = cross(d_i, a[j] - a[i])
            o2 = cross(d_i, b[j] - a[i])
            o3 = cross(d_j, a[i] - a[j])
            o4 = cross(d_j, b[i] - a[j])
            hit = (o1 * o2 < 0) & (o3 * o4 < 0)
            if np.any(hit):
                raise InvalidArgument(
                    f"Curve: segment {i} intersects segment {int(j[hit][0])}, the curve is not simple"
                )
