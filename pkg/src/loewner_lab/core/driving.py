import dataclasses
import enum
import functools
from typing import Optional

import numpy as np
import scipy.interpolate

from ..exceptions import InvalidArgument

# relative slack when checking that a time lies in the domain
DOMAIN_SLACK = 1e-12


class DrivingKind(enum.Enum):
    CONSTANT = "const"
    SQRT = "sqrt"
    ARC = "arc"
    SAMPLED = "sampled"


@dataclasses.dataclass(frozen=True, eq=False)
class DrivingFunction:
    """
    Real driving term λ(t) of the chordal Löwner equation on [0, domain_end].

    The built-in families are λ ≡ c₀ (`CONSTANT`), λ = c√t (`SQRT`), the
    implicit circular-arc driving λ₀(t) (`ARC`, tabulated on a uniform grid in
    t^(1/3) and interpolated by a cubic spline in that variable) and sampled
    tables (`SAMPLED`, interpolated by a monotone cubic in √t).

    `sign` and `scale` implement the reflection λ ↦ -λ and the scaling
    λ ↦ (1/α)λ(α²t) without touching the underlying data: the value at `t`
    is `sign * base(scale**2 * t) / scale`.
    """

    kind: DrivingKind
    domain_end: float
    coefficient: float = 0.0
    times: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    sign: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.domain_end > 0:
            raise InvalidArgument(f"DrivingFunction: domain_end must be positive, got {self.domain_end}")
        if self.kind == DrivingKind.SQRT and self.coefficient < 0:
            raise InvalidArgument("DrivingFunction: the sqrt family needs c >= 0, use reflected() for c < 0")
        if self.kind in (DrivingKind.ARC, DrivingKind.SAMPLED):
            if self.times is None or self.values is None:
                raise InvalidArgument(f"DrivingFunction: {self.kind.value} kind needs times and values")
            times = np.asarray(self.times, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if times.shape != values.shape or times.ndim != 1 or len(times) < 2:
                raise InvalidArgument("DrivingFunction: times and values must be 1D arrays of equal length >= 2")
            if times[0] != 0 or np.any(np.diff(times) <= 0):
                raise InvalidArgument("DrivingFunction: sample times must start at 0 and strictly increase")
            object.__setattr__(self, "times", times)
            object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value=0.0, domain_end=1.0):
        return cls(DrivingKind.CONSTANT, domain_end, coefficient=float(value))

    @classmethod
    def sqrt(cls, c, domain_end=1.0):
        if c < 0:
            return cls(DrivingKind.SQRT, domain_end, coefficient=-float(c)).reflected()
        return cls(DrivingKind.SQRT, domain_end, coefficient=float(c))

    @classmethod
    def sampled(cls, times, values):
        times = np.asarray(times, dtype=float)
        return cls(DrivingKind.SAMPLED, float(times[-1]), times=times, values=values)

    @functools.cached_property
    def _interpolator(self):
        if self.kind == DrivingKind.SAMPLED:
            return scipy.interpolate.PchipInterpolator(np.sqrt(self.times), self.values)
        if self.kind == DrivingKind.ARC:
            return scipy.interpolate.CubicSpline(np.cbrt(self.times), self.values)
        return None

    def _base(self, t):
        if self.kind == DrivingKind.CONSTANT:
            return np.full_like(t, self.coefficient)
        if self.kind == DrivingKind.SQRT:
            return self.coefficient * np.sqrt(t)
        if self.kind == DrivingKind.SAMPLED:
            return self._interpolator(np.sqrt(t))
        return self._interpolator(np.cbrt(t))

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > self.domain_end * (1 + DOMAIN_SLACK)):
            raise InvalidArgument(
                f"DrivingFunction: t={t} outside the domain [0, {self.domain_end}]"
            )
        t_base = np.clip(t_arr * self.scale**2, 0.0, None)
        value = self.sign * self._base(t_base) / self.scale
        if np.ndim(t) == 0:
            return float(value)
        return value

    def at_sqrt_time(self, u):
        """λ(u²), written so that the sqrt family stays linear in u."""
        if self.kind == DrivingKind.SQRT:
            return self.sign * self.coefficient * u
        if self.kind == DrivingKind.ARC:
            # scalar fast path for the integrators; no domain check
            return self.sign * self._interpolator(np.cbrt((self.scale * u) ** 2)) / self.scale
        return self(u * u)

    def reflected(self):
        """The driving -λ(t), whose slit is the mirror image in the imaginary axis."""
        return dataclasses.replace(self, sign=-self.sign)

    def rescaled(self, alpha):
        """The driving (1/α)λ(α²t), whose slit is the original one shrunk by 1/α."""
        if not alpha > 0:
            raise InvalidArgument(f"DrivingFunction.rescaled: alpha must be positive, got {alpha}")
        return dataclasses.replace(
            self, scale=self.scale * alpha, domain_end=self.domain_end / alpha**2
        )

    def describe(self):
        if self.kind == DrivingKind.CONSTANT:
            label = f"const:v={self.coefficient:g}"
        elif self.kind == DrivingKind.SQRT:
            label = f"sqrt:c={self.coefficient:g}"
        else:
            label = f"{self.kind.value}[{len(self.times)} samples]"
        if self.sign < 0:
            label = f"-({label})"
        if self.scale != 1:
            label = f"{label} rescaled by {self.scale:g}"
        return label
