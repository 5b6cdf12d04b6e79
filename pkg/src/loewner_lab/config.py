import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Tuple

import dotenv
import yaml
from loguru import logger

from .exceptions import InvalidArgument

THREADS_ENV_VAR = "LOEWNER_LAB_THREADS"
REAL_ODE_METHODS = ("LSODA", "BDF", "Radau", "RK23", "RK45", "DOP853")


@dataclasses.dataclass(frozen=True)
class NumericConfig:
    """
    Tolerances and resolutions shared by every numerical operation.

    Parameters
    ----------
    ode_rel_tol, ode_abs_tol : float
        Tolerances handed to `scipy.integrate.solve_ivp`.
    ode_method : str
        Explicit Runge-Kutta method name understood by `solve_ivp` (complex
        states are integrated directly, so implicit methods are not allowed).
    real_ode_method : str
        `solve_ivp` method for the real starts that approach the singular
        solutions. On the tangential side of a slit such a start is pulled
        onto a solution hugging λ(t), which is stiff; the default LSODA
        switches to BDF there.
    eps_list : tuple of float
        Offsets, relative to the square root of the capacity, from which the
        singular solutions are approached. Decreasing, each below half the
        previous one.
    extrapolation_rel_tol : float
        Acceptance threshold of the ε→0 extrapolation, relative to the
        length of the image segment.
    newton_tol : float
        Residual tolerance of every Newton iteration.
    max_newton_iters : int
    weld_steps : int
        Default number of curve vertices when a curve is generated for welding.
    bootstrap_fraction : float
        Length of the square-root bootstrap of the backward flow as a fraction
        of the capacity.
    arc_t_max : float
        Upper end of the capacity range on which the circular-arc family is
        solved.
    """

    ode_rel_tol: float = 1e-11
    ode_abs_tol: float = 1e-14
    ode_method: str = "DOP853"
    real_ode_method: str = "LSODA"
    eps_list: Tuple[float, ...] = (1e-4, 1e-5, 1e-6, 1e-7)
    extrapolation_rel_tol: float = 1e-6
    newton_tol: float = 1e-12
    max_newton_iters: int = 50
    weld_steps: int = 4096
    bootstrap_fraction: float = 1e-10
    arc_t_max: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "eps_list", tuple(float(e) for e in self.eps_list))
        for name in (
            "ode_rel_tol",
            "ode_abs_tol",
            "extrapolation_rel_tol",
            "newton_tol",
            "bootstrap_fraction",
            "arc_t_max",
        ):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"NumericConfig: {name} must be positive")
        if self.ode_method not in ("RK23", "RK45", "DOP853"):
            raise InvalidArgument(
                f"NumericConfig: ode_method must be an explicit Runge-Kutta method, got {self.ode_method}"
            )
        if self.real_ode_method not in REAL_ODE_METHODS:
            raise InvalidArgument(
                f"NumericConfig: real_ode_method must be one of {REAL_ODE_METHODS}, got {self.real_ode_method}"
            )
        if len(self.eps_list) < 3:
            raise InvalidArgument("NumericConfig: eps_list needs at least 3 entries")
        if self.eps_list[0] <= 0:
            raise InvalidArgument("NumericConfig: eps_list entries must be positive")
        for prev, eps in zip(self.eps_list, self.eps_list[1:]):
            if not 0 < eps < prev / 2:
                raise InvalidArgument(
                    f"NumericConfig: eps_list must decrease by more than a factor 2 per entry ({prev} -> {eps})"
                )
        if self.max_newton_iters < 1:
            raise InvalidArgument("NumericConfig: max_newton_iters must be at least 1")
        if self.weld_steps < 2:
            raise InvalidArgument("NumericConfig: weld_steps must be at least 2")

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise InvalidArgument(f"Unknown numeric config keys: {sorted(unknown)}")
        return cls(**values)

    def updated(self, **overrides):
        """Return a copy with the non-None `overrides` applied."""
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **overrides)

    def to_dict(self):
        values = dataclasses.asdict(self)
        values["eps_list"] = list(values["eps_list"])
        return values


def load_config(path):
    """
    Read a numeric config from a YAML (or JSON) file.

    The file either holds the `NumericConfig` keys at the top level or below a
    `numeric` key.
    """
    path = Path(path)
    if not path.exists():
        raise InvalidArgument(f"Config file {path} not found")
    with path.open("r") as f:
        values = yaml.safe_load(f) or {}
    if not isinstance(values, dict):
        raise InvalidArgument(f"Config file {path} must contain a mapping")
    values = values.get("numeric", values)
    logger.debug(f"Loaded numeric config from {path}: {values}")
    return NumericConfig.from_dict(values)


def get_max_workers():
    """
    Number of worker threads for grid evaluations, capped by the
    `LOEWNER_LAB_THREADS` environment variable (a `.env` file is honoured).
    """
    dotenv.load_dotenv()
    value = os.getenv(THREADS_ENV_VAR)
    if value is None:
        return 1
    try:
        n_workers = int(value)
    except ValueError as ex:
        raise InvalidArgument(f"{THREADS_ENV_VAR} must be an integer, got {value!r}") from ex
    return max(n_workers, 1)


def parallel_map(func, items):
    """Map `func` over `items`, returning results in input order."""
    items = list(items)
    n_workers = min(get_max_workers(), len(items))
    if n_workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_workers) as executor:
        return list(executor.map(func, items))
